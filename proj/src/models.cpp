#include "delab/models.hpp"

#include "delab/iterlog.hpp"
#include "delab/quadrature.hpp"
#include "delab/special.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace delab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCubeHalfWidth = 1.7320508075688772;  // sqrt 3
constexpr int kLastRepresentableRung = 6;                // exp(exp(7)) overflows
constexpr double kMinSampledLogProb = -690.7755278982137;  // log(1e-300)

// E[|X|^2 1{|X| <= t}] for X uniform on [-h, h]^d.
double cube_within(int d, double t) {
  const double h = kCubeHalfWidth;
  if (t <= 0.0) return 0.0;
  if (t >= h * std::sqrt(static_cast<double>(d))) return d;
  const double a = std::min(h, t);
  if (d == 1) return a * a * a / (3.0 * h);

  if (d == 2) {
    // (1/h^2) [ int_0^xc 2 h x^2 dx + int_xc^a 2 x^2 sqrt(t^2 - x^2) dx ],  xc = sqrt(t^2 - h^2)^+.
    const double t2 = t * t;
    const double xc = std::min(a, std::sqrt(std::max(t2 - h * h, 0.0)));
    auto g = [t, t2](double x) {
      return x * (2.0 * x * x - t2) * std::sqrt(std::max(t2 - x * x, 0.0)) / 8.0 +
             t2 * t2 / 8.0 * std::asin(std::min(x / t, 1.0));
    };
    return (2.0 * h * xc * xc * xc / 3.0 + 2.0 * (g(a) - g(xc))) / (h * h);
  }
  // d == 3: x^2 times the area of [-h, h]^2 intersected with the disk of
  // radius r = sqrt(t^2 - x^2). The area is 4h^2 for x <= x2, pi r^2 for
  // x >= x1, and needs quadrature in between.
  const double t2 = t * t;
  const double x2 = std::min(a, std::sqrt(std::max(t2 - 2.0 * h * h, 0.0)));
  const double x1 = std::sqrt(std::max(t2 - h * h, 0.0));
  const double x1c = std::min(a, x1);
  double total = 4.0 * h * h * x2 * x2 * x2 / 3.0;
  auto disk = [t2](double x) { return t2 * x * x * x / 3.0 - x * x * x * x * x / 5.0; };
  total += std::numbers::pi * (disk(a) - disk(x1c));
  if (x1c > x2) {
    // x = x1 - w^2 makes both square-root endpoints at r = h smooth.
    auto f = [&](double w) {
      const double x = x1 - w * w;
      const double r2 = std::max(t2 - x * x, h * h);
      const double r = std::sqrt(r2);
      const double area = std::numbers::pi * r2 - 4.0 * (r2 * std::acos(std::min(h / r, 1.0)) -
                                                        h * w * std::sqrt(x1 + x));
      return x * x * area * 2.0 * w;
    };
    QuadratureOptions opts;
    opts.abs_tol = 1e-15;
    opts.rel_tol = 1e-13;
    total += integrate(f, std::sqrt(x1 - x1c), std::sqrt(x1 - x2), opts).value;
  }
  return 3.0 * 2.0 / (8.0 * h * h * h) * total;
}

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::gaussian_iso: return "gaussian_iso";
    case Family::rademacher_product: return "rademacher_product";
    case Family::uniform_cube: return "uniform_cube";
    case Family::atom_ladder: return "atom_ladder";
    case Family::atom_ladder_fat: return "atom_ladder_fat";
  }
  return "?";
}

std::string to_string(DirectionMode m) { return m == DirectionMode::isotropic ? "isotropic" : "axis"; }

Family family_from_string(const std::string& s) {
  for (Family f : {Family::gaussian_iso, Family::rademacher_product, Family::uniform_cube,
                   Family::atom_ladder, Family::atom_ladder_fat})
    if (to_string(f) == s) return f;
  throw std::invalid_argument("unknown distribution family '" + s + "'");
}

DirectionMode direction_from_string(const std::string& s) {
  if (s == "isotropic") return DirectionMode::isotropic;
  if (s == "axis") return DirectionMode::axis;
  throw std::invalid_argument("unknown direction mode '" + s + "'");
}

// --- construction -----------------------------------------------------------

static void check_dim(int d) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("dimension must be in 1..8");
}

DistributionSpec DistributionSpec::gaussian_iso(int d) {
  check_dim(d);
  return {Family::gaussian_iso, d};
}

DistributionSpec DistributionSpec::rademacher_product(int d) {
  check_dim(d);
  return {Family::rademacher_product, d};
}

DistributionSpec DistributionSpec::uniform_cube(int d) {
  check_dim(d);
  if (d > 3) throw std::invalid_argument("uniform_cube: analytic moments implemented for d <= 3");
  return {Family::uniform_cube, d};
}

DistributionSpec DistributionSpec::atom_ladder(int d, double c, int k0, DirectionMode mode) {
  check_dim(d);
  if (!(c >= 0.0)) throw std::invalid_argument("atom_ladder: c must be >= 0");
  if (k0 < 1) throw std::invalid_argument("atom_ladder: k0 must be >= 1");
  if (!(c / k0 < d)) throw std::invalid_argument("atom_ladder: need c / k0 < d");
  DistributionSpec s{Family::atom_ladder, d};
  s.c_ = c;
  s.k0_ = k0;
  s.direction_ = mode;
  s.build_ladder();
  return s;
}

DistributionSpec DistributionSpec::atom_ladder_fat(int d, int k0, DirectionMode mode) {
  check_dim(d);
  if (k0 < 1) throw std::invalid_argument("atom_ladder_fat: k0 must be >= 1");
  if (!(1.0 / std::sqrt(static_cast<double>(k0)) < d))
    throw std::invalid_argument("atom_ladder_fat: need 1/sqrt(k0) < d");
  DistributionSpec s{Family::atom_ladder_fat, d};
  s.c_ = 1.0;
  s.k0_ = k0;
  s.direction_ = mode;
  s.build_ladder();
  return s;
}

double DistributionSpec::ladder_tail_from(int k) const {
  if (!is_ladder()) return 0.0;
  k = std::max(k, k0_);
  if (family_ == Family::atom_ladder) return c_ / k;
  return 1.0 / std::sqrt(static_cast<double>(k));
}

void DistributionSpec::build_ladder() {
  rungs_.clear();
  sampled_rungs_ = 0;
  double sampled_prob = 0.0;
  for (int k = k0_; k <= std::max(k0_, kLastRepresentableRung); ++k) {
    LadderRung r;
    r.k = k;
    const double log_level = std::exp(static_cast<double>(k));
    r.level = std::exp(log_level);
    r.weight = ladder_tail_from(k) - ladder_tail_from(k + 1);
    r.log_prob = r.weight > 0.0 ? std::log(r.weight) - 2.0 * log_level : -kInf;
    if (r.log_prob >= kMinSampledLogProb && std::isfinite(r.level)) {
      ++sampled_rungs_;
      sampled_prob += std::exp(r.log_prob);
    }
    rungs_.push_back(r);
  }
  base_w_ = 1.0 - sampled_prob;
  base_u_ = std::sqrt(3.0 * (d_ - ladder_tail_from(k0_)) / base_w_);
}

std::string DistributionSpec::id() const {
  std::ostringstream os;
  os << to_string(family_);
  if (family_ == Family::atom_ladder)
    os << "(c=" << c_ << ",k0=" << k0_ << "," << to_string(direction_) << ")";
  else if (family_ == Family::atom_ladder_fat)
    os << "(k0=" << k0_ << "," << to_string(direction_) << ")";
  return os.str();
}

// --- analytic moments -------------------------------------------------------

int DistributionSpec::first_rung_at_or_above(double t) const {
  for (const auto& r : rungs_)
    if (r.level >= t) return r.k;
  // Beyond the representable rungs; t is finite so exp(exp(k)) >= t holds
  // for k = ceil(log log t).
  return std::max(static_cast<int>(std::ceil(std::log(std::log(t)))), rungs_.back().k + 1);
}

int DistributionSpec::last_rung_at_or_below(double t) const {
  int k = k0_ - 1;
  for (const auto& r : rungs_)
    if (r.level <= t) k = r.k;
  if (std::isinf(t)) return std::numeric_limits<int>::max();
  return k;
}

double DistributionSpec::second_moment_within(double t) const {
  if (!(t >= 0.0)) throw std::invalid_argument("second_moment_within: t must be >= 0");
  const double d = d_;
  switch (family_) {
    case Family::gaussian_iso:
      return std::isinf(t) ? d : d * gamma_p(0.5 * (d + 2.0), 0.5 * t * t);
    case Family::rademacher_product:
      return t >= std::sqrt(d) ? d : 0.0;
    case Family::uniform_cube:
      return cube_within(d_, t);
    case Family::atom_ladder:
    case Family::atom_ladder_fat: {
      const double m = std::min(t, base_u_);
      const double base = base_w_ * m * m * m / (3.0 * base_u_);
      const int k = last_rung_at_or_below(t);
      if (k == std::numeric_limits<int>::max()) return d;
      return base + ladder_tail_from(k0_) - ladder_tail_from(k + 1);
    }
  }
  return 0.0;
}

double DistributionSpec::tail_second_moment(double t) const {
  if (!(t >= 0.0)) throw std::invalid_argument("tail_second_moment: t must be >= 0");
  const double d = d_;
  if (std::isinf(t)) return 0.0;
  switch (family_) {
    case Family::gaussian_iso:
      return d * gamma_q(0.5 * (d + 2.0), 0.5 * t * t);
    case Family::rademacher_product:
      return t <= std::sqrt(d) ? d : 0.0;
    case Family::uniform_cube:
      return d - cube_within(d_, t);
    case Family::atom_ladder:
    case Family::atom_ladder_fat: {
      const double m = std::min(t, base_u_);
      const double base = base_w_ * (base_u_ * base_u_ * base_u_ - m * m * m) / (3.0 * base_u_);
      return base + ladder_tail_from(first_rung_at_or_above(t));
    }
  }
  return 0.0;
}

Psd truncated_second_moment(const DistributionSpec& spec, double t) {
  const int d = spec.dim();
  return Psd::scaled_identity(d, spec.second_moment_within(t) / d);
}

std::vector<TailProfile> tail_profile(const DistributionSpec& spec, std::span<const double> t_grid) {
  std::vector<TailProfile> out;
  out.reserve(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (i > 0 && !(t_grid[i] >= t_grid[i - 1]))
      throw std::invalid_argument("tail_profile: grid must be ascending");
    const double t = t_grid[i];
    const double tau = spec.tail_second_moment(t);
    out.push_back({t, tau, tau * LL(t)});
  }
  return out;
}

// --- sampling ---------------------------------------------------------------

Sampler::Sampler(const DistributionSpec& spec) : spec_(spec) {
  if (spec.is_ladder()) {
    double acc = 0.0;
    for (int i = 0; i < spec.sampled_rung_count(); ++i) {
      acc += std::exp(spec.rungs()[i].log_prob);
      rung_cdf_.push_back(acc);
    }
    ladder_prob_ = acc;
  }
}

void Sampler::draw_direction(Stream& s, Vec& out) {
  const int d = spec_.dim();
  if (spec_.direction() == DirectionMode::axis || d == 1) {
    const auto bits = s();
    out.setZero(d);
    out(static_cast<int>((bits >> 1) % static_cast<std::uint64_t>(d))) = (bits & 1) ? 1.0 : -1.0;
    return;
  }
  double norm2 = 0.0;
  do {
    for (int i = 0; i < d; ++i) out(i) = normal_(s);
    norm2 = out.squaredNorm();
  } while (norm2 == 0.0);
  out /= std::sqrt(norm2);
}

double Sampler::draw_radius(Stream& s, bool& signed_base) {
  const double u = uniform01(s);
  if (u < ladder_prob_) {
    signed_base = false;
    const auto it = std::upper_bound(rung_cdf_.begin(), rung_cdf_.end(), u);
    return spec_.rungs()[static_cast<std::size_t>(it - rung_cdf_.begin())].level;
  }
  signed_base = true;
  return spec_.base_halfwidth() * (2.0 * uniform01(s) - 1.0);
}

void Sampler::draw(Stream& s, Vec& out) {
  const int d = spec_.dim();
  out.resize(d);
  switch (spec_.family()) {
    case Family::gaussian_iso:
      for (int i = 0; i < d; ++i) out(i) = normal_(s);
      return;
    case Family::rademacher_product:
      for (int i = 0; i < d; ++i) out(i) = (s() >> 63) ? 1.0 : -1.0;
      return;
    case Family::uniform_cube:
      for (int i = 0; i < d; ++i) out(i) = kCubeHalfWidth * (2.0 * uniform01(s) - 1.0);
      return;
    case Family::atom_ladder:
    case Family::atom_ladder_fat: {
      bool signed_base = false;
      const double r = draw_radius(s, signed_base);
      if (d == 1 && signed_base) {
        out(0) = r;
        return;
      }
      draw_direction(s, out);
      out *= std::abs(r);
      return;
    }
  }
}

Vec sample(const DistributionSpec& spec, Stream& s) {
  Sampler sampler(spec);
  return sampler(s);
}

}  // namespace delab
