#include "delab/limits.hpp"

#include "delab/iterlog.hpp"
#include "delab/quadrature.hpp"
#include "delab/special.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace delab {

double gumbel_cdf(const GumbelLaw& law, double y) { return std::exp(-std::exp(-(y - law.shift))); }

double gumbel_quantile(const GumbelLaw& law, double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("gumbel_quantile: p must lie in (0, 1)");
  return law.shift - std::log(-std::log(p));
}

double PhiFamily::radicand(double t) const { return 2.0 * LL(t) + a * LLL(t) + b * LLLL(t); }

double PhiFamily::radicand_checked(double t) const {
  const double r = radicand(t);
  if (r < 0.0) throw std::domain_error("phi: negative radicand at t = " + std::to_string(t));
  return r;
}

double PhiFamily::operator()(double t) const { return std::sqrt(radicand_checked(t)); }

double chi_norm_tail(int d, double t) {
  if (d < 1) throw std::invalid_argument("chi_norm_tail: d must be >= 1");
  if (!(t >= 0.0)) throw std::invalid_argument("chi_norm_tail: t must be >= 0");
  return gamma_q(0.5 * d, 0.5 * t * t);
}

Envelope chi_tail_envelope(int d, std::span<const double> t_grid) {
  if (t_grid.empty()) throw std::invalid_argument("chi_tail_envelope: empty grid");
  Envelope env;
  env.c1_hat = std::numeric_limits<double>::infinity();
  env.c2_hat = 0.0;
  for (double t : t_grid) {
    if (t < 2.0 * d || t > 12.0) throw std::invalid_argument("chi_tail_envelope: grid must lie in [2d, 12]");
    const double r = chi_norm_tail(d, t) / (std::pow(t, d - 2) * std::exp(-0.5 * t * t));
    env.t.push_back(t);
    env.ratio.push_back(r);
    env.c1_hat = std::min(env.c1_hat, r);
    env.c2_hat = std::max(env.c2_hat, r);
  }
  return env;
}

TailBound gaussian_norm_tail_bound(double x, double trace, double sigma2_max) {
  if (!(trace > 0.0) || !(sigma2_max > 0.0))
    throw std::invalid_argument("gaussian_norm_tail_bound: trace and sigma2_max must be > 0");
  TailBound b;
  b.bound_a = std::exp(-x * x / (8.0 * sigma2_max));
  b.a_applicable = x >= 2.0 * trace;
  b.bound_b = 2.0 * std::exp(-x * x / (8.0 * trace));
  return b;
}

// --- two-component chi-square mixture ---------------------------------------------

double mixture_density_ratio(double sigma, double z) {
  if (!(sigma > 0.0 && sigma < 1.0)) throw std::invalid_argument("mixture_density_ratio: sigma must lie in (0, 1)");
  if (!(z > 0.0)) throw std::invalid_argument("mixture_density_ratio: z must be > 0");
  // h(z)/h1(z) = (sigma sqrt(2 pi))^{-1} int_0^z (1 - y/z)^{-1/2} y^{-1/2} e^{-lam y / 2} dy
  // with lam = sigma^{-2} - 1; y = z sin^2(theta) turns it into
  // (2 sqrt z / (sigma sqrt(2 pi))) int_0^{pi/2} e^{-lam z sin^2(theta) / 2} d theta.
  const double lam = 1.0 / (sigma * sigma) - 1.0;
  QuadratureOptions opts;
  opts.abs_tol = 1e-15;
  opts.rel_tol = 1e-12;
  // The integrand has width ~ 1/sqrt(lam z) around theta = 0.
  const double width = 1.0 / std::sqrt(lam * z);
  std::vector<double> cuts;
  for (double c = width; c < 0.5 * std::numbers::pi && cuts.size() < 8; c *= 4.0) cuts.push_back(c);
  const auto r = integrate(
      [&](double th) {
        const double s = std::sin(th);
        return std::exp(-0.5 * lam * z * s * s);
      },
      0.0, 0.5 * std::numbers::pi, cuts, opts);
  return 2.0 * std::sqrt(z) / (sigma * std::sqrt(2.0 * std::numbers::pi)) * r.value;
}

DensityRatioReport density_ratio_scan(double sigma, std::span<const double> z_grid) {
  if (z_grid.empty()) throw std::invalid_argument("density_ratio_scan: empty grid");
  DensityRatioReport rep;
  rep.bound = 2.0 / std::sqrt(1.0 - sigma * sigma);
  for (double z : z_grid) {
    const double r = mixture_density_ratio(sigma, z);
    if (r > rep.max_ratio) rep.max_ratio = r, rep.argmax_z = z;
  }
  rep.holds = rep.max_ratio <= rep.bound;
  return rep;
}

double mixture_tail(double sigma, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("mixture_tail: t must be > 0");
  auto h = [&](double z) {
    const double h1 = std::exp(-0.5 * z) / std::sqrt(2.0 * std::numbers::pi * z);
    return h1 == 0.0 ? 0.0 : mixture_density_ratio(sigma, z) * h1;
  };
  QuadratureOptions opts;
  opts.abs_tol = 1e-14;
  opts.rel_tol = 1e-10;
  return integrate_to_infinity(h, t * t, opts).value;
}

// --- integral test ------------------------------------------------------------------

std::string to_string(Convergence c) { return c == Convergence::convergent ? "convergent" : "divergent"; }

double integral_test_term(const PhiFamily& phi, double n) {
  const double r = phi.radicand_checked(n);
  return std::pow(r, 0.5 * phi.d) * std::exp(-0.5 * r) / n;
}

Convergence integral_test_classify(const PhiFamily& phi) {
  // Term ~ 2^{d/2} n^{-1} (Ln)^{-1} (LLn)^{(d-a)/2} (LLLn)^{-b/2}; with u = LLn
  // the sum behaves like int u^{(d-a)/2} (log u)^{-b/2} du.
  const double crit = phi.d + 2.0;
  if (phi.a > crit) return Convergence::convergent;
  if (phi.a == crit && phi.b > 2.0) return Convergence::convergent;
  return Convergence::divergent;
}

double integral_test_direct_sum(const PhiFamily& phi, std::int64_t lo, std::int64_t hi) {
  double sum = 0.0, comp = 0.0;
  for (std::int64_t k = std::max<std::int64_t>(lo, 1); k <= hi; ++k) {
    const double y = integral_test_term(phi, static_cast<double>(k)) - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

namespace {

// With u = LLn = e^w (valid once Ln >= e), n^{-1} phi^d e^{-phi^2/2} dn equals
//   phi^d exp(-(a L(u) + b LL(u)) / 2) e^w dw,
// where L(u) = max(w, 1), LL(u) = log(max(w, e)) and
// phi^2 = 2 e^w + a L(u) + b LL(u). Returned in log form.
double log_integrand_w(const PhiFamily& phi, double w) {
  const double l3 = std::max(w, 1.0);
  const double l4 = std::log(std::max(w, std::numbers::e));
  const double rest = phi.a * l3 + phi.b * l4;
  double log_r;
  if (w < 600.0) {
    const double r = 2.0 * std::exp(w) + rest;
    if (r < 0.0) throw std::domain_error("phi: negative radicand in the tail");
    log_r = std::log(r);
  } else {
    log_r = w + std::log1p(0.5 * rest * std::exp(-w)) + std::numbers::ln2;
  }
  return 0.5 * phi.d * log_r - 0.5 * rest + w;
}

// log of the integral over [w0, w1] of exp(log_integrand_w). Adaptive
// quadrature after scaling by the peak; blocks across which the integrand
// varies by more than e^200 are dominated by one endpoint and use the
// exponential-tail approximation M - log|g'|.
double log_block_integral(const PhiFamily& phi, double w0, double w1) {
  const double g0 = log_integrand_w(phi, w0);
  const double g1 = log_integrand_w(phi, w1);
  double peak = std::max(g0, g1);
  for (int i = 1; i < 8; ++i) peak = std::max(peak, log_integrand_w(phi, w0 + (w1 - w0) * i / 8.0));
  if (std::abs(g1 - g0) > 200.0) {
    const double w_peak = g1 > g0 ? w1 : w0;
    const double h = 1e-6 * std::max(1.0, std::abs(w_peak));
    const double slope = (log_integrand_w(phi, w_peak + h) - log_integrand_w(phi, w_peak - h)) / (2.0 * h);
    return peak - std::log(std::abs(slope));
  }
  QuadratureOptions opts;
  opts.abs_tol = 0.0;
  opts.rel_tol = 1e-10;
  opts.throw_on_failure = false;
  const auto r = integrate([&](double w) { return std::exp(log_integrand_w(phi, w) - peak); }, w0, w1, opts);
  return peak + std::log(r.value);
}

double w_of(double n) {
  const double u = std::log(std::log(n));
  if (!(u >= 1.0)) throw std::invalid_argument("integral test: substitution needs n >= exp(e)");
  return std::log(u);
}

double term_derivative(const PhiFamily& phi, double x) {
  const double h = 1e-4 * x;
  return (integral_test_term(phi, x + h) - integral_test_term(phi, x - h)) / (2.0 * h);
}

}  // namespace

double integral_test_integral(const PhiFamily& phi, double n_lo, double n_hi) {
  if (n_hi <= n_lo) return 0.0;
  double w0 = w_of(n_lo);
  const double w1 = w_of(n_hi);
  double total = 0.0;
  for (double cut : {1.0, std::numbers::e}) {
    if (cut > w0 && cut < w1) {
      total += std::exp(log_block_integral(phi, w0, cut));
      w0 = cut;
    }
  }
  return total + std::exp(log_block_integral(phi, w0, w1));
}

double integral_test_block_sum(const PhiFamily& phi, double lo, double hi) {
  // sum_{k=lo}^{hi} f(k) = int_lo^hi f + (f(lo) + f(hi)) / 2 + (f'(hi) - f'(lo)) / 12 + ...
  double integral = 0.0;
  for (double a = lo; a < hi;) {
    const double b = std::min(2.0 * a, hi);
    integral += integral_test_integral(phi, a, b);
    a = b;
  }
  return integral + 0.5 * (integral_test_term(phi, lo) + integral_test_term(phi, hi)) +
         (term_derivative(phi, hi) - term_derivative(phi, lo)) / 12.0;
}

PartialSumReport integral_test_partial_sums(const PhiFamily& phi, double n_max) {
  if (!(n_max >= 10.0) || n_max > 1e9) throw std::invalid_argument("integral test: n_max must lie in [10, 1e9]");
  constexpr double kDirectLimit = 1e6;
  PartialSumReport rep;

  // Direct summation with checkpoints at powers of ten.
  double sum = 0.0;
  std::int64_t done = 0;
  const auto direct_end = static_cast<std::int64_t>(std::min(n_max, kDirectLimit));
  for (double cp = 10.0; cp <= static_cast<double>(direct_end); cp *= 10.0) {
    const auto upto = static_cast<std::int64_t>(cp);
    sum += integral_test_direct_sum(phi, done + 1, upto);
    done = upto;
    rep.checkpoints.push_back(cp);
    rep.partial_sums.push_back(sum);
  }
  if (done < direct_end) {
    sum += integral_test_direct_sum(phi, done + 1, direct_end);
    done = direct_end;
    rep.checkpoints.push_back(static_cast<double>(done));
    rep.partial_sums.push_back(sum);
  }

  // Euler-Maclaurin blocks from the end of the direct range.
  double lo = static_cast<double>(done);
  while (lo < n_max) {
    const double hi = std::min(lo * 10.0, n_max);
    sum += integral_test_block_sum(phi, lo, hi) - integral_test_term(phi, lo);
    rep.checkpoints.push_back(hi);
    rep.partial_sums.push_back(sum);
    lo = hi;
  }

  // Continuation in w = LLLn over decade blocks [e 10^{j-1}, e 10^j].
  std::vector<double> edges{w_of(n_max)};
  if (edges.back() < 1.0) edges.push_back(1.0);
  if (edges.back() < std::numbers::e) edges.push_back(std::numbers::e);
  for (double w = std::numbers::e * 10.0; w < 3e15; w *= 10.0)
    if (w > edges.back()) edges.push_back(w);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    rep.block_w_end.push_back(edges[i + 1]);
    rep.block_log_increment.push_back(log_block_integral(phi, edges[i], edges[i + 1]));
  }
  const std::size_t m = rep.block_log_increment.size();
  rep.growth_exponent = (rep.block_log_increment[m - 1] - rep.block_log_increment[m - 2]) / std::numbers::ln10;
  rep.last_increment = std::exp(rep.block_log_increment[m - 1]);
  rep.verdict = rep.growth_exponent > -0.05 ? Convergence::divergent : Convergence::convergent;
  return rep;
}

}  // namespace delab
