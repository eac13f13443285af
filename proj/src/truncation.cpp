#include "delab/truncation.hpp"

#include "delab/iterlog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace delab {

std::string to_string(SchemeFamily f) {
  switch (f) {
    case SchemeFamily::sqrt_n: return "sqrt_n";
    case SchemeFamily::sqrt_n_invLL5: return "sqrt_n_invLL5";
    case SchemeFamily::sqrt_n_polylog: return "sqrt_n_polylog";
    case SchemeFamily::table: return "table";
  }
  return "?";
}

SchemeFamily scheme_family_from_string(const std::string& s) {
  for (auto f : {SchemeFamily::sqrt_n, SchemeFamily::sqrt_n_invLL5, SchemeFamily::sqrt_n_polylog,
                 SchemeFamily::table})
    if (to_string(f) == s) return f;
  throw std::invalid_argument("unknown truncation scheme '" + s + "'");
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "PASS";
    case Verdict::fail: return "FAIL";
    case Verdict::inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

std::string to_string(SplitLabel l) {
  switch (l) {
    case SplitLabel::prime: return "prime";
    case SplitLabel::double_prime: return "double_prime";
    case SplitLabel::triple_prime: return "triple_prime";
  }
  return "?";
}

TruncationScheme TruncationScheme::from_table(std::vector<double> values) {
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] < values[i - 1]) throw std::invalid_argument("table scheme must be nondecreasing");
  TruncationScheme s;
  s.family = SchemeFamily::table;
  s.table = std::move(values);
  return s;
}

std::string TruncationScheme::id() const {
  std::ostringstream os;
  os << to_string(family);
  if (family == SchemeFamily::sqrt_n_polylog) os << "(q=" << q << ")";
  if (family == SchemeFamily::table) os << "(len=" << table.size() << ")";
  return os.str();
}

double c_level(const TruncationScheme& scheme, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("c_level: n must be >= 1");
  const std::int64_t m = std::max(n, scheme.n0);
  const double x = static_cast<double>(m);
  switch (scheme.family) {
    case SchemeFamily::sqrt_n: return std::sqrt(x);
    case SchemeFamily::sqrt_n_invLL5: return std::sqrt(x) / std::pow(LL(x), 5);
    case SchemeFamily::sqrt_n_polylog: return std::sqrt(x) * std::pow(LL(x), scheme.q);
    case SchemeFamily::table:
      if (static_cast<std::size_t>(m) > scheme.table.size())
        throw TableExhausted("c_level: index " + std::to_string(m) + " beyond table of length " +
                             std::to_string(scheme.table.size()));
      return scheme.table[static_cast<std::size_t>(m - 1)];
  }
  return 0.0;
}

// --- condition on c_n ---------------------------------------------------------

Condition3Report validate_condition3(const TruncationScheme& scheme, std::span<const std::int64_t> n_grid) {
  if (n_grid.empty()) throw std::invalid_argument("validate_condition3: empty grid");
  if (n_grid.front() < 16) throw std::invalid_argument("validate_condition3: grid must start at >= 16");
  Condition3Report rep;
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (i > 0 && n_grid[i] <= n_grid[i - 1])
      throw std::invalid_argument("validate_condition3: grid must be ascending");
    const double n = static_cast<double>(n_grid[i]);
    const double log_ratio = std::log(c_level(scheme, n_grid[i]) / std::sqrt(n));
    rep.n.push_back(n_grid[i]);
    rep.eps_hat.push_back(std::log(std::max(std::abs(log_ratio), 1.0)) / std::log(std::log(n)));
  }

  // Trend on the upper half of the grid.
  const std::size_t start = rep.n.size() / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, peak = 0;
  const double m = static_cast<double>(rep.n.size() - start);
  for (std::size_t i = start; i < rep.n.size(); ++i) {
    const double x = std::log(static_cast<double>(rep.n[i]));
    const double y = rep.eps_hat[i];
    sx += x, sy += y, sxx += x * x, sxy += x * y;
    peak = std::max(peak, y);
  }
  const double denom = m * sxx - sx * sx;
  rep.tail_slope = denom > 0.0 ? (m * sxy - sx * sy) / denom : 0.0;

  switch (scheme.family) {
    case SchemeFamily::sqrt_n:
    case SchemeFamily::sqrt_n_invLL5:
    case SchemeFamily::sqrt_n_polylog:
      // |log(c_n / sqrt n)| is 0 or |q| LLLn, which is o((log n)^eps) for every eps > 0.
      rep.analytic = true;
      rep.verdict = Verdict::pass;
      return rep;
    case SchemeFamily::table: break;
  }
  const double last = rep.eps_hat.back();
  if (peak == 0.0 || (rep.tail_slope < 0.0 && last < 0.5))
    rep.verdict = Verdict::pass;
  else if (rep.tail_slope >= 0.0 && last >= 0.25)
    rep.verdict = Verdict::fail;
  else
    rep.verdict = Verdict::inconclusive;
  return rep;
}

// --- Gamma_n ------------------------------------------------------------------

static GammaEntry entry_from_second_moment(std::int64_t k, const Psd& a2) {
  const Psd g = psd_sqrt(a2);
  const auto e = eigen(g.matrix());
  GammaEntry out;
  out.k_begin = k;
  out.gamma = g.matrix();
  out.lambda_min = e.lambda_min();
  out.lambda_max = e.lambda_max();
  out.sigma2 = a2.matrix().trace() / a2.dim();
  out.gamma_inv = inverse(g).matrix();
  return out;
}

GammaSequence::GammaSequence(DistributionSpec spec, TruncationScheme scheme, std::int64_t horizon,
                             GammaSequenceOptions opts)
    : GammaSequence(std::move(spec), std::move(scheme), horizon, opts, {}, {}) {}

GammaSequence::GammaSequence(DistributionSpec spec, TruncationScheme scheme, std::int64_t horizon,
                             GammaSequenceOptions opts, std::vector<double> norms, std::vector<Mat> prefix)
    : spec_(std::move(spec)),
      scheme_(std::move(scheme)),
      horizon_(horizon),
      opts_(opts),
      empirical_norms_(std::move(norms)),
      empirical_prefix_(std::move(prefix)) {
  if (horizon_ < 1) throw std::invalid_argument("GammaSequence: horizon must be >= 1");
  if (!(opts_.checkpoint_ratio > 1.0)) throw std::invalid_argument("GammaSequence: checkpoint ratio must be > 1");
  build();
}

GammaSequence GammaSequence::empirical(DistributionSpec spec, TruncationScheme scheme, std::int64_t horizon,
                                       std::span<const Vec> sample, GammaSequenceOptions opts) {
  if (sample.empty()) throw std::invalid_argument("GammaSequence::empirical: empty sample");
  const int d = spec.dim();
  std::vector<std::size_t> order(sample.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<double> norms(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) norms[i] = sample[i].norm();
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return norms[a] < norms[b]; });

  std::vector<double> sorted_norms;
  std::vector<Mat> prefix;
  sorted_norms.reserve(sample.size());
  prefix.reserve(sample.size() + 1);
  Mat acc = Mat::Zero(d, d);
  prefix.push_back(acc);
  for (std::size_t i : order) {
    sorted_norms.push_back(norms[i]);
    acc += sample[i] * sample[i].transpose();
    prefix.push_back(acc);
  }
  return GammaSequence(std::move(spec), std::move(scheme), horizon, opts, std::move(sorted_norms),
                       std::move(prefix));
}

Psd GammaSequence::second_moment_at(std::int64_t k) const {
  const double t = c_level(scheme_, k);
  const double s2 = scale_ * scale_;
  if (!is_empirical()) return Psd(Mat(s2 * truncated_second_moment(spec_, t).matrix()));
  const auto count = static_cast<std::size_t>(
      std::upper_bound(empirical_norms_.begin(), empirical_norms_.end(), t) - empirical_norms_.begin());
  return Psd(Mat(s2 * empirical_prefix_[count] / static_cast<double>(empirical_norms_.size())));
}

GammaSequence GammaSequence::scaled(double lambda) const {
  if (!(lambda > 0.0)) throw std::invalid_argument("GammaSequence::scaled: lambda must be > 0");
  GammaSequence out = *this;
  out.scale_ *= lambda;
  for (auto& e : out.entries_) {
    e.gamma *= lambda;
    e.gamma_inv /= lambda;
    e.lambda_min *= lambda;
    e.lambda_max *= lambda;
    e.sigma2 *= lambda * lambda;
  }
  return out;
}

GammaEntry GammaSequence::make_entry(std::int64_t k) const { return entry_from_second_moment(k, second_moment_at(k)); }

void GammaSequence::build() {
  if (scheme_.n0 == 0) {
    if (is_empirical()) {
      // Smallest index whose plug-in Gamma clears the same threshold.
      TruncationScheme probe = scheme_;
      probe.n0 = 1;
      const TruncationScheme saved = scheme_;
      std::int64_t n = 1;
      for (;; n = n < 1024 ? n + 1 : n + n / 64) {
        scheme_ = probe;
        const auto e = eigen(psd_sqrt(second_moment_at(n)).matrix());
        if (e.lambda_min() >= 0.1) break;
        if (n > (std::int64_t{1} << 50)) throw NearSingular("GammaSequence: no invertible Gamma_n found");
      }
      scheme_ = saved;
      scheme_.n0 = n;
    } else {
      scheme_.n0 = default_n0(spec_, scheme_);
    }
  }

  entries_.clear();
  const std::int64_t dense_end = opts_.dense ? horizon_ : std::min(horizon_, opts_.dense_limit);
  for (std::int64_t k = 1; k <= dense_end; ++k) entries_.push_back(make_entry(k));
  std::int64_t k = dense_end;
  while (k < horizon_) {
    const auto next = static_cast<std::int64_t>(std::ceil(static_cast<double>(k) * opts_.checkpoint_ratio));
    k = std::min(std::max(next, k + 1), horizon_);
    entries_.push_back(make_entry(k));
  }
}

const GammaEntry& GammaSequence::entry(std::int64_t k) const {
  if (k < 1 || k > horizon_) throw std::out_of_range("GammaSequence::entry: index outside 1..horizon");
  auto it = std::upper_bound(entries_.begin(), entries_.end(), k,
                             [](std::int64_t v, const GammaEntry& e) { return v < e.k_begin; });
  return *(it - 1);
}

std::int64_t default_n0(const DistributionSpec& spec, const TruncationScheme& scheme) {
  TruncationScheme s = scheme;
  s.n0 = 1;
  auto ok = [&](std::int64_t n) {
    const double m = spec.second_moment_within(c_level(s, n)) / spec.dim();
    return std::sqrt(std::max(m, 0.0)) >= 0.1;
  };
  const std::int64_t cap = scheme.family == SchemeFamily::table ? static_cast<std::int64_t>(scheme.table.size())
                                                                : (std::int64_t{1} << 60);
  // Levels need not be monotone for small n: scan a window for the last
  // failure, then bracket and bisect where c_n is increasing.
  constexpr std::int64_t kScan = std::int64_t{1} << 16;
  const std::int64_t window = std::min(cap, kScan);
  std::int64_t last_fail = 0;
  for (std::int64_t n = 1; n <= window; ++n)
    if (!ok(n)) last_fail = n;
  if (last_fail < window) return last_fail + 1;
  if (window == cap) throw NearSingular("default_n0: Gamma_n never clears the invertibility threshold");
  std::int64_t lo = window, hi = 2 * window;
  while (!ok(std::min(hi, cap))) {
    if (hi >= cap) throw NearSingular("default_n0: Gamma_n never clears the invertibility threshold");
    lo = hi;
    hi *= 2;
  }
  hi = std::min(hi, cap);
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

GammaAt gamma_at(const GammaSequence& gs, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("gamma_at: n must be >= 1");
  const GammaEntry e = n <= gs.horizon() ? gs.entry(n) : entry_from_second_moment(n, gs.second_moment_at(n));
  return {Psd(e.gamma), Psd(e.gamma_inv), e.lambda_min, e.lambda_max};
}

double feller_Bn(const DistributionSpec& spec, const TruncationScheme& scheme, std::int64_t n) {
  if (spec.dim() != 1) throw std::invalid_argument("feller_Bn: defined for d = 1 only");
  if (n < 0) throw std::invalid_argument("feller_Bn: n must be >= 0");
  double sum = 0.0, comp = 0.0;
  for (std::int64_t j = 1; j <= n; ++j) {
    const double y = spec.second_moment_within(c_level(scheme, j)) - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

// --- tail conditions ------------------------------------------------------------

TailConditionReport validate_tail_condition(const DistributionSpec& spec, TailCondition which,
                                            std::span<const double> t_grid) {
  TailConditionReport rep;
  rep.profile = tail_profile(spec, t_grid);
  rep.analytic = true;
  switch (spec.family()) {
    case Family::gaussian_iso:
    case Family::rademacher_product:
    case Family::uniform_cube:
      rep.limit = 0.0;  // light tails: tau(t) LL(t) -> 0
      break;
    case Family::atom_ladder:
      rep.limit = spec.c();  // tau(t_k) LL(t_k) = c along the ladder
      break;
    case Family::atom_ladder_fat:
      rep.limit = std::numeric_limits<double>::infinity();  // grows like sqrt(LLt)
      break;
  }
  const bool ok = which == TailCondition::vanishing ? rep.limit == 0.0 : std::isfinite(rep.limit);
  rep.verdict = ok ? Verdict::pass : Verdict::fail;
  return rep;
}

SplitLabel triple_split(const Vec& x, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("triple_split: n must be >= 1");
  const double m = static_cast<double>(n);
  const double ll = LL(m);
  const double r = x.norm();
  if (r <= std::sqrt(m) / std::pow(ll, 5)) return SplitLabel::prime;
  if (r <= std::sqrt(m * ll)) return SplitLabel::double_prime;
  return SplitLabel::triple_prime;
}

}  // namespace delab
