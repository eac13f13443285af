// Truncation levels c_n and the normalizing matrices Gamma_n = A(c_n).
#pragma once

#include "delab/models.hpp"
#include "delab/sym_psd.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace delab {

enum class SchemeFamily { sqrt_n, sqrt_n_invLL5, sqrt_n_polylog, table };

std::string to_string(SchemeFamily f);
SchemeFamily scheme_family_from_string(const std::string& s);

struct TruncationScheme {
  SchemeFamily family = SchemeFamily::sqrt_n;
  double q = 0.0;             // exponent of sqrt_n_polylog: c_n = sqrt(n) (LLn)^q
  std::vector<double> table;  // c_1, c_2, ... for the table family
  std::int64_t n0 = 0;        // c_n is evaluated at max(n, n0); 0 means "resolve automatically"

  static TruncationScheme sqrt_n() { return {}; }
  static TruncationScheme sqrt_n_invLL5() {
    TruncationScheme s;
    s.family = SchemeFamily::sqrt_n_invLL5;
    return s;
  }
  static TruncationScheme sqrt_n_polylog(double q) {
    TruncationScheme s;
    s.family = SchemeFamily::sqrt_n_polylog;
    s.q = q;
    return s;
  }
  static TruncationScheme from_table(std::vector<double> values);

  std::string id() const;
};

/// Thrown when a table scheme is asked for an index past its end.
struct TableExhausted : std::out_of_range {
  using std::out_of_range::out_of_range;
};

/// c_{max(n, n0)}.
double c_level(const TruncationScheme& scheme, std::int64_t n);

enum class Verdict { pass, fail, inconclusive };
std::string to_string(Verdict v);

struct Condition3Report {
  std::vector<std::int64_t> n;
  std::vector<double> eps_hat;  // log(max(|log(c_n / sqrt n)|, 1)) / log log n
  double tail_slope = 0.0;      // least-squares slope of eps_hat against log n on the grid tail
  Verdict verdict = Verdict::inconclusive;
  bool analytic = false;        // verdict decided in closed form (built-in families)
};

/// Diagnostic for exp(-(log n)^eps_n) <= c_n / sqrt n <= exp((log n)^eps_n)
/// with eps_n -> 0. Grid must be ascending with min >= 16.
Condition3Report validate_condition3(const TruncationScheme& scheme, std::span<const std::int64_t> n_grid);

struct GammaEntry {
  std::int64_t k_begin = 1;  // first index this entry covers
  Mat gamma;
  Mat gamma_inv;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double sigma2 = 0.0;       // trace(Gamma^2) / d, the truncated variance for d = 1
};

struct GammaSequenceOptions {
  bool dense = false;          // exact value at every k up to the horizon
  std::int64_t dense_limit = 10000;
  double checkpoint_ratio = 1.001;
};

/// Population normalizers Gamma_k, k = 1..horizon, cached once and shared
/// read-only. Exact up to dense_limit, then held piecewise constant between
/// geometric checkpoints.
class GammaSequence {
 public:
  GammaSequence(DistributionSpec spec, TruncationScheme scheme, std::int64_t horizon,
                GammaSequenceOptions opts = {});

  /// Plug-in diagnostic: A(t)^2 estimated from a sample instead of the law.
  static GammaSequence empirical(DistributionSpec spec, TruncationScheme scheme, std::int64_t horizon,
                                 std::span<const Vec> sample, GammaSequenceOptions opts = {});

  const DistributionSpec& spec() const { return spec_; }
  const TruncationScheme& scheme() const { return scheme_; }
  std::int64_t horizon() const { return horizon_; }
  std::int64_t n0() const { return scheme_.n0; }
  bool is_empirical() const { return !empirical_norms_.empty(); }
  int dim() const { return spec_.dim(); }

  /// Copy with every Gamma_k multiplied by lambda > 0.
  GammaSequence scaled(double lambda) const;
  double scale() const { return scale_; }

  const std::vector<GammaEntry>& entries() const { return entries_; }
  /// Entry covering k (1 <= k <= horizon).
  const GammaEntry& entry(std::int64_t k) const;
  /// A(c_k)^2 from the law (or the sample in empirical mode).
  Psd second_moment_at(std::int64_t k) const;

  /// Forward-only lookup for streaming passes over k = 1, 2, ...
  class Cursor {
   public:
    explicit Cursor(const GammaSequence& gs) : entries_(&gs.entries_) {}
    const GammaEntry& at(std::int64_t k) {
      while (idx_ + 1 < entries_->size() && (*entries_)[idx_ + 1].k_begin <= k) ++idx_;
      return (*entries_)[idx_];
    }

   private:
    const std::vector<GammaEntry>* entries_;
    std::size_t idx_ = 0;
  };

 private:
  GammaSequence(DistributionSpec spec, TruncationScheme scheme, std::int64_t horizon,
                GammaSequenceOptions opts, std::vector<double> norms, std::vector<Mat> prefix);
  void build();
  GammaEntry make_entry(std::int64_t k) const;

  DistributionSpec spec_;
  TruncationScheme scheme_;
  std::int64_t horizon_;
  GammaSequenceOptions opts_;
  std::vector<GammaEntry> entries_;
  double scale_ = 1.0;
  // Empirical mode: sample norms ascending and prefix sums of x x^T.
  std::vector<double> empirical_norms_;
  std::vector<Mat> empirical_prefix_;
};

/// Smallest n0 with lambda_min(Gamma_m) >= 0.1 for every m >= n0, under the
/// unshifted levels.
std::int64_t default_n0(const DistributionSpec& spec, const TruncationScheme& scheme);

struct GammaAt {
  Psd gamma;
  Psd gamma_inv;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

/// Gamma_n, its inverse and extreme eigenvalues. Served from the cache when
/// n lies within the horizon, computed directly otherwise. Throws
/// NearSingular when Gamma_n cannot be inverted (n0 misconfigured).
GammaAt gamma_at(const GammaSequence& gs, std::int64_t n);

/// B_n = sum_{j=1}^n sigma_j^2, sigma_j^2 = E X^2 1{|X| <= c_j}; d = 1 only.
double feller_Bn(const DistributionSpec& spec, const TruncationScheme& scheme, std::int64_t n);

enum class TailCondition { vanishing, bounded };

struct TailConditionReport {
  Verdict verdict = Verdict::inconclusive;
  bool analytic = false;
  double limit = 0.0;  // lim tau(t) LL(t) when finite, +inf otherwise
  std::vector<TailProfile> profile;
};

/// vanishing: tau(t) LL(t) -> 0. bounded: tau(t) LL(t) bounded.
TailConditionReport validate_tail_condition(const DistributionSpec& spec, TailCondition which,
                                            std::span<const double> t_grid);

enum class SplitLabel { prime, double_prime, triple_prime };
std::string to_string(SplitLabel l);

/// prime: |x| <= sqrt(n)/(LLn)^5; double_prime: up to sqrt(n LLn) inclusive;
/// triple_prime: beyond.
SplitLabel triple_split(const Vec& x, std::int64_t n);

}  // namespace delab
