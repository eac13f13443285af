// Closed-form limit laws, Gaussian tail inequalities and the
// Kolmogorov-Erdos-Petrowski integral test for the family
//   phi(t) = sqrt(2 LLt + a LLLt + b LLLLt).
#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace delab {

/// Gumbel law with CDF exp(-exp(-(y - shift))).
struct GumbelLaw {
  double shift = 0.0;
};

double gumbel_cdf(const GumbelLaw& law, double y);
/// Inverse of gumbel_cdf on (0, 1).
double gumbel_quantile(const GumbelLaw& law, double p);

struct PhiFamily {
  double a = 0.0;
  double b = 0.0;
  int d = 1;

  /// phi(t)^2 = 2 LLt + a LLLt + b LLLLt (may be negative).
  double radicand(double t) const;
  /// Same, but throws std::domain_error when negative.
  double radicand_checked(double t) const;
  double operator()(double t) const;
};

/// P{|N(0, I_d)| >= t} = Q(d/2, t^2/2).
double chi_norm_tail(int d, double t);

struct Envelope {
  double c1_hat = 0.0;  // min of the ratio over the grid
  double c2_hat = 0.0;  // max of the ratio over the grid
  std::vector<double> t;
  std::vector<double> ratio;  // chi_norm_tail(d, t) / (t^{d-2} exp(-t^2/2))
};

/// Empirical constants of C1 t^{d-2} e^{-t^2/2} <= P{|N| >= t} <= C2 t^{d-2} e^{-t^2/2}
/// on a grid inside [2d, 12].
Envelope chi_tail_envelope(int d, std::span<const double> t_grid);

struct TailBound {
  double bound_a = 1.0;       // exp(-x^2 / (8 sigma^2_max)), valid for x >= 2 E|Y|^2
  bool a_applicable = false;
  double bound_b = 2.0;       // 2 exp(-x^2 / (8 E|Y|^2)), valid for all x >= 0
};

/// Bounds on P{|Y| >= x} for centered Gaussian Y with E|Y|^2 = trace and
/// largest covariance eigenvalue sigma2_max.
TailBound gaussian_norm_tail_bound(double x, double trace, double sigma2_max);

/// h(z) / h1(z), where h is the density of eta_1^2 + sigma^2 eta_2^2 and h1
/// the chi-square(1) density. Evaluated as the convolution integral after
/// y = z sin^2(theta), which removes both endpoint singularities.
double mixture_density_ratio(double sigma, double z);

struct DensityRatioReport {
  double max_ratio = 0.0;
  double argmax_z = 0.0;
  double bound = 0.0;  // 2 / sqrt(1 - sigma^2)
  bool holds = false;  // max_ratio <= bound
};

DensityRatioReport density_ratio_scan(double sigma, std::span<const double> z_grid);

/// P{eta_1^2 + sigma^2 eta_2^2 >= t^2} by quadrature of the convolution density.
double mixture_tail(double sigma, double t);

enum class Convergence { convergent, divergent };
std::string to_string(Convergence c);

/// n^{-1} phi(n)^d exp(-phi(n)^2 / 2).
double integral_test_term(const PhiFamily& phi, double n);

/// Closed-form verdict for I_d(phi): convergent iff a > d + 2, or a = d + 2
/// and b > 2.
Convergence integral_test_classify(const PhiFamily& phi);

struct PartialSumReport {
  std::vector<double> checkpoints;   // n = 10, 100, ..., n_max
  std::vector<double> partial_sums;  // sum_{k <= n} of the term
  // Continuation past n_max along the exact substitution n = exp(exp(exp(w))),
  // w = LLLn, over decade blocks of w: log of each block's contribution.
  std::vector<double> block_w_end;
  std::vector<double> block_log_increment;
  double growth_exponent = 0.0;  // log10 of the ratio of the last two block increments
  double last_increment = 0.0;
  Convergence verdict = Convergence::divergent;
};

/// Numerical oracle for the integral test: direct summation to 1e6, then
/// Euler-Maclaurin over doubling blocks up to n_max (<= 1e9), then the
/// integral comparison continued in w = LLLn out to w ~ 3e15. The series
/// diverges iff block contributions stop shrinking (growth_exponent > -0.05).
PartialSumReport integral_test_partial_sums(const PhiFamily& phi, double n_max);

/// sum_{k = lo}^{hi} term(k), by direct summation.
double integral_test_direct_sum(const PhiFamily& phi, std::int64_t lo, std::int64_t hi);
/// Euler-Maclaurin estimate of the same sum over doubling blocks.
double integral_test_block_sum(const PhiFamily& phi, double lo, double hi);
/// Exact integral of the term over [n_lo, n_hi] via the w = LLLn substitution.
double integral_test_integral(const PhiFamily& phi, double n_lo, double n_hi);

}  // namespace delab
