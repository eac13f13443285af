// Special functions used by the analytic moment and tail routines.
#pragma once

namespace delab {

/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), computed
/// without cancellation in the upper tail.
double gamma_q(double a, double x);

double normal_pdf(double x);
double normal_cdf(double x);
/// 1 - Phi(x) without cancellation.
double normal_sf(double x);

}  // namespace delab
