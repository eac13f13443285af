// Adaptive Gauss-Kronrod (7/15) quadrature.
#pragma once

#include <functional>
#include <span>
#include <stdexcept>

namespace delab {

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
};

struct QuadratureOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  int max_depth = 60;
  int max_intervals = 4000;
  bool throw_on_failure = true;
};

/// Integral of f over [a, b] by globally adaptive Gauss-Kronrod (7, 15):
/// the piece with the largest error estimate is bisected until the summed
/// estimate meets max(abs_tol, rel_tol * |integral|). Throws QuadratureError
/// if that fails within max_intervals pieces (unless disabled).
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opts = {});

/// Same, split at the given interior breakpoints (kinks of f).
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           std::span<const double> breakpoints, const QuadratureOptions& opts = {});

/// Integral over [a, inf) through x = a + s / (1 - s).
QuadratureResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                       const QuadratureOptions& opts = {});

}  // namespace delab
