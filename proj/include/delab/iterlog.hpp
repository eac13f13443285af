// Iterated logarithms and the scalar normalizing sequences of the
// Darling-Erdos statistics.
#pragma once

namespace delab {

/// L(t) = log(max(t, e)), applied `depth` times (depth in 1..4).
/// Throws std::invalid_argument for t < 0 or a depth outside 1..4.
double iterlog(double t, int depth);

inline double L(double t) { return iterlog(t, 1); }
inline double LL(double t) { return iterlog(t, 2); }
inline double LLL(double t) { return iterlog(t, 3); }
inline double LLLL(double t) { return iterlog(t, 4); }

/// Scale a_n and centering b_{d,n} for a_n * max - b_{d,n}.
struct NormalizerSet {
  double n = 1.0;
  int d = 1;
  double a_n = 0.0;   // sqrt(2 LLn)
  double b_dn = 0.0;  // 2 LLn + d LLLn / 2 - log Gamma(d/2)
};

/// `n` is real so the normalizers can be evaluated between integers.
NormalizerSet normalizers(double n, int d);

/// Pieces of the sup-type statistic
///   2 LLn (sup - 1) - 3/2 LLLn + LLLLn + log(3 / sqrt 8),
/// split as value = scale * (sup - 1) - center.
struct KlsNormalizer {
  double scale = 0.0;   // 2 LLn
  double center = 0.0;  // 3/2 LLLn - LLLLn - log(3 / sqrt 8)

  double apply(double sup) const { return scale * (sup - 1.0) - center; }
};

KlsNormalizer kls_normalizer(double n);

/// log(3 / sqrt 8)
double kls_constant();

}  // namespace delab
