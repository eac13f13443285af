#include "delab/iterlog.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace delab {

double iterlog(double t, int depth) {
  if (!(t >= 0.0)) throw std::invalid_argument("iterlog: t must be >= 0");
  if (depth < 1 || depth > 4) throw std::invalid_argument("iterlog: depth must be in 1..4");
  double v = t;
  for (int i = 0; i < depth; ++i) v = std::log(std::max(v, std::numbers::e));
  return v;
}

NormalizerSet normalizers(double n, int d) {
  if (!(n >= 1.0)) throw std::invalid_argument("normalizers: n must be >= 1");
  if (d < 1) throw std::invalid_argument("normalizers: d must be >= 1");
  const double ll = LL(n);
  NormalizerSet out;
  out.n = n;
  out.d = d;
  out.a_n = std::sqrt(2.0 * ll);
  out.b_dn = 2.0 * ll + 0.5 * d * LLL(n) - std::lgamma(0.5 * d);
  return out;
}

double kls_constant() { return std::log(3.0 / std::sqrt(8.0)); }

KlsNormalizer kls_normalizer(double n) {
  if (!(n >= 1.0)) throw std::invalid_argument("kls_normalizer: n must be >= 1");
  return {2.0 * LL(n), 1.5 * LLL(n) - LLLL(n) - kls_constant()};
}

}  // namespace delab
