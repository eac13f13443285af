#include "delab/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace delab {
namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
  double value;
  double error;
};

Piece kronrod15(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kWgk[j] * pair;
    if (j % 2 == 1) gauss += kWg[j / 2] * pair;
  }
  return {kronrod * half, std::abs((kronrod - gauss) * half)};
}

struct Interval {
  double a, b;
  Piece piece;
  int depth;
  bool operator<(const Interval& o) const { return piece.error < o.piece.error; }
};

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opts) {
  return integrate(f, a, b, {}, opts);
}

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           std::span<const double> breakpoints, const QuadratureOptions& opts) {
  if (a == b) return {};
  if (b < a) {
    auto r = integrate(f, b, a, breakpoints, opts);
    r.value = -r.value;
    return r;
  }
  std::vector<double> cuts{a};
  for (double x : breakpoints)
    if (x > a && x < b) cuts.push_back(x);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<Interval> heap;
  std::vector<Interval> frozen;
  int evaluations = 0;
  double value = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const Interval iv{cuts[i], cuts[i + 1], kronrod15(f, cuts[i], cuts[i + 1]), 0};
    evaluations += 15;
    value += iv.piece.value;
    error += iv.piece.error;
    heap.push(iv);
  }
  auto target = [&] { return std::max(opts.abs_tol, opts.rel_tol * std::abs(value)); };

  while (!heap.empty() && error > target() && static_cast<int>(heap.size()) < opts.max_intervals) {
    const Interval worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (worst.depth >= opts.max_depth || !(mid > worst.a && mid < worst.b)) {
      frozen.push_back(worst);
      continue;
    }
    const Interval left{worst.a, mid, kronrod15(f, worst.a, mid), worst.depth + 1};
    const Interval right{mid, worst.b, kronrod15(f, mid, worst.b), worst.depth + 1};
    evaluations += 30;
    value += left.piece.value + right.piece.value - worst.piece.value;
    error += left.piece.error + right.piece.error - worst.piece.error;
    heap.push(left);
    heap.push(right);
  }

  // Re-sum to shed drift from the running updates.
  value = 0.0;
  error = 0.0;
  for (; !heap.empty(); heap.pop()) frozen.push_back(heap.top());
  std::sort(frozen.begin(), frozen.end(), [](const Interval& x, const Interval& y) { return x.a < y.a; });
  for (const auto& iv : frozen) {
    value += iv.piece.value;
    error += iv.piece.error;
  }
  if (error > target() && opts.throw_on_failure)
    throw QuadratureError("integrate: tolerance not reached on [" + std::to_string(a) + ", " +
                          std::to_string(b) + "]");
  return {value, error, evaluations};
}

QuadratureResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                       const QuadratureOptions& opts) {
  auto g = [&](double s) {
    if (s >= 1.0) return 0.0;
    const double one_minus = 1.0 - s;
    const double v = f(a + s / one_minus);
    return v == 0.0 ? 0.0 : v / (one_minus * one_minus);
  };
  return integrate(g, 0.0, 1.0, opts);
}

}  // namespace delab
