#include "delab/statistics.hpp"

#include "delab/iterlog.hpp"

#include <cmath>
#include <stdexcept>

namespace delab {

std::string to_string(StatMode m) {
  switch (m) {
    case StatMode::self_normalized: return "self_normalized";
    case StatMode::classical: return "classical";
    case StatMode::feller: return "feller";
    case StatMode::kls: return "kls";
  }
  return "?";
}

StatMode stat_mode_from_string(const std::string& s) {
  for (auto m : {StatMode::self_normalized, StatMode::classical, StatMode::feller, StatMode::kls})
    if (to_string(m) == s) return m;
  throw std::invalid_argument("unknown statistic mode '" + s + "'");
}

namespace {

StatRecord base_record(const Trajectory& traj, const GammaSequence* gs, StatMode mode, std::int64_t n) {
  StatRecord r;
  r.mode = mode;
  r.n = n;
  r.seed = traj.seed();
  r.d = traj.dim();
  r.spec_id = traj.spec_id();
  r.scheme_id = gs ? gs->scheme().id() : "none";
  return r;
}

}  // namespace

StatRecord de_statistic(const Trajectory& traj, const GammaSequence& gs, StatMode mode, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("de_statistic: n must be >= 1");
  if (mode == StatMode::kls) throw std::invalid_argument("de_statistic: use kls_statistic for kls mode");
  if (gs.horizon() < n) throw std::invalid_argument("de_statistic: Gamma cache shorter than n");
  if (gs.dim() != traj.dim()) throw DimensionMismatch("de_statistic: dimension mismatch");
  if (mode == StatMode::feller && traj.dim() != 1) throw std::invalid_argument("de_statistic: feller needs d = 1");

  GammaSequence::Cursor cursor(gs);
  double best = -1.0;  // max of R_k^2
  std::int64_t argmax = 0;
  double b_k = 0.0;
  Vec y(traj.dim());

  switch (mode) {
    case StatMode::self_normalized:
      traj.walk(n, [&](std::int64_t k, const Vec& s) {
        y.noalias() = cursor.at(k).gamma_inv * s;
        const double r2 = y.squaredNorm() / static_cast<double>(k);
        if (r2 > best) best = r2, argmax = k;
      });
      break;
    case StatMode::classical:
      traj.walk(n, [&](std::int64_t k, const Vec& s) {
        const double r2 = s.squaredNorm() / static_cast<double>(k);
        if (r2 > best) best = r2, argmax = k;
      });
      break;
    case StatMode::feller:
      traj.walk(n, [&](std::int64_t k, const Vec& s) {
        b_k += cursor.at(k).sigma2;
        const double r2 = s.squaredNorm() / b_k;
        if (r2 > best) best = r2, argmax = k;
      });
      break;
    case StatMode::kls: break;
  }

  const auto norm = normalizers(static_cast<double>(n), traj.dim());
  StatRecord r = base_record(traj, &gs, mode, n);
  r.value = norm.a_n * std::sqrt(best) - norm.b_dn;
  r.argmax_k = argmax;
  return r;
}

StatRecord kls_statistic(const Trajectory& traj, const GammaSequence* gs, std::int64_t n,
                         std::int64_t horizon_cap) {
  if (n < 1) throw std::invalid_argument("kls_statistic: n must be >= 1");
  if (horizon_cap < n) throw std::invalid_argument("kls_statistic: horizon_cap must be >= n");
  if (traj.dim() != 1) throw std::invalid_argument("kls_statistic: d must be 1");
  if (gs && gs->horizon() < horizon_cap) throw std::invalid_argument("kls_statistic: Gamma cache shorter than cap");

  std::optional<GammaSequence::Cursor> cursor;
  if (gs) cursor.emplace(*gs);
  double best = -1.0;  // max of ratio^2
  std::int64_t argmax = 0;
  traj.walk(horizon_cap, [&](std::int64_t k, const Vec& s) {
    const double sigma2 = cursor ? cursor->at(k).sigma2 : 1.0;
    if (k < n) return;
    const double kd = static_cast<double>(k);
    const double r2 = s.squaredNorm() / (2.0 * kd * LL(kd) * sigma2);
    if (r2 > best) best = r2, argmax = k;
  });

  StatRecord r = base_record(traj, gs, StatMode::kls, n);
  r.value = kls_normalizer(static_cast<double>(n)).apply(std::sqrt(best));
  r.argmax_k = argmax;
  r.horizon_cap = horizon_cap;
  return r;
}

CrossingCount lil_crossings(const Trajectory& traj, const GammaSequence* gs, const PhiFamily& phi,
                            std::int64_t n_lo, std::int64_t n_hi) {
  if (n_lo < 3) throw std::invalid_argument("lil_crossings: n_lo must be >= 3");
  if (n_hi < n_lo) throw std::invalid_argument("lil_crossings: empty range");
  if (gs && gs->horizon() < n_hi) throw std::invalid_argument("lil_crossings: Gamma cache shorter than range");
  if (gs && gs->dim() != traj.dim()) throw DimensionMismatch("lil_crossings: dimension mismatch");

  std::optional<GammaSequence::Cursor> cursor;
  if (gs) cursor.emplace(*gs);
  CrossingCount out;
  Vec y(traj.dim());
  traj.walk(n_hi, [&](std::int64_t k, const Vec& s) {
    const GammaEntry* e = cursor ? &cursor->at(k) : nullptr;
    if (k < n_lo) return;
    const double kd = static_cast<double>(k);
    const double boundary2 = kd * phi.radicand_checked(kd);
    if (e) {
      y.noalias() = e->gamma_inv * s;
    } else {
      y = s;
    }
    if (y.squaredNorm() > boundary2) {
      ++out.count;
      out.last = k;
    }
  });
  return out;
}

}  // namespace delab
