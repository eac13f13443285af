// Streaming statistics of one random-walk trajectory.
#pragma once

#include "delab/limits.hpp"
#include "delab/models.hpp"
#include "delab/rng.hpp"
#include "delab/truncation.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace delab {

enum class StatMode { self_normalized, classical, feller, kls };

std::string to_string(StatMode m);
StatMode stat_mode_from_string(const std::string& s);

struct StatRecord {
  StatMode mode = StatMode::classical;
  double value = 0.0;
  std::int64_t n = 0;
  std::int64_t argmax_k = 0;
  std::uint64_t seed = 0;
  int d = 1;
  std::string spec_id;
  std::string scheme_id;
  std::int64_t horizon_cap = 0;  // kls only: the sup runs over [n, horizon_cap]
};

/// Partial sums S_k = X_1 + ... + X_k of one replication. A sampled
/// trajectory regenerates its increments from the seed on every walk, so
/// the same seed always replays the same path. Sums are accumulated with
/// Neumaier compensation per coordinate.
class Trajectory {
 public:
  static Trajectory sampled(DistributionSpec spec, std::uint64_t seed) {
    return Trajectory(std::move(spec), seed, {});
  }
  /// Deterministic trajectory from explicit increments (length = horizon).
  static Trajectory fixed(std::vector<Vec> increments) {
    if (increments.empty()) throw std::invalid_argument("Trajectory::fixed: no increments");
    const int d = static_cast<int>(increments.front().size());
    return Trajectory(std::nullopt, 0, std::move(increments), d);
  }

  int dim() const { return d_; }
  std::uint64_t seed() const { return seed_; }
  std::string spec_id() const { return spec_ ? spec_->id() : "fixed"; }
  /// Longest walk available; unbounded for sampled trajectories.
  std::int64_t max_length() const {
    return spec_ ? INT64_MAX : static_cast<std::int64_t>(increments_.size());
  }

  /// visit(k, S_k) for k = 1..upto. Returning false from visit stops early.
  template <class Visitor>
  void walk(std::int64_t upto, Visitor&& visit) const {
    if (upto > max_length()) throw std::out_of_range("Trajectory::walk: beyond the fixed increments");
    Vec sum = Vec::Zero(d_), comp = Vec::Zero(d_), s = Vec::Zero(d_), x(d_);
    std::optional<Sampler> sampler;
    Stream stream(seed_);
    if (spec_) sampler.emplace(*spec_);
    for (std::int64_t k = 1; k <= upto; ++k) {
      if (sampler)
        sampler->draw(stream, x);
      else
        x = increments_[static_cast<std::size_t>(k - 1)];
      for (int i = 0; i < d_; ++i) {
        const double t = sum(i) + x(i);
        comp(i) += std::abs(sum(i)) >= std::abs(x(i)) ? (sum(i) - t) + x(i) : (x(i) - t) + sum(i);
        sum(i) = t;
        s(i) = t + comp(i);
      }
      if constexpr (std::is_same_v<decltype(visit(k, s)), bool>) {
        if (!visit(k, s)) return;
      } else {
        visit(k, s);
      }
    }
  }

 private:
  Trajectory(std::optional<DistributionSpec> spec, std::uint64_t seed, std::vector<Vec> inc, int d = 0)
      : spec_(std::move(spec)), seed_(seed), increments_(std::move(inc)), d_(spec_ ? spec_->dim() : d) {}

  std::optional<DistributionSpec> spec_;
  std::uint64_t seed_;
  std::vector<Vec> increments_;
  int d_;
};

/// a_n max_{1<=k<=n} R_k - b_{d,n} with
///   self_normalized: R_k = |Gamma_k^{-1} S_k| / sqrt(k)
///   classical:       R_k = |S_k| / sqrt(k)
///   feller:          R_k = |S_k| / sqrt(B_k)   (d = 1)
/// One pass, O(d) memory. Ties in the max go to the smallest k. Requires
/// gs.horizon() >= n.
StatRecord de_statistic(const Trajectory& traj, const GammaSequence& gs, StatMode mode, std::int64_t n);

/// 2LLn (max_{n<=k<=cap} |S_k| / (sqrt(2k LLk) sigma_k) - 1)
///   - 3/2 LLLn + LLLLn + log(3/sqrt 8),     d = 1.
/// sigma_k comes from gs; pass no sequence for sigma_k = 1. The finite cap
/// stands in for the sup over all k >= n.
StatRecord kls_statistic(const Trajectory& traj, const GammaSequence* gs, std::int64_t n,
                         std::int64_t horizon_cap);

struct CrossingCount {
  std::int64_t count = 0;
  std::int64_t last = 0;  // last crossing index, 0 when none
};

/// Number of k in [n_lo, n_hi] with |Gamma_k^{-1} S_k| > sqrt(k) phi(k).
/// Pass no sequence to use Gamma_k = I.
CrossingCount lil_crossings(const Trajectory& traj, const GammaSequence* gs, const PhiFamily& phi,
                            std::int64_t n_lo, std::int64_t n_hi);

}  // namespace delab
