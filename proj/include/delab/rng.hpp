// Random streams. One engine per replication; child streams are derived
// from (master_seed, index) by SplitMix64 so they never depend on
// scheduling.
#pragma once

#include <boost/random/normal_distribution.hpp>

#include <cstdint>
#include <random>

namespace delab {

using Stream = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of replication `index` under `master_seed`.
constexpr std::uint64_t child_seed(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Stream& s) { return static_cast<double>(s() >> 11) * 0x1.0p-53; }

/// Standard normal sampler (ziggurat).
class NormalSampler {
 public:
  double operator()(Stream& s) { return dist_(s); }

 private:
  boost::random::normal_distribution<double> dist_;
};

}  // namespace delab
