#pragma once

#include "delab/config.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace delab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

struct Invocation {
  Config config;
  int threads = 1;
  // replay only
  std::optional<std::string> csv_path;
  std::int64_t index = 0;
  bool all_rows = false;
};

int simulate(const Invocation& inv);
int shift_experiment(const Invocation& inv);
int tightness_probe(const Invocation& inv);
int integral_test(const Invocation& inv);
int tail_bounds(const Invocation& inv);
int validate(const Invocation& inv);
int replay(const Invocation& inv);

}  // namespace delab::cli
