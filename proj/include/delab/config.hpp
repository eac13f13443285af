// Experiment configuration: INI-style "key = value" sections addressed by
// dotted paths ("spec.family", "experiment.n"). Every key is checked
// against a fixed schema; see README.md for the full list.
#pragma once

#include "delab/models.hpp"
#include "delab/statistics.hpp"
#include "delab/truncation.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace delab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ValueKind { integer, real, text, real_list };

struct SchemaEntry {
  ValueKind kind;
  std::string default_value;
};

/// Known keys with their kinds and defaults.
const std::map<std::string, SchemaEntry>& config_schema();

class Config {
 public:
  Config() = default;
  static Config load(const std::string& path);
  static Config parse(const std::string& text);

  /// Override one key; rejects unknown keys and malformed values.
  void set(const std::string& dotted_key, const std::string& value);
  /// Apply "key=value".
  void apply_override(const std::string& assignment);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string text(const std::string& key) const;
  double real(const std::string& key) const;
  std::int64_t integer(const std::string& key) const;
  std::vector<double> real_list(const std::string& key) const;

  const std::map<std::string, std::string>& explicit_values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

struct SpecParams {
  Family family = Family::gaussian_iso;
  int d = 1;
  double c = 0.5;
  int k0 = 2;
  DirectionMode direction = DirectionMode::isotropic;

  DistributionSpec build() const;
};

struct ExperimentConfig {
  std::string id = "experiment";
  SpecParams spec;
  TruncationScheme scheme;  // n0 == 0 resolves automatically
  StatMode mode = StatMode::classical;
  std::int64_t n = 1000;
  std::int64_t replications = 100;
  std::uint64_t master_seed = 1;
  std::string output_dir = "out";
  std::optional<Family> reference;  // two-sample reference family, same d
  std::int64_t kls_cap = 0;         // 0 means 50 n

  std::int64_t effective_kls_cap() const { return kls_cap > 0 ? kls_cap : 50 * n; }
};

/// Builds and validates an ExperimentConfig; throws ConfigError.
ExperimentConfig experiment_config(const Config& cfg);

}  // namespace delab
