// Reproducible Monte Carlo runs, empirical CDFs and Kolmogorov-Smirnov
// distances.
#pragma once

#include "delab/config.hpp"
#include "delab/limits.hpp"
#include "delab/statistics.hpp"
#include "delab/truncation.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace delab {

/// Right-continuous empirical distribution function of a sample.
class Ecdf {
 public:
  explicit Ecdf(std::vector<double> sample);
  static Ecdf of(std::span<const StatRecord> records);

  std::size_t size() const { return sorted_.size(); }
  const std::vector<double>& sorted() const { return sorted_; }
  /// Fraction of the sample <= x.
  double operator()(double x) const;
  /// Smallest sample value v with ECDF(v) >= p, p in (0, 1].
  double quantile(double p) const;

 private:
  std::vector<double> sorted_;
};

/// sup_x |ECDF(x) - F(x)| for the Gumbel law, checked on both sides of each jump.
double ks_one_sample(const Ecdf& e, const GumbelLaw& law);
/// sup_x |ECDF1(x) - ECDF2(x)| over the merged support.
double ks_two_sample(const Ecdf& a, const Ecdf& b);

/// Normalizer cache sized for the configuration's horizon.
GammaSequence gamma_sequence_for(const ExperimentConfig& cfg);

/// One replication, using stream child(master_seed, index).
StatRecord run_replication(const ExperimentConfig& cfg, const GammaSequence& gs, std::int64_t index);

/// All R replications. Results are ordered by replication index and do not
/// depend on `threads`.
std::vector<StatRecord> run_experiment(const ExperimentConfig& cfg, int threads = 1);
std::vector<StatRecord> run_experiment(const ExperimentConfig& cfg, const GammaSequence& gs, int threads);

/// Same experiment with the increment law swapped for `family` (same d) and
/// an independent master seed.
ExperimentConfig reference_config(const ExperimentConfig& cfg, Family family);

/// (1 - sigma_n) b_{d,n}, with sigma_n the common eigenvalue of Gamma_n
/// taken from the law (isotropic families).
double shift_driver(const GammaSequence& gs, std::int64_t n);

/// Fraction of draws of Y ~ N(0, cov) with |Y| >= x, for each x in the grid.
/// Draws are shared across the grid.
std::vector<double> gaussian_norm_exceedance(const Mat& cov, std::span<const double> x_grid, std::int64_t draws,
                                             std::uint64_t seed);

/// CSV row for one record, without the trailing newline.
std::string csv_row(std::int64_t index, const StatRecord& r);
inline constexpr const char* kCsvHeader = "replication_index,mode,value,argmax_k,n,d,seed";

void write_csv(std::ostream& out, std::span<const StatRecord> records);
void write_csv_file(const std::string& path, std::span<const StatRecord> records);
/// Raw data lines of a CSV written by write_csv (header checked, then dropped).
std::vector<std::string> read_csv_rows(const std::string& path);

/// Summary record: ECDF quantiles, KS distance against the Gumbel law and,
/// when a reference sample is given, the two-sample distance.
nlohmann::json summarize(const ExperimentConfig& cfg, std::span<const StatRecord> records, double runtime_seconds,
                         std::optional<std::span<const StatRecord>> reference = std::nullopt);

}  // namespace delab
