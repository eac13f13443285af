#include "delab/harness.hpp"

#include "delab/iterlog.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace delab {

Ecdf::Ecdf(std::vector<double> sample) : sorted_(std::move(sample)) {
  if (sorted_.empty()) throw std::invalid_argument("Ecdf: empty sample");
  std::sort(sorted_.begin(), sorted_.end());
}

Ecdf Ecdf::of(std::span<const StatRecord> records) {
  std::vector<double> v;
  v.reserve(records.size());
  for (const auto& r : records) v.push_back(r.value);
  return Ecdf(std::move(v));
}

double Ecdf::operator()(double x) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double Ecdf::quantile(double p) const {
  if (!(p > 0.0 && p <= 1.0)) throw std::domain_error("Ecdf::quantile: p must lie in (0, 1]");
  const auto r = static_cast<double>(sorted_.size());
  auto idx = static_cast<std::size_t>(std::ceil(p * r - 1e-9));
  idx = std::clamp<std::size_t>(idx, 1, sorted_.size());
  return sorted_[idx - 1];
}

double ks_one_sample(const Ecdf& e, const GumbelLaw& law) {
  const auto& x = e.sorted();
  const double r = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = gumbel_cdf(law, x[i]);
    d = std::max({d, static_cast<double>(i + 1) / r - f, f - static_cast<double>(i) / r});
  }
  return d;
}

double ks_two_sample(const Ecdf& a, const Ecdf& b) {
  const auto& x = a.sorted();
  const auto& y = b.sorted();
  const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() || j < y.size()) {
    double v;
    if (j == y.size() || (i < x.size() && x[i] <= y[j]))
      v = x[i];
    else
      v = y[j];
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

GammaSequence gamma_sequence_for(const ExperimentConfig& cfg) {
  const std::int64_t horizon = cfg.mode == StatMode::kls ? cfg.effective_kls_cap() : cfg.n;
  return GammaSequence(cfg.spec.build(), cfg.scheme, horizon);
}

StatRecord run_replication(const ExperimentConfig& cfg, const GammaSequence& gs, std::int64_t index) {
  const std::uint64_t seed = child_seed(cfg.master_seed, static_cast<std::uint64_t>(index));
  const auto traj = Trajectory::sampled(gs.spec(), seed);
  if (cfg.mode == StatMode::kls) return kls_statistic(traj, &gs, cfg.n, cfg.effective_kls_cap());
  return de_statistic(traj, gs, cfg.mode, cfg.n);
}

std::vector<StatRecord> run_experiment(const ExperimentConfig& cfg, const GammaSequence& gs, int threads) {
  const auto reps = static_cast<std::size_t>(cfg.replications);
  std::vector<StatRecord> out(reps);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t r = next++; r < reps; r = next++) {
      try {
        out[r] = run_replication(cfg, gs, static_cast<std::int64_t>(r));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = reps;
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(threads, static_cast<int>(reps)));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<StatRecord> run_experiment(const ExperimentConfig& cfg, int threads) {
  return run_experiment(cfg, gamma_sequence_for(cfg), threads);
}

ExperimentConfig reference_config(const ExperimentConfig& cfg, Family family) {
  ExperimentConfig ref = cfg;
  ref.id = cfg.id + "_reference";
  ref.spec = SpecParams{};
  ref.spec.family = family;
  ref.spec.d = cfg.spec.d;
  ref.master_seed = splitmix64(cfg.master_seed ^ 0x5eed5eed5eed5eedULL);
  ref.reference.reset();
  return ref;
}

double shift_driver(const GammaSequence& gs, std::int64_t n) {
  const GammaAt g = gamma_at(gs, n);
  return (1.0 - g.lambda_max) * normalizers(static_cast<double>(n), gs.dim()).b_dn;
}

std::vector<double> gaussian_norm_exceedance(const Mat& cov, std::span<const double> x_grid, std::int64_t draws,
                                             std::uint64_t seed) {
  if (draws < 1) throw std::invalid_argument("gaussian_norm_exceedance: draws must be >= 1");
  const Mat root = psd_sqrt(Psd(cov)).matrix();
  const int d = static_cast<int>(cov.rows());
  std::vector<double> x2;
  for (double x : x_grid) x2.push_back(x * x);
  std::vector<std::int64_t> hits(x_grid.size(), 0);
  Stream stream(seed);
  NormalSampler normal;
  Vec z(d);
  for (std::int64_t i = 0; i < draws; ++i) {
    for (int j = 0; j < d; ++j) z(j) = normal(stream);
    const double r2 = (root * z).squaredNorm();
    for (std::size_t g = 0; g < x2.size(); ++g) hits[g] += r2 >= x2[g];
  }
  std::vector<double> out;
  for (auto h : hits) out.push_back(static_cast<double>(h) / static_cast<double>(draws));
  return out;
}

std::string csv_row(std::int64_t index, const StatRecord& r) {
  char value[64];
  std::snprintf(value, sizeof value, "%.17g", r.value);
  return std::to_string(index) + "," + to_string(r.mode) + "," + value + "," + std::to_string(r.argmax_k) + "," +
         std::to_string(r.n) + "," + std::to_string(r.d) + "," + std::to_string(r.seed);
}

void write_csv(std::ostream& out, std::span<const StatRecord> records) {
  out << kCsvHeader << '\n';
  for (std::size_t i = 0; i < records.size(); ++i) out << csv_row(static_cast<std::int64_t>(i), records[i]) << '\n';
}

void write_csv_file(const std::string& path, std::span<const StatRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_csv(out, records);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

std::vector<std::string> read_csv_rows(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw std::runtime_error("'" + path + "' has an unexpected header");
  std::vector<std::string> rows;
  while (std::getline(in, line))
    if (!line.empty()) rows.push_back(line);
  return rows;
}

nlohmann::json summarize(const ExperimentConfig& cfg, std::span<const StatRecord> records, double runtime_seconds,
                         std::optional<std::span<const StatRecord>> reference) {
  const Ecdf e = Ecdf::of(records);
  nlohmann::json q = nlohmann::json::object();
  for (auto [name, p] : {std::pair{"p01", 0.01}, {"p05", 0.05}, {"p25", 0.25}, {"p50", 0.5}, {"p75", 0.75},
                         {"p95", 0.95}, {"p99", 0.99}})
    q[name] = e.quantile(p);

  nlohmann::json s = {
      {"id", cfg.id},
      {"spec", cfg.spec.build().id()},
      {"scheme", cfg.scheme.id()},
      {"mode", to_string(cfg.mode)},
      {"d", cfg.spec.d},
      {"n", cfg.n},
      {"replications", cfg.replications},
      {"master_seed", cfg.master_seed},
      {"quantiles", q},
      {"ks_gumbel", ks_one_sample(e, GumbelLaw{})},
      {"runtime_seconds", runtime_seconds},
  };
  if (cfg.mode == StatMode::kls) s["kls_cap"] = cfg.effective_kls_cap();
  if (reference) {
    const Ecdf r = Ecdf::of(*reference);
    s["reference"] = to_string(cfg.reference.value_or(Family::gaussian_iso));
    s["ks_two_sample"] = ks_two_sample(e, r);
    s["reference_median"] = r.quantile(0.5);
  }
  return s;
}

}  // namespace delab
