#include "commands.hpp"

#include "delab/harness.hpp"
#include "delab/iterlog.hpp"
#include "delab/limits.hpp"
#include "delab/truncation.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace delab::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class JsonlWriter {
 public:
  JsonlWriter(const ExperimentConfig& cfg, const std::string& suffix) {
    fs::create_directories(cfg.output_dir);
    path_ = (fs::path(cfg.output_dir) / (cfg.id + suffix + ".jsonl")).string();
    out_.open(path_, std::ios::binary | std::ios::trunc);
    if (!out_) throw std::runtime_error("cannot write '" + path_ + "'");
  }
  void write(const json& j) { out_ << j.dump() << '\n'; }
  ~JsonlWriter() { std::cout << "summary: " << path_ << '\n'; }

 private:
  std::string path_;
  std::ofstream out_;
};

std::string csv_path(const ExperimentConfig& cfg) { return (fs::path(cfg.output_dir) / (cfg.id + ".csv")).string(); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<StatRecord> run_and_store(const ExperimentConfig& cfg, int threads, double& runtime) {
  const auto t0 = std::chrono::steady_clock::now();
  auto records = run_experiment(cfg, threads);
  runtime = seconds_since(t0);
  fs::create_directories(cfg.output_dir);
  write_csv_file(csv_path(cfg), records);
  std::cout << "records: " << csv_path(cfg) << '\n';
  return records;
}

std::vector<std::int64_t> to_indices(const std::vector<double>& v, const char* key) {
  std::vector<std::int64_t> out;
  for (double x : v) {
    if (x != std::floor(x) || x < 1) throw ConfigError(std::string("config: '") + key + "' must hold positive integers");
    out.push_back(static_cast<std::int64_t>(x));
  }
  return out;
}

void row(const char* fmt, auto... args) {
  if constexpr (sizeof...(args) == 0)
    std::fputs(fmt, stdout);
  else
    std::printf(fmt, args...);
  std::fflush(stdout);
}

}  // namespace

int simulate(const Invocation& inv) {
  const ExperimentConfig cfg = experiment_config(inv.config);
  double runtime = 0.0;
  const auto records = run_and_store(cfg, inv.threads, runtime);
  std::optional<std::vector<StatRecord>> ref;
  if (cfg.reference) {
    double ref_runtime = 0.0;
    ref = run_and_store(reference_config(cfg, *cfg.reference), inv.threads, ref_runtime);
    runtime += ref_runtime;
  }
  const json s = ref ? summarize(cfg, records, runtime, std::span<const StatRecord>(*ref))
                     : summarize(cfg, records, runtime);
  JsonlWriter(cfg, ".summary").write(s);
  std::cout << s.dump(2) << '\n';
  return kExitOk;
}

int shift_experiment(const Invocation& inv) {
  ExperimentConfig cfg = experiment_config(inv.config);
  if (cfg.spec.family != Family::atom_ladder) throw ConfigError("shift-experiment requires spec.family = atom_ladder");
  cfg.mode = StatMode::classical;
  const auto grid = to_indices(inv.config.real_list("shift.grid"), "shift.grid");

  JsonlWriter out(cfg, ".shift");
  const GammaSequence gs = gamma_sequence_for(cfg);
  row("%14s %12s %12s %12s\n", "n", "sigma_n", "b_dn", "driver");
  for (auto n : grid) {
    const double sigma = gamma_at(gs, n).lambda_max;
    const double b = normalizers(static_cast<double>(n), cfg.spec.d).b_dn;
    const double driver = shift_driver(gs, n);
    row("%14lld %12.6f %12.6f %12.6f\n", static_cast<long long>(n), sigma, b, driver);
    out.write({{"kind", "driver"}, {"n", n}, {"sigma_n", sigma}, {"b_dn", b}, {"driver", driver}, {"c", cfg.spec.c}});
  }

  const auto t0 = std::chrono::steady_clock::now();
  const auto records = run_experiment(cfg, gs, inv.threads);
  const auto ref_cfg = reference_config(cfg, Family::gaussian_iso);
  const auto ref = run_experiment(ref_cfg, inv.threads);
  const double runtime = seconds_since(t0);
  fs::create_directories(cfg.output_dir);
  write_csv_file(csv_path(cfg), records);
  write_csv_file(csv_path(ref_cfg), ref);

  json s = summarize(cfg, records, runtime, std::span<const StatRecord>(ref));
  const double m = Ecdf::of(records).quantile(0.5), mref = Ecdf::of(ref).quantile(0.5);
  s["kind"] = "mc";
  s["median"] = m;
  s["median_below_reference"] = m < mref;
  out.write(s);
  row("median %.6f vs gaussian reference %.6f: %s\n", m, mref, m < mref ? "below" : "not below");
  return kExitOk;
}

int tightness_probe(const Invocation& inv) {
  ExperimentConfig cfg = experiment_config(inv.config);
  const auto spec = cfg.spec.build();
  const std::vector<double> t_grid = inv.config.real_list("validate.t_grid");
  const auto tail = validate_tail_condition(spec, TailCondition::bounded, t_grid);
  if (tail.verdict != Verdict::fail)
    throw ConfigError("tightness-probe requires a spec with unbounded tau(t) LL(t); " + spec.id() + " does not qualify");
  cfg.mode = StatMode::classical;
  const auto horizons = to_indices(inv.config.real_list("tightness.horizons"), "tightness.horizons");
  const auto ys = inv.config.real_list("tightness.y_grid");

  JsonlWriter out(cfg, ".tightness");
  std::vector<std::vector<double>> freq;
  row("%12s", "n");
  for (double y : ys) row("  %12s", ("P(M>" + json(y).dump() + ")").c_str());
  row("\n");
  for (auto n : horizons) {
    ExperimentConfig c = cfg;
    c.n = n;
    const Ecdf e = Ecdf::of(run_experiment(c, inv.threads));
    std::vector<double> f;
    for (double y : ys) f.push_back(1.0 - e(y));
    row("%12lld", static_cast<long long>(n));
    for (double v : f) row("  %12.4f", v);
    row("\n");
    out.write({{"kind", "exceedance"}, {"n", n}, {"y", ys}, {"frequency", f}, {"replications", cfg.replications}});
    freq.push_back(std::move(f));
  }
  int down = 0;
  for (std::size_t j = 0; j < ys.size(); ++j) down += freq.back()[j] < freq.front()[j];
  const bool drifts = 2 * down > static_cast<int>(ys.size());
  out.write({{"kind", "drift"}, {"drifts_downward", drifts}, {"y_points_decreasing", down}});
  row("mass drifts downward across horizons: %s (qualitative)\n", drifts ? "yes" : "no");
  return kExitOk;
}

int integral_test(const Invocation& inv) {
  const ExperimentConfig cfg = experiment_config(inv.config);
  const PhiFamily phi{inv.config.real("integral_test.a"), inv.config.real("integral_test.b"),
                      static_cast<int>(inv.config.integer("integral_test.d"))};
  const double n_max = inv.config.real("integral_test.n_max");
  const Convergence cls = integral_test_classify(phi);
  const PartialSumReport rep = integral_test_partial_sums(phi, n_max);

  JsonlWriter out(cfg, ".integral_test");
  row("%14s %22s\n", "n", "partial sum");
  for (std::size_t i = 0; i < rep.checkpoints.size(); ++i) {
    row("%14.4g %22.15g\n", rep.checkpoints[i], rep.partial_sums[i]);
    out.write({{"kind", "partial_sum"}, {"n", rep.checkpoints[i]}, {"sum", rep.partial_sums[i]}});
  }
  for (std::size_t i = 0; i < rep.block_w_end.size(); ++i)
    out.write({{"kind", "block"}, {"w_end", rep.block_w_end[i]}, {"log_increment", rep.block_log_increment[i]}});
  const bool agree = cls == rep.verdict;
  row("a=%g b=%g d=%d  classifier: %s  oracle: %s (growth %.4f)  %s\n", phi.a, phi.b, phi.d, to_string(cls).c_str(),
      to_string(rep.verdict).c_str(), rep.growth_exponent, agree ? "PASS" : "FAIL");
  out.write({{"kind", "verdict"}, {"a", phi.a}, {"b", phi.b}, {"d", phi.d}, {"classifier", to_string(cls)},
             {"oracle", to_string(rep.verdict)}, {"growth_exponent", rep.growth_exponent},
             {"check", agree ? "PASS" : "FAIL"}});
  return kExitOk;
}

int tail_bounds(const Invocation& inv) {
  const ExperimentConfig cfg = experiment_config(inv.config);
  const int d = static_cast<int>(inv.config.integer("tail_bounds.d"));
  const auto eig = inv.config.real_list("tail_bounds.covariance_eigenvalues");
  if (d < 1 || d > kMaxDim || static_cast<int>(eig.size()) != d)
    throw ConfigError("config: tail_bounds.covariance_eigenvalues must list tail_bounds.d values");
  Mat cov = Mat::Zero(d, d);
  double trace = 0.0, top = 0.0;
  for (int i = 0; i < d; ++i) {
    if (!(eig[i] > 0.0)) throw ConfigError("config: covariance eigenvalues must be > 0");
    cov(i, i) = eig[i];
    trace += eig[i];
    top = std::max(top, eig[i]);
  }
  const auto xs = inv.config.real_list("tail_bounds.x_grid");
  const auto draws = inv.config.integer("tail_bounds.draws");
  const auto freq = gaussian_norm_exceedance(cov, xs, draws, cfg.master_seed);

  JsonlWriter out(cfg, ".tail_bounds");
  row("%10s %14s %14s %14s %8s\n", "x", "mc P(|Y|>=x)", "bound_a", "bound_b", "check");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const TailBound b = gaussian_norm_tail_bound(xs[i], trace, top);
    const double bound = b.a_applicable ? std::min(b.bound_a, b.bound_b) : b.bound_b;
    const double se = std::sqrt(std::max(freq[i] * (1.0 - freq[i]), 1.0 / static_cast<double>(draws)) /
                                static_cast<double>(draws));
    const bool ok = freq[i] <= bound + 3.0 * se;
    row("%10g %14.6g %14.6g %14.6g %8s\n", xs[i], freq[i], b.a_applicable ? b.bound_a : NAN, b.bound_b,
        ok ? "PASS" : "FAIL");
    out.write({{"kind", "gaussian_norm_tail"}, {"x", xs[i]}, {"frequency", freq[i]}, {"bound", bound},
               {"a_applicable", b.a_applicable}, {"check", ok ? "PASS" : "FAIL"}});
  }

  const auto zs = inv.config.real_list("tail_bounds.z_grid");
  row("%8s %14s %12s %14s %8s\n", "sigma", "max ratio", "at z", "bound", "check");
  for (double sigma : inv.config.real_list("tail_bounds.sigma")) {
    const DensityRatioReport r = density_ratio_scan(sigma, zs);
    row("%8g %14.8f %12g %14.8f %8s\n", sigma, r.max_ratio, r.argmax_z, r.bound, r.holds ? "PASS" : "FAIL");
    out.write({{"kind", "density_ratio"}, {"sigma", sigma}, {"max_ratio", r.max_ratio}, {"argmax_z", r.argmax_z},
               {"bound", r.bound}, {"check", r.holds ? "PASS" : "FAIL"}});
  }

  const int ed = static_cast<int>(inv.config.integer("tail_bounds.envelope_d"));
  std::vector<double> ts;
  for (double t = 2.0 * ed; t <= 12.0 + 1e-12; t += 0.5) ts.push_back(t);
  const Envelope env = chi_tail_envelope(ed, ts);
  const bool env_ok = std::isfinite(env.c2_hat) && env.c1_hat > 0.0;
  row("envelope d=%d on [%d, 12]: C1 %.6g  C2 %.6g  %s\n", ed, 2 * ed, env.c1_hat, env.c2_hat,
      env_ok ? "PASS" : "FAIL");
  out.write({{"kind", "envelope"}, {"d", ed}, {"c1_hat", env.c1_hat}, {"c2_hat", env.c2_hat},
             {"check", env_ok ? "PASS" : "FAIL"}});
  return kExitOk;
}

int validate(const Invocation& inv) {
  const ExperimentConfig cfg = experiment_config(inv.config);
  const auto spec = cfg.spec.build();
  auto n_grid = to_indices(inv.config.real_list("validate.n_grid"), "validate.n_grid");
  if (cfg.scheme.family == SchemeFamily::table) {
    const auto len = static_cast<std::int64_t>(cfg.scheme.table.size());
    std::erase_if(n_grid, [&](std::int64_t n) { return n > len; });
    if (n_grid.size() < 3) throw ConfigError("validate: fewer than 3 points of validate.n_grid lie within scheme.table");
  }
  if (n_grid.size() < 3 || n_grid.front() < 16)
    throw ConfigError("validate: validate.n_grid needs at least 3 points, all >= 16");
  const auto t_grid = inv.config.real_list("validate.t_grid");

  JsonlWriter out(cfg, ".validate");
  const Condition3Report c3 = validate_condition3(cfg.scheme, n_grid);
  row("%-40s %-14s\n", "check", "verdict");
  row("%-40s %-14s\n", ("truncation level " + cfg.scheme.id()).c_str(), to_string(c3.verdict).c_str());
  out.write({{"kind", "truncation_level"}, {"scheme", cfg.scheme.id()}, {"verdict", to_string(c3.verdict)},
             {"analytic", c3.analytic}, {"n", c3.n}, {"eps_hat", c3.eps_hat}, {"tail_slope", c3.tail_slope}});
  for (auto [which, name] : {std::pair{TailCondition::vanishing, "tail tau(t)LL(t) -> 0"},
                             std::pair{TailCondition::bounded, "tail tau(t)LL(t) bounded"}}) {
    const auto r = validate_tail_condition(spec, which, t_grid);
    row("%-40s %-14s\n", (std::string(name) + " " + spec.id()).c_str(), to_string(r.verdict).c_str());
    json prof = json::array();
    for (const auto& p : r.profile) prof.push_back({{"t", p.t}, {"tau", p.tau}, {"tau_LL", p.tau_times_LLt}});
    out.write({{"kind", which == TailCondition::vanishing ? "tail_vanishing" : "tail_bounded"},
               {"spec", spec.id()}, {"verdict", to_string(r.verdict)}, {"analytic", r.analytic},
               {"limit", std::isfinite(r.limit) ? json(r.limit) : json("inf")}, {"profile", prof}});
  }
  return kExitOk;
}

int replay(const Invocation& inv) {
  const ExperimentConfig cfg = experiment_config(inv.config);
  const std::string path = inv.csv_path.value_or(csv_path(cfg));
  const auto rows = read_csv_rows(path);
  if (rows.empty()) throw std::runtime_error("'" + path + "' holds no records");
  std::int64_t first = inv.index, last = inv.index;
  if (inv.all_rows) first = 0, last = static_cast<std::int64_t>(rows.size()) - 1;
  if (last >= static_cast<std::int64_t>(rows.size()))
    throw ConfigError("replay: index " + std::to_string(last) + " is past the end of '" + path + "'");

  const GammaSequence gs = gamma_sequence_for(cfg);
  std::int64_t mismatches = 0;
  for (std::int64_t i = first; i <= last; ++i) {
    const std::string fresh = csv_row(i, run_replication(cfg, gs, i));
    const std::string& stored = rows[static_cast<std::size_t>(i)];
    if (fresh != stored) {
      ++mismatches;
      std::cerr << "mismatch at replication " << i << "\n  stored: " << stored << "\n  replay: " << fresh << '\n';
    }
  }
  const auto checked = last - first + 1;
  row("replayed %lld replication(s) from %s: %s\n", static_cast<long long>(checked), path.c_str(),
      mismatches == 0 ? "identical" : "MISMATCH");
  return mismatches == 0 ? kExitOk : kExitRuntime;
}

}  // namespace delab::cli
