#include "commands.hpp"

#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <map>

int main(int argc, char** argv) {
  using namespace delab;
  using namespace delab::cli;

  CLI::App app{"Darling-Erdos simulation and verification lab"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  int threads = 1;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--set", overrides, "Override one key, key=value (repeatable)")->allow_extra_args(false);
  app.add_option("--out", out_dir, "Output directory (overrides experiment.output)");
  app.add_option("--threads", threads, "Worker threads; never changes results")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Master seed (overrides experiment.master_seed)");

  Invocation inv;
  const std::map<std::string, std::pair<std::string, std::function<int(const Invocation&)>>> commands = {
      {"simulate", {"Monte Carlo run of the normalized maximum", simulate}},
      {"shift-experiment", {"Deterministic shift driver and median comparison for atom ladders", shift_experiment}},
      {"tightness-probe", {"Exceedance frequencies across horizons for heavy ladders", tightness_probe}},
      {"integral-test", {"Classify the boundary family and check against partial sums", integral_test}},
      {"tail-bounds", {"Gaussian norm tail bounds, mixture density ratio and chi envelope", tail_bounds}},
      {"validate", {"Truncation-level and tail-condition diagnostics", validate}},
      {"replay", {"Re-run stored replications and compare with the CSV", replay}},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, entry] : commands) subs[name] = app.add_subcommand(name, entry.first);
  auto* rp = subs.at("replay");
  rp->add_option("--csv", inv.csv_path, "CSV to check (default: <out>/<id>.csv)");
  rp->add_option("--index", inv.index, "Replication index to replay")->check(CLI::NonNegativeNumber);
  rp->add_flag("--all", inv.all_rows, "Replay every row");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    inv.config = config_path.empty() ? Config{} : Config::load(config_path);
    for (const auto& o : overrides) inv.config.apply_override(o);
    if (!out_dir.empty()) inv.config.set("experiment.output", out_dir);
    if (seed) inv.config.set("experiment.master_seed", std::to_string(*seed));
    inv.threads = threads;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  for (const auto& [name, sub] : subs) {
    if (!sub->parsed()) continue;
    try {
      return commands.at(name).second(inv);
    } catch (const ConfigError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitUsage;
    } catch (const std::exception& e) {
      std::cerr << "runtime error: " << e.what() << '\n';
      return kExitRuntime;
    }
  }
  return kExitUsage;
}
