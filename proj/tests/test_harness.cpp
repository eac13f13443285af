#include "delab/harness.hpp"
#include "delab/iterlog.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

using namespace delab;

TEST_CASE("ECDF agrees with a naive scan") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  std::vector<double> v;
  for (int i = 0; i < 500; ++i) v.push_back(std::round(g(rng) * 4) / 4);  // ties
  const Ecdf e(v);
  for (int q = 0; q < 1000; ++q) {
    const double x = std::round(g(rng) * 8) / 8;
    const double naive = static_cast<double>(std::count_if(v.begin(), v.end(), [&](double y) { return y <= x; })) / 500.0;
    CHECK(e(x) == naive);
  }
  const Ecdf small({3.0, 1.0, 2.0, 4.0});
  CHECK(small.quantile(0.5) == 2.0);
  CHECK(small.quantile(0.51) == 3.0);
  CHECK(small.quantile(1.0) == 4.0);
  CHECK(small.quantile(0.01) == 1.0);
  CHECK_THROWS(small.quantile(0.0));
  CHECK_THROWS(Ecdf(std::vector<double>{}));
}

TEST_CASE("Kolmogorov-Smirnov distances") {
  // One point at the Gumbel median: the ECDF jumps 0 -> 1 where F = 1/2.
  const Ecdf one({gumbel_quantile({}, 0.5)});
  CHECK(std::abs(ks_one_sample(one, {}) - 0.5) < 1e-15);

  // Exact Gumbel quantiles at (i - 1/2)/R give KS = 1/(2R).
  std::vector<double> q;
  for (int i = 1; i <= 100; ++i) q.push_back(gumbel_quantile({}, (i - 0.5) / 100.0));
  CHECK(std::abs(ks_one_sample(Ecdf(q), {}) - 0.005) < 1e-12);

  const Ecdf a({1, 2, 3, 4}), b({3, 4, 5, 6});
  CHECK(ks_two_sample(a, b) == 0.5);
  CHECK(ks_two_sample(a, a) == 0.0);
  const Ecdf t1({1, 1, 2, 2}), t2({1, 2, 2, 2});
  CHECK(ks_two_sample(t1, t2) == 0.25);
  CHECK(ks_two_sample(Ecdf({0.0}), Ecdf({1.0, 2.0})) == 1.0);
}

TEST_CASE("experiments are deterministic and thread-count independent") {
  ExperimentConfig cfg;
  cfg.spec.family = Family::atom_ladder;
  cfg.spec.d = 2;
  cfg.mode = StatMode::self_normalized;
  cfg.n = 2000;
  cfg.replications = 40;
  cfg.master_seed = 5;
  const auto r1 = run_experiment(cfg, 1);
  const auto r4 = run_experiment(cfg, 4);
  const auto again = run_experiment(cfg, 3);
  std::ostringstream s1, s4, s3;
  write_csv(s1, r1);
  write_csv(s4, r4);
  write_csv(s3, again);
  CHECK(s1.str() == s4.str());
  CHECK(s1.str() == s3.str());

  std::set<std::uint64_t> seeds;
  std::set<double> values;
  for (const auto& r : r1) seeds.insert(r.seed), values.insert(r.value);
  CHECK(seeds.size() == r1.size());
  CHECK(values.size() == r1.size());

  const auto gs = gamma_sequence_for(cfg);
  const auto r7 = run_replication(cfg, gs, 7);
  CHECK(csv_row(7, r7) == csv_row(7, r1[7]));

  cfg.replications = 1;
  CHECK(run_experiment(cfg, 2).size() == 1);
}

TEST_CASE("kls experiments use the capped horizon") {
  ExperimentConfig cfg;
  cfg.mode = StatMode::kls;
  cfg.n = 100;
  cfg.replications = 3;
  const auto r = run_experiment(cfg, 1);
  for (const auto& x : r) {
    CHECK(x.horizon_cap == 5000);
    CHECK(x.argmax_k >= 100);
    CHECK(x.argmax_k <= 5000);
  }
}

TEST_CASE("CSV and summary") {
  StatRecord r;
  r.mode = StatMode::classical;
  r.value = 0.1;
  r.argmax_k = 12;
  r.n = 1000;
  r.d = 2;
  r.seed = 18446744073709551615ull;
  CHECK(csv_row(3, r) == "3,classical,0.10000000000000001,12,1000,2,18446744073709551615");

  ExperimentConfig cfg;
  cfg.n = 500;
  cfg.replications = 50;
  cfg.reference = Family::gaussian_iso;
  const auto recs = run_experiment(cfg, 1);
  const auto ref = run_experiment(reference_config(cfg, Family::gaussian_iso), 1);
  CHECK(reference_config(cfg, Family::gaussian_iso).master_seed != cfg.master_seed);
  const auto j = summarize(cfg, recs, 0.5, std::span<const StatRecord>(ref));
  for (const char* key : {"p01", "p05", "p25", "p50", "p75", "p95", "p99"}) CHECK(j["quantiles"].contains(key));
  CHECK(j.contains("ks_gumbel"));
  CHECK(j.contains("ks_two_sample"));
  CHECK(j["runtime_seconds"] == 0.5);
  CHECK_FALSE(summarize(cfg, recs, 0.5).contains("ks_two_sample"));
}

TEST_CASE("shift driver from the infinite ladder") {
  const auto spec = DistributionSpec::atom_ladder(1, 0.5);
  const GammaSequence gs(spec, TruncationScheme::sqrt_n(), 10);
  // sqrt(1e8) = 1e4 lies between t_2 and t_3, so sigma^2 = 1 - 0.5 / 3.
  const double sigma = std::sqrt(1.0 - 0.5 / 3.0);
  const double b = normalizers(1e8, 1).b_dn;
  CHECK(std::abs(shift_driver(gs, 100000000) - (1.0 - sigma) * b) < 1e-12);
  const GammaSequence flat(DistributionSpec::atom_ladder(1, 0.0), TruncationScheme::sqrt_n(), 10);
  CHECK(std::abs(shift_driver(flat, 100000000)) < 1e-15);
}
