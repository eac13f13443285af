// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Every threshold used below is pinned in this file.

#include "delab/harness.hpp"
#include "delab/iterlog.hpp"
#include "delab/limits.hpp"
#include "delab/sym_psd.hpp"
#include "delab/truncation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <unistd.h>
#include <vector>

using namespace delab;

namespace {

namespace fs = std::filesystem;

constexpr double kKsGumbelMax = 0.08;
constexpr double kKsTwoSampleMax = 0.06;
constexpr double kPsdTol = 1e-9;
constexpr double kSigmaMultiplier = 3.0;
constexpr double kRatioSlack = 1e-6;
constexpr double kEnvelopeD2Tol = 1e-12;
constexpr double kDriverTarget = 0.5;
constexpr double kDriverRelTol = 0.10;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int worker_threads() { return std::max(1, static_cast<int>(std::thread::hardware_concurrency())); }

ExperimentConfig experiment(Family family, int d, StatMode mode, std::int64_t n, std::int64_t reps,
                            std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.id = to_string(family) + "_d" + std::to_string(d);
  cfg.spec.family = family;
  cfg.spec.d = d;
  cfg.mode = mode;
  cfg.n = n;
  cfg.replications = reps;
  cfg.master_seed = seed;
  return cfg;
}

Ecdf sample_of(const ExperimentConfig& cfg) { return Ecdf::of(run_experiment(cfg, worker_threads())); }

Outcome gumbel_proximity(int d) {
  const auto cfg = experiment(Family::gaussian_iso, d, StatMode::classical, 100000, 2000, 1);
  const double ks = ks_one_sample(sample_of(cfg), GumbelLaw{});
  return {ks <= kKsGumbelMax, fmt("d=%d n=1e5 R=2000 ks=%.4f (max %.2f)", d, ks, kKsGumbelMax)};
}

double early_argmax_share(std::span<const StatRecord> records) {
  const auto early = std::count_if(records.begin(), records.end(), [](const StatRecord& r) { return r.argmax_k <= 10; });
  return static_cast<double>(early) / static_cast<double>(records.size());
}

Outcome invariance_principle() {
  bool pass = true;
  std::string detail;
  for (int d : {1, 2}) {
    const auto ref_records =
        run_experiment(experiment(Family::gaussian_iso, d, StatMode::self_normalized, 100000, 2000, 100 + d),
                       worker_threads());
    const Ecdf ref = Ecdf::of(ref_records);
    detail += fmt("gaussian/d=%d argmax<=10 %.2f; ", d, early_argmax_share(ref_records));
    for (Family f : {Family::rademacher_product, Family::uniform_cube}) {
      const auto records = run_experiment(
          experiment(f, d, StatMode::self_normalized, 100000, 2000, 200 + 10 * d + static_cast<int>(f)),
          worker_threads());
      const double ks = ks_two_sample(Ecdf::of(records), ref);
      pass = pass && ks <= kKsTwoSampleMax;
      detail += fmt("%s/d=%d ks=%.4f argmax<=10 %.2f; ", to_string(f).c_str(), d, ks, early_argmax_share(records));
    }
  }
  return {pass, detail + fmt("(max %.2f)", kKsTwoSampleMax)};
}

// Random orthogonal matrix from the eigenvectors of a random symmetric one.
Mat random_rotation(int d, Stream& rng, NormalSampler& normal) {
  Mat g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = normal(rng);
  return eigen(Mat(g + g.transpose())).vectors;
}

// PSD matrix with eigenvalues log-uniform in [lo, lo * cond].
Mat random_psd(int d, double lo, double cond, Stream& rng, NormalSampler& normal) {
  const Mat q = random_rotation(d, rng, normal);
  Vec lam(d);
  for (int i = 0; i < d; ++i) lam(i) = lo * std::pow(cond, uniform01(rng));
  return q * lam.asDiagonal() * q.transpose();
}

Outcome matrix_sqrt_properties() {
  Stream rng(child_seed(4, 0));
  NormalSampler normal;
  int monotone_fail = 0, holder_fail = 0;
  double worst_monotone = 0.0, worst_holder = -1.0;
  for (int i = 0; i < 500; ++i) {
    const int d = 1 + i % 4;
    const Mat a = random_psd(d, 1e-2, 1e4, rng, normal);
    const Mat p = random_psd(d, 1e-3, 1e3, rng, normal);
    const Mat c = random_psd(d, 1e-2, 1e4, rng, normal);
    const Psd A(a), B(Mat(a + p)), C(c);
    const Mat ra = psd_sqrt(A).matrix(), rb = psd_sqrt(B).matrix(), rc = psd_sqrt(C).matrix();

    const double lmin = eigen(Mat(rb - ra)).lambda_min();
    worst_monotone = std::min(worst_monotone, lmin);
    monotone_fail += lmin < -kPsdTol;

    for (const auto& [x, rx, y, ry] : {std::tuple{a, ra, Mat(a + p), rb}, std::tuple{a, ra, c, rc}}) {
      const double lhs = std::pow(op_norm(Mat(rx - ry)), 2);
      const double rhs = op_norm(Mat(x - y));
      worst_holder = std::max(worst_holder, lhs - rhs);
      holder_fail += lhs > rhs + kPsdTol;
    }
  }
  return {monotone_fail == 0 && holder_fail == 0,
          fmt("500 pairs d<=4 cond<=1e4: monotone violations %d (min eig %.2e), holder violations %d "
              "(max excess %.2e), tol %.0e",
              monotone_fail, worst_monotone, holder_fail, worst_holder, kPsdTol)};
}

Outcome gaussian_tail_domination() {
  constexpr std::int64_t kDraws = 10000000;
  Stream rng(child_seed(5, 0));
  NormalSampler normal;
  int cells = 0, violations = 0;
  double min_margin = 1e300;
  for (int i = 0; i < 20; ++i) {
    const int d = 1 + i % 4;
    const Mat cov = random_psd(d, 0.1, 100.0, rng, normal);
    const double trace = cov.trace();
    const double smax = eigen(cov).lambda_max();
    // 2 exp(-x^2 / (8 tr)) in [1e-5, 1]  <=>  x^2 in [8 tr log 2, 8 tr log 2e5].
    const double x_lo = std::sqrt(8.0 * trace * std::log(2.0));
    const double x_hi = std::sqrt(8.0 * trace * std::log(2e5));
    std::vector<double> xs;
    for (int g = 0; g < 12; ++g) xs.push_back(x_lo + (x_hi - x_lo) * g / 11.0);
    const auto freq = gaussian_norm_exceedance(cov, xs, kDraws, child_seed(5, 1 + i));
    for (std::size_t g = 0; g < xs.size(); ++g) {
      const auto b = gaussian_norm_tail_bound(xs[g], trace, smax);
      const double se = std::sqrt(freq[g] * (1.0 - freq[g]) / static_cast<double>(kDraws));
      const double margin = b.bound_b + kSigmaMultiplier * se - freq[g];
      min_margin = std::min(min_margin, margin);
      ++cells;
      violations += margin < 0.0;
    }
  }
  return {violations == 0, fmt("20 covariances, %d cells, 1e7 draws: violations %d, min margin %.3e", cells,
                               violations, min_margin)};
}

Outcome density_ratio_bound() {
  std::vector<double> z;
  for (int i = 0; i <= 80; ++i) z.push_back(std::pow(10.0, -2.0 + 4.0 * i / 80.0));
  bool pass = true;
  double worst = -1e300;
  for (int k = 1; k <= 9; ++k) {
    const double sigma = 0.1 * k;
    const double bound = 2.0 / std::sqrt(1.0 - sigma * sigma);
    for (double zz : z) {
      const double r = mixture_density_ratio(sigma, zz);
      worst = std::max(worst, r - bound);
      pass = pass && std::isfinite(r) && r > 0.0 && r <= bound + kRatioSlack;
    }
  }
  return {pass, fmt("sigma 0.1..0.9, 81 z in [0.01, 100]: max(ratio - bound) = %.4f, slack %.0e", worst, kRatioSlack)};
}

Outcome chi_envelope() {
  bool pass = true;
  std::string detail;
  for (int d : {1, 2, 3}) {
    std::vector<double> t;
    for (double x = 2.0 * d; x <= 12.0 + 1e-12; x += 0.25) t.push_back(x);
    const Envelope e = chi_tail_envelope(d, t);
    bool ok = std::isfinite(e.c1_hat) && std::isfinite(e.c2_hat) && e.c1_hat > 0.0 && e.c2_hat >= e.c1_hat;
    if (d == 2)
      for (double r : e.ratio) ok = ok && std::abs(r - 1.0) <= kEnvelopeD2Tol;
    pass = pass && ok;
    detail += fmt("d=%d [%.6g, %.6g]; ", d, e.c1_hat, e.c2_hat);
  }
  return {pass, detail + fmt("d=2 tol %.0e", kEnvelopeD2Tol)};
}

Outcome integral_test_grid() {
  int cells = 0, mismatches = 0;
  std::string detail;
  for (int d = 1; d <= 3; ++d)
    for (int a = d; a <= d + 4; ++a)
      for (int b = 0; b <= 4; ++b) {
        const PhiFamily phi{static_cast<double>(a), static_cast<double>(b), d};
        const auto oracle = integral_test_partial_sums(phi, 1e9);
        const auto verdict = integral_test_classify(phi);
        ++cells;
        if (oracle.verdict != verdict) {
          ++mismatches;
          detail += fmt(" mismatch d=%d a=%d b=%d", d, a, b);
        }
      }
  return {mismatches == 0, fmt("%d cells, %d mismatches", cells, mismatches) + detail};
}

Outcome shift_driver_check() {
  const auto spec_cfg = experiment(Family::atom_ladder, 1, StatMode::classical, 1000000, 1000, 9);
  const GammaSequence gs(spec_cfg.spec.build(), spec_cfg.scheme, 1000);
  const double driver = shift_driver(gs, 100000000);
  const bool driver_ok = std::abs(driver - kDriverTarget) <= kDriverRelTol * kDriverTarget;

  const Ecdf ladder = sample_of(spec_cfg);
  const Ecdf gauss = sample_of(reference_config(spec_cfg, Family::gaussian_iso));
  const double m_ladder = ladder.quantile(0.5), m_gauss = gauss.quantile(0.5);
  return {driver_ok && m_ladder < m_gauss,
          fmt("driver(1e8) = %.4f (target %.1f +- %.0f%%); median ladder %.4f < gaussian %.4f", driver,
              kDriverTarget, 100.0 * kDriverRelTol, m_ladder, m_gauss)};
}

Outcome validators() {
  std::vector<std::int64_t> n_grid;
  n_grid.push_back(16);
  for (std::int64_t n = 100; n <= 1000000; n *= 10) n_grid.push_back(n);
  std::vector<double> linear;
  for (std::int64_t n = 1; n <= 1000000; ++n) linear.push_back(static_cast<double>(n));
  const std::vector<double> t_grid = {10, 1e3, 1e10, 1e100, 1e300};

  struct Case {
    std::string name;
    Verdict got, want;
  };
  const std::vector<Case> cases = {
      {"sqrt_n", validate_condition3(TruncationScheme::sqrt_n(), n_grid).verdict, Verdict::pass},
      {"sqrt_n_invLL5", validate_condition3(TruncationScheme::sqrt_n_invLL5(), n_grid).verdict, Verdict::pass},
      {"c_n=n", validate_condition3(TruncationScheme::from_table(linear), n_grid).verdict, Verdict::fail},
      {"gaussian vanishing",
       validate_tail_condition(DistributionSpec::gaussian_iso(1), TailCondition::vanishing, t_grid).verdict,
       Verdict::pass},
      {"atom_ladder vanishing",
       validate_tail_condition(DistributionSpec::atom_ladder(1, 0.5), TailCondition::vanishing, t_grid).verdict,
       Verdict::fail},
      {"atom_ladder bounded",
       validate_tail_condition(DistributionSpec::atom_ladder(1, 0.5), TailCondition::bounded, t_grid).verdict,
       Verdict::pass},
      {"atom_ladder_fat bounded",
       validate_tail_condition(DistributionSpec::atom_ladder_fat(1), TailCondition::bounded, t_grid).verdict,
       Verdict::fail},
  };
  bool pass = true;
  std::string detail;
  for (const auto& c : cases) {
    pass = pass && c.got == c.want;
    detail += c.name + "=" + to_string(c.got) + (c.got == c.want ? "" : "(want " + to_string(c.want) + ")") + "; ";
  }
  return {pass, detail};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome reproducibility() {
  const fs::path root = fs::temp_directory_path() / ("delab_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  const std::string base = std::string(DELAB_CLI_PATH) +
                           " simulate --set spec.family=uniform_cube --set spec.d=2 --set experiment.n=20000"
                           " --set experiment.replications=64 --set experiment.mode=self_normalized"
                           " --set experiment.reference=gaussian_iso --set experiment.id=repro --seed 77";
  std::vector<fs::path> dirs;
  for (const auto& [tag, threads] : {std::pair{"a", 1}, {"b", 1}, {"c", 4}}) {
    const fs::path dir = root / tag;
    const std::string cmd = base + " --threads " + std::to_string(threads) + " --out " + dir.string() + " > /dev/null";
    if (std::system(cmd.c_str()) != 0) return {false, "simulate exited nonzero: " + cmd};
    dirs.push_back(dir);
  }
  bool pass = true;
  std::string detail;
  for (const char* file : {"repro.csv", "repro_reference.csv"}) {
    const std::string first = slurp(dirs[0] / file);
    const bool same = !first.empty() && first == slurp(dirs[1] / file) && first == slurp(dirs[2] / file);
    pass = pass && same;
    detail += fmt("%s %s (%zu bytes); ", file, same ? "identical" : "DIFFERS", first.size());
  }
  fs::remove_all(root);
  return {pass, detail + "runs: threads 1, 1, 4"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"gaussian Gumbel proximity, d=1", [] { return gumbel_proximity(1); }},
      {"invariance principle, two-sample KS", invariance_principle},
      {"gaussian Gumbel proximity, d=2", [] { return gumbel_proximity(2); }},
      {"matrix square root properties", matrix_sqrt_properties},
      {"gaussian norm tail domination", gaussian_tail_domination},
      {"mixture density ratio bound", density_ratio_bound},
      {"chi tail envelope", chi_envelope},
      {"integral test classifier vs oracle", integral_test_grid},
      {"shifted limit driver and median", shift_driver_check},
      {"validators", validators},
      {"reproducibility", reproducibility},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::printf("criterion %2zu %s: %s | %s | %.1fs\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
