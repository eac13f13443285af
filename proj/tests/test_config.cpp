#include "delab/config.hpp"

#include <doctest.h>

using namespace delab;

TEST_CASE("INI parsing with schema checks") {
  const auto cfg = Config::parse(R"(
[experiment]
id = demo
mode = self_normalized
n = 1e5
replications = 250
master_seed = 99

[spec]
family = atom_ladder
d = 2
c = 0.25
direction = axis

[scheme]
family = sqrt_n_polylog
q = -1.5
n0 = 40
)");
  const auto e = experiment_config(cfg);
  CHECK(e.id == "demo");
  CHECK(e.mode == StatMode::self_normalized);
  CHECK(e.n == 100000);
  CHECK(e.replications == 250);
  CHECK(e.master_seed == 99);
  CHECK(e.spec.family == Family::atom_ladder);
  CHECK(e.spec.direction == DirectionMode::axis);
  CHECK(e.spec.c == 0.25);
  CHECK(e.scheme.family == SchemeFamily::sqrt_n_polylog);
  CHECK(e.scheme.q == -1.5);
  CHECK(e.scheme.n0 == 40);
  CHECK_FALSE(e.reference.has_value());
}

TEST_CASE("defaults and overrides") {
  Config cfg;
  auto e = experiment_config(cfg);
  CHECK(e.mode == StatMode::classical);
  CHECK(e.scheme.n0 == 0);
  CHECK(e.effective_kls_cap() == 50 * e.n);
  cfg.apply_override("spec.family=rademacher_product");
  cfg.apply_override("experiment.reference = gaussian_iso");
  cfg.apply_override("scheme.family=table");
  cfg.apply_override("scheme.table=1, 2, 3.5");
  e = experiment_config(cfg);
  CHECK(e.spec.family == Family::rademacher_product);
  CHECK(e.reference == Family::gaussian_iso);
  CHECK(e.scheme.table == std::vector<double>{1, 2, 3.5});
  CHECK(cfg.real_list("tightness.horizons") == std::vector<double>{1e4, 1e5, 1e6});
}

TEST_CASE("config errors") {
  Config cfg;
  CHECK_THROWS_AS(cfg.apply_override("spec.nonexistent=1"), ConfigError);
  CHECK_THROWS_AS(cfg.apply_override("experiment.n=ten"), ConfigError);
  CHECK_THROWS_AS(cfg.apply_override("experiment.n=1.5"), ConfigError);
  CHECK_THROWS_AS(cfg.apply_override("no_equals_sign"), ConfigError);
  CHECK_THROWS_AS(cfg.apply_override("spec.c=0.5x"), ConfigError);
  CHECK_THROWS_AS(Config::parse("[spec]\nfamily = gaussian_iso\ncolor = blue\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("orphan = 1\n"), ConfigError);
  CHECK_THROWS_AS(Config::load("/nonexistent/path.ini"), ConfigError);

  auto bad = [](const char* kv) {
    Config c;
    c.apply_override(kv);
    return experiment_config(c);
  };
  CHECK_THROWS_AS(bad("scheme.family=bogus"), ConfigError);
  CHECK_THROWS_AS(bad("spec.family=cauchy"), ConfigError);
  CHECK_THROWS_AS(bad("experiment.mode=median"), ConfigError);
  CHECK_THROWS_AS(bad("experiment.n=0"), ConfigError);
  CHECK_THROWS_AS(bad("scheme.n0=-3"), ConfigError);
  CHECK_THROWS_AS(bad("scheme.family=table"), ConfigError);
  {
    Config c;
    c.apply_override("experiment.mode=kls");
    c.apply_override("spec.d=2");
    CHECK_THROWS_AS(experiment_config(c), ConfigError);
  }
  {
    Config c;
    c.apply_override("spec.family=uniform_cube");
    c.apply_override("spec.d=5");
    CHECK_THROWS_AS(experiment_config(c), ConfigError);
  }
}
