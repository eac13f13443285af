#include "delab/iterlog.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace delab;

TEST_CASE("iterated logarithm with floor") {
  CHECK(iterlog(1.0, 1) == 1.0);
  CHECK(iterlog(0.0, 3) == 1.0);
  CHECK(std::abs(iterlog(std::exp(std::numbers::e), 2) - 1.0) < 1e-15);
  // Frozen from 50-digit evaluation.
  CHECK(std::abs(L(1e6) - 13.815510557964274104) < 1e-13);
  CHECK(std::abs(LL(1e6) - 2.6257919144760108006) < 1e-14);
  CHECK(LLL(1e6) == 1.0);
  CHECK(LLLL(1e6) == 1.0);
  CHECK_THROWS(iterlog(10.0, 0));
  CHECK_THROWS(iterlog(10.0, 5));
}

TEST_CASE("iterlog is monotone and floored") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5.0, 300.0);
  for (int i = 0; i < 2000; ++i) {
    double s = std::pow(10.0, u(rng)), t = std::pow(10.0, u(rng));
    if (s > t) std::swap(s, t);
    for (int k = 1; k <= 4; ++k) {
      CHECK(iterlog(s, k) <= iterlog(t, k));
      CHECK(iterlog(s, k) >= 1.0);
    }
  }
}

TEST_CASE("normalizers") {
  const auto n1 = normalizers(1e6, 1);
  CHECK(std::abs(n1.a_n - 2.2916334412274624514) < 1e-14);
  CHECK(std::abs(n1.b_dn - 5.1792188860273215142) < 1e-13);
  CHECK(std::abs(normalizers(1e6, 2).b_dn - 6.2515838289520216012) < 1e-13);
  CHECK(std::abs(normalizers(1e6, 3).b_dn - 6.8723660665872668236) < 1e-13);
  CHECK(std::abs(normalizers(1e6, 4).b_dn - 7.2515838289520216012) < 1e-13);

  const auto at_ee = normalizers(std::exp(std::numbers::e), 1);
  CHECK(std::abs(at_ee.a_n - std::sqrt(2.0)) < 1e-14);
  CHECK(std::abs(at_ee.b_dn - 1.9276350570752999129) < 1e-13);

  SUBCASE("d = 2 has no log Gamma term") {
    for (double n : {10.0, 1e4, 1e9, 1e15}) CHECK(std::abs(normalizers(n, 2).b_dn - (2 * LL(n) + LLL(n))) < 1e-13);
  }
  SUBCASE("d = 1 cross-check against log(pi)/2") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 18.0);
    for (int i = 0; i < 100; ++i) {
      const double n = std::floor(std::pow(10.0, u(rng))) + 1.0;
      const double expected = 2 * LL(n) + LLL(n) / 2 - std::log(std::numbers::pi) / 2;
      CHECK(std::abs(normalizers(n, 1).b_dn - expected) < 1e-12);
    }
  }
}

TEST_CASE("kls normalizer") {
  CHECK(kls_normalizer(1).scale == 2.0);
  CHECK(std::abs(kls_normalizer(1e6).scale - 2 * 2.6257919144760108006) < 1e-13);
  CHECK(std::abs(kls_normalizer(1e6).center - 0.44110848217180827273) < 1e-13);
  CHECK(std::abs(kls_constant() - std::log(3.0 / std::sqrt(8.0))) < 1e-15);
  CHECK(kls_normalizer(1e6).apply(1.0) == -kls_normalizer(1e6).center);
}
