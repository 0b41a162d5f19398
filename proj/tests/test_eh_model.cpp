// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "wpt/eh_model.hpp"
#include "wpt/rng.hpp"

using namespace wpt;

namespace {

RectifierParams paper_rect() { return make_rectifier(150.0, 0.014, 0.0024); }

// Frozen reference values from a 50-digit evaluation of the model formulas.
constexpr double kOmega = 0.10909682119561294;
constexpr double kQMaxTilde = 2.6938954278071566e-3;
constexpr double kSigmoid5mw = 4.9408889232227359e-4;
constexpr double kHarvestedAtB = 1.0530522860964217e-3;
constexpr double kHarvested25mw = 1.9659893373568233e-3;

}  // namespace

TEST_CASE("derived constants") {
  const RectifierParams p = paper_rect();
  CHECK(p.omega == doctest::Approx(kOmega).epsilon(1e-14));
  CHECK(p.q_max_tilde == doctest::Approx(kQMaxTilde).epsilon(1e-14));
  CHECK(p.omega > 0.0);
  CHECK(p.omega < 0.5);
  CHECK(p.q_max_tilde > p.q_max);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(make_rectifier(0.0, 0.014, 0.0024), std::invalid_argument);
  CHECK_THROWS_AS(make_rectifier(150.0, -1.0, 0.0024), std::invalid_argument);
  CHECK_THROWS_AS(make_rectifier(150.0, 0.014, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(uniform_bank(0, 150.0, 0.014, 0.0024), std::invalid_argument);
}

TEST_CASE("sigmoid_dc") {
  const RectifierParams p = paper_rect();

  SUBCASE("midpoint at q = b") {
    CHECK(sigmoid_dc(p, p.b) == doctest::Approx(0.0012).epsilon(1e-15));
  }
  SUBCASE("saturation limit") {
    CHECK(sigmoid_dc(p, 10.0) == doctest::Approx(p.q_max).epsilon(1e-12));
    CHECK(sigmoid_dc(p, 1e6) == doctest::Approx(p.q_max).epsilon(1e-12));
  }
  SUBCASE("frozen value at 5 mW") {
    CHECK(sigmoid_dc(p, 0.005) == doctest::Approx(kSigmoid5mw).epsilon(1e-12));
  }
  SUBCASE("negative input") {
    CHECK_THROWS_AS(sigmoid_dc(p, -1e-9), std::domain_error);
  }
  SUBCASE("bounded and increasing") {
    CHECK(sigmoid_dc(p, 0.0) > 0.0);
    CHECK(sigmoid_dc(p, 0.0) < p.q_max);
    CHECK(sigmoid_dc(p, 0.001) < sigmoid_dc(p, 0.002));
  }
}

TEST_CASE("harvested_dc") {
  const RectifierParams p = paper_rect();

  SUBCASE("zero input gives zero output") {
    CHECK(std::abs(harvested_dc(p, 0.0)) <= 1e-15);
  }
  SUBCASE("saturation") {
    CHECK(harvested_dc(p, 1.0) >= 0.999 * p.q_max);
    CHECK(harvested_dc(p, 1.0) == doctest::Approx(p.q_max).epsilon(1e-12));
  }
  SUBCASE("value at the turning point") {
    const double expected = p.q_max * (0.5 - p.omega) / (1.0 - p.omega);
    CHECK(harvested_dc(p, p.b) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(harvested_dc(p, p.b) == doctest::Approx(kHarvestedAtB).epsilon(1e-12));
  }
  SUBCASE("frozen value at 25 mW") {
    CHECK(harvested_dc(p, 0.025) == doctest::Approx(kHarvested25mw).epsilon(1e-12));
  }
  SUBCASE("negative input") {
    CHECK_THROWS_AS(harvested_dc(p, -0.001), std::domain_error);
  }
  SUBCASE("strictly increasing on the operating range") {
    rng::Generator gen(42);
    for (int i = 0; i < 200; ++i) {
      const double x = gen.uniform() * 0.05;
      const double y = x + 1e-6 + gen.uniform() * (0.05 - x);
      CHECK(harvested_dc(p, x) < harvested_dc(p, y));
    }
  }
  SUBCASE("bounded by q_max") {
    // strict inequality where the exp term is representable; at larger
    // inputs the double result saturates to q_max exactly
    rng::Generator gen(7);
    for (int i = 0; i < 200; ++i) {
      const double q = gen.uniform() * 0.2;
      CHECK(harvested_dc(p, q) < p.q_max);
    }
    CHECK(harvested_dc(p, 2.0) <= p.q_max);
  }
}

TEST_CASE("total_dc") {
  const RectifierBank bank1 = uniform_bank(1, 150.0, 0.014, 0.0024);
  const RectifierBank bank2 = uniform_bank(2, 150.0, 0.014, 0.0024);

  SUBCASE("zero input") {
    const std::array<double, 1> z{0.0};
    CHECK(total_dc(bank1, z) == 0.0);
  }
  SUBCASE("symmetry of identical rectifiers") {
    const std::array<double, 2> s{0.013, 0.013};
    CHECK(total_dc(bank2, s) ==
          doctest::Approx(2.0 * harvested_dc(bank2[0], 0.013)).epsilon(1e-15));
  }
  SUBCASE("frozen value at 25 mW each") {
    const std::array<double, 2> s{0.025, 0.025};
    CHECK(total_dc(bank2, s) ==
          doctest::Approx(2.0 * kHarvested25mw).epsilon(1e-12));
  }
  SUBCASE("length mismatch") {
    const std::array<double, 3> s{0.0, 0.0, 0.0};
    CHECK_THROWS_AS(total_dc(bank2, s), std::invalid_argument);
  }
  SUBCASE("permutation invariance") {
    const std::array<double, 2> a{0.003, 0.031};
    const std::array<double, 2> b{0.031, 0.003};
    CHECK(total_dc(bank2, a) == doctest::Approx(total_dc(bank2, b)).epsilon(1e-15));
  }
}

TEST_CASE("total_dc and sigmoid_sum rank splits identically") {
  // The two objectives differ by a constant, so orderings always agree.
  const RectifierBank bank = uniform_bank(3, 150.0, 0.014, 0.0024);
  rng::Generator gen(11);
  for (int i = 0; i < 200; ++i) {
    std::array<double, 3> x{}, y{};
    for (auto& v : x) v = gen.uniform() * 0.05;
    for (auto& v : y) v = gen.uniform() * 0.05;
    const double dq = total_dc(bank, x) - total_dc(bank, y);
    const double ds = sigmoid_sum(bank, x) - sigmoid_sum(bank, y);
    CHECK(dq == doctest::Approx(ds).epsilon(1e-9));
    CHECK(((dq >= 0.0) == (ds >= 0.0)));
  }
}

TEST_CASE("heterogeneous bank is supported") {
  RectifierBank bank;
  bank.rectifiers.push_back(make_rectifier(150.0, 0.014, 0.0024));
  bank.rectifiers.push_back(make_rectifier(90.0, 0.02, 0.004));
  const std::array<double, 2> s{0.01, 0.02};
  const double expected =
      harvested_dc(bank[0], 0.01) + harvested_dc(bank[1], 0.02);
  CHECK(total_dc(bank, s) == doctest::Approx(expected).epsilon(1e-15));
}
