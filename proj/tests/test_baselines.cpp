// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>

#include "oracles.hpp"
#include "wpt/baselines.hpp"
#include "wpt/beamforming.hpp"
#include "wpt/channel.hpp"
#include "wpt/simplex.hpp"
#include "wpt/splitting.hpp"

using namespace wpt;

namespace {

RectifierBank paper_bank(std::size_t l) { return uniform_bank(l, 150.0, 0.014, 0.0024); }

Eigen::VectorXd antenna_inputs(const ChannelMatrix& H, const Eigen::MatrixXcd& X) {
  Eigen::VectorXd s(H.n_rx());
  for (Eigen::Index n = 0; n < H.n_rx(); ++n) {
    s(n) = std::max(
        0.0, (H.entries.row(n) * X * H.entries.row(n).adjoint())(0, 0).real());
  }
  return s;
}

}  // namespace

TEST_CASE("baseline_single_rectifier") {
  ChannelConfig cfg;
  cfg.distance_m = 5.0;
  cfg.seed = 12;

  SUBCASE("requires one rectifier") {
    const ChannelMatrix H = generate_channel(cfg, 2, 2);
    CHECK_THROWS_AS(baseline_single_rectifier(H, paper_bank(2), 5.0),
                    std::invalid_argument);
  }

  SUBCASE("near-zero channel harvests nearly nothing") {
    cfg.distance_m = 1e5;
    const ChannelMatrix H = generate_channel(cfg, 2, 2);
    const BaselineResult r = baseline_single_rectifier(H, paper_bank(1), 5.0);
    CHECK(r.total_dc_w >= 0.0);
    CHECK(r.total_dc_w < 1e-9);
  }

  SUBCASE("coincides with the splitting solve when N = 1") {
    const ChannelMatrix H = generate_channel(cfg, 1, 3);
    const BaselineResult b = baseline_single_rectifier(H, paper_bank(1), 5.0);
    const Eigen::VectorXd q = received_power_per_antenna(H, b.covariance);
    const SolveResult r = solve_p2(paper_bank(1), q);
    CHECK(b.total_dc_w == doctest::Approx(r.total_dc_w).epsilon(1e-12));
  }

  SUBCASE("matches the dense eigendecomposition oracle") {
    const ChannelMatrix H = generate_channel(cfg, 2, 4);
    const double p_max = 5.0;
    const BaselineResult r = baseline_single_rectifier(H, paper_bank(1), p_max);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram(H));
    const double expected =
        harvested_dc(paper_bank(1)[0], p_max * es.eigenvalues().maxCoeff());
    CHECK(r.total_dc_w == doctest::Approx(expected).epsilon(1e-9));
    validate_covariance(r.covariance);
  }
}

TEST_CASE("baseline_per_antenna basics") {
  ChannelConfig cfg;
  cfg.distance_m = 2.0;
  cfg.seed = 23;

  SUBCASE("requires one rectifier per antenna") {
    const ChannelMatrix H = generate_channel(cfg, 3, 2);
    CHECK_THROWS_AS(baseline_per_antenna(H, paper_bank(2), 5.0),
                    std::invalid_argument);
  }

  SUBCASE("scalar link allocates the full budget") {
    const ChannelMatrix H = generate_channel(cfg, 1, 1);
    const double p_max = 5.0;
    const BaselineResult r = baseline_per_antenna(H, paper_bank(1), p_max);
    CHECK(r.converged);
    CHECK(r.covariance.matrix.trace().real() == doctest::Approx(p_max).epsilon(1e-9));
    const double expected = harvested_dc(
        paper_bank(1)[0], p_max * std::norm(H.entries(0, 0)));
    CHECK(r.total_dc_w == doctest::Approx(expected).epsilon(1e-7));
  }

  SUBCASE("covariance invariants hold") {
    const ChannelMatrix H = generate_channel(cfg, 3, 4);
    const BaselineResult r = baseline_per_antenna(H, paper_bank(3), 5.0);
    CHECK(r.converged);
    validate_covariance(r.covariance);
  }
}

TEST_CASE("per-antenna optimum on orthogonal channels matches a 1-D grid") {
  // Two orthogonal equal-norm channel rows: the covariance is diagonal in
  // that basis without loss, so the optimum reduces to a scalar power split.
  const double gain = 0.1;  // |h| per antenna
  ChannelMatrix H;
  H.entries = Eigen::MatrixXcd::Zero(2, 2);
  H.entries(0, 0) = gain;
  H.entries(1, 1) = gain;
  const double p_max = 5.0;
  const RectifierBank bank = paper_bank(2);

  auto dc_of = [&](double x) {
    const std::array<double, 2> s{gain * gain * x, gain * gain * (p_max - x)};
    return total_dc(bank, s);
  };
  double best = dc_of(0.0);
  for (int i = 1; i <= 20000; ++i) {
    best = std::max(best, dc_of(p_max * i / 20000.0));
  }

  const BaselineResult r = baseline_per_antenna(H, bank, p_max);
  CHECK(r.converged);
  CHECK(r.total_dc_w == doctest::Approx(best).epsilon(1e-4));
  // symmetric optimum at high power
  CHECK(r.covariance.matrix(0, 0).real() ==
        doctest::Approx(p_max / 2).epsilon(1e-2));
}

TEST_CASE("proposed design dominates the per-antenna baseline") {
  ChannelConfig cfg;
  cfg.distance_m = 1.5;
  const double p_max = 5.0;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    cfg.seed = seed;
    const ChannelMatrix H = generate_channel(cfg, 3, 4);
    const RectifierBank bank = paper_bank(3);
    const BaselineResult b = baseline_per_antenna(H, bank, p_max);
    const TransmitCovariance X = optimal_covariance(H, p_max);
    const SolveResult r = solve_p2(bank, received_power_per_antenna(H, X));
    REQUIRE(b.converged);
    REQUIRE(r.converged);
    CHECK(r.total_dc_w >= b.total_dc_w * (1.0 - 1e-9));
  }
}

TEST_CASE("inner objective over the covariance is midpoint concave") {
  ChannelConfig cfg;
  cfg.distance_m = 2.0;
  cfg.seed = 3;
  const ChannelMatrix H = generate_channel(cfg, 2, 3);
  const RectifierBank bank = paper_bank(2);
  const Eigen::VectorXd mu = Eigen::VectorXd::Constant(2, 0.4);
  const Eigen::VectorXd beta = Eigen::VectorXd::Constant(2, 1.1e-3);

  auto surrogate = [&](const Eigen::MatrixXcd& X) {
    const Eigen::VectorXd s = antenna_inputs(H, X);
    double f = 0.0;
    for (int l = 0; l < 2; ++l) {
      f += mu(l) * (bank[l].q_max_tilde -
                    beta(l) * (1.0 + exp_term(bank[l], s(l))));
    }
    return f;
  };

  rng::Generator gen(91);
  for (int i = 0; i < 50; ++i) {
    const Eigen::MatrixXcd X1 = oracles::random_feasible_covariance(3, 5.0, gen);
    const Eigen::MatrixXcd X2 = oracles::random_feasible_covariance(3, 5.0, gen);
    const double mid = surrogate(0.5 * (X1 + X2));
    CHECK(mid >= 0.5 * (surrogate(X1) + surrogate(X2)) - 1e-8);
  }
}

TEST_CASE("per-antenna solution is stationary for its own parameters") {
  // At convergence the covariance maximizes the surrogate whose parameters
  // are the fixed-point values at its own antenna inputs, so the projected
  // gradient step must not move it.
  ChannelConfig cfg;
  cfg.distance_m = 1.2;
  cfg.seed = 44;
  const ChannelMatrix H = generate_channel(cfg, 2, 3);
  const RectifierBank bank = paper_bank(2);
  const double p_max = 5.0;
  const BaselineResult r = baseline_per_antenna(H, bank, p_max);
  REQUIRE(r.converged);

  const Eigen::VectorXd s = antenna_inputs(H, r.covariance.matrix);
  Eigen::VectorXd mu, beta;
  detail::parameters_at(bank, s, mu, beta);

  Eigen::MatrixXcd W = Eigen::MatrixXcd::Zero(3, 3);
  for (Eigen::Index l = 0; l < 2; ++l) {
    const Eigen::VectorXcd h = H.entries.row(l).adjoint();
    W += (mu(l) * beta(l) * bank[static_cast<std::size_t>(l)].a *
          exp_term(bank[static_cast<std::size_t>(l)], s(l))) *
         (h * h.adjoint());
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r.covariance.matrix + W);
  const Eigen::VectorXd vals = project_simplex_inequality(es.eigenvalues(), p_max);
  const Eigen::MatrixXcd projected =
      es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
  CHECK((projected - r.covariance.matrix).norm() <=
        1e-6 * (1.0 + r.covariance.matrix.norm()));
}

TEST_CASE("random probes do not beat the per-antenna solution") {
  ChannelConfig cfg;
  cfg.distance_m = 1.5;
  cfg.seed = 56;
  const ChannelMatrix H = generate_channel(cfg, 3, 3);
  const RectifierBank bank = paper_bank(3);
  const double p_max = 5.0;
  const BaselineResult r = baseline_per_antenna(H, bank, p_max);
  REQUIRE(r.converged);

  rng::Generator gen(77);
  for (int i = 0; i < 500; ++i) {
    const Eigen::MatrixXcd X = oracles::random_feasible_covariance(3, p_max, gen);
    const Eigen::VectorXd s = antenna_inputs(H, X);
    CHECK(total_dc(bank, {s.data(), 3}) <= r.total_dc_w * (1.0 + 1e-6) + 1e-15);
  }
}
