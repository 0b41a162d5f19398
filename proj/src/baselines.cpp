// SPDX-License-Identifier: Apache-2.0
//
// wptsim: MIMO wireless power transfer with non-linear energy harvesting

#include "wpt/baselines.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <utility>

#include "wpt/beamforming.hpp"
#include "wpt/channel.hpp"
#include "wpt/simplex.hpp"

namespace wpt {

namespace {

std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace

BaselineResult baseline_single_rectifier(const ChannelMatrix& H,
                                         const RectifierBank& bank, double p_max) {
  if (bank.size() != 1) {
    throw std::invalid_argument("single-rectifier design needs exactly one rectifier");
  }
  BaselineResult out;
  out.design_id = "single_rectifier";
  out.covariance = optimal_covariance(H, p_max);
  const Eigen::VectorXd q = received_power_per_antenna(H, out.covariance);
  out.total_dc_w = harvested_dc(bank[0], q.sum());
  out.iterations = 0;
  out.converged = true;
  return out;
}

BaselineResult baseline_per_antenna(const ChannelMatrix& H,
                                    const RectifierBank& bank, double p_max,
                                    const SolverOptions& opts) {
  const Eigen::Index n = H.n_rx();
  const auto L = static_cast<Eigen::Index>(bank.size());
  if (L != n) {
    throw std::invalid_argument("per-antenna design needs one rectifier per receive antenna");
  }
  if (!(p_max > 0.0)) {
    throw std::invalid_argument("transmit power budget must be positive");
  }
  if (H.entries.size() == 0 || H.entries.norm() == 0.0) {
    throw std::domain_error("zero channel: no energy can be transferred");
  }

  // The covariance only enters through h_l^H X h_l, so the optimum can be
  // searched in the span of the channel vectors: X = U C U^H with U an
  // orthonormal basis of span{h_l} and C an r x r Hermitian PSD matrix with
  // the same trace budget.
  const Eigen::Index m = H.n_tx();
  const Eigen::MatrixXcd basis_input = H.entries.adjoint();  // columns h_l
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(basis_input);
  const Eigen::Index r = std::max<Eigen::Index>(1, qr.rank());
  const Eigen::MatrixXcd U =
      qr.householderQ() * Eigen::MatrixXcd::Identity(m, r);
  const Eigen::MatrixXcd G = U.adjoint() * basis_input;  // r x N, col l = U^H h_l

  std::vector<Eigen::MatrixXcd> channel_outer(static_cast<std::size_t>(L));
  for (Eigen::Index l = 0; l < L; ++l) {
    channel_outer[static_cast<std::size_t>(l)] = G.col(l) * G.col(l).adjoint();
  }

  const auto s_of = [&](const Eigen::MatrixXcd& C) {
    Eigen::VectorXd s(L);
    for (Eigen::Index l = 0; l < L; ++l) {
      const std::complex<double> v = (G.col(l).adjoint() * C * G.col(l))(0, 0);
      s(l) = std::max(0.0, v.real());
    }
    return s;
  };
  const auto project_cov = [&](const Eigen::MatrixXcd& C) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es((C + C.adjoint()) * 0.5);
    const Eigen::VectorXd vals =
        project_simplex_inequality(es.eigenvalues(), p_max);
    return Eigen::MatrixXcd(es.eigenvectors() * vals.asDiagonal() *
                            es.eigenvectors().adjoint());
  };

  // Projected gradient ascent over C for fixed (mu, beta); warm-started from
  // the run's previous covariance.
  const auto make_inner = [&](std::shared_ptr<Eigen::MatrixXcd> C_state) {
    return detail::InnerOracle(
        [&, C_state](const Eigen::VectorXd& mu, const Eigen::VectorXd& beta,
                     const Eigen::VectorXd& /*warm*/) {
          Eigen::MatrixXcd C = project_cov(*C_state);
          const auto objective = [&](const Eigen::VectorXd& s) {
            double f = 0.0;
            for (Eigen::Index l = 0; l < L; ++l) {
              f += mu(l) * (bank[l].q_max_tilde -
                            beta(l) * (1.0 + exp_term(bank[l], s(l))));
            }
            return f;
          };
          const auto gradient = [&](const Eigen::VectorXd& s) {
            Eigen::MatrixXcd W = Eigen::MatrixXcd::Zero(r, r);
            for (Eigen::Index l = 0; l < L; ++l) {
              W += (mu(l) * beta(l) * bank[l].a * exp_term(bank[l], s(l))) *
                   channel_outer[static_cast<std::size_t>(l)];
            }
            return W;
          };

          Eigen::VectorXd s = s_of(C);
          double f = objective(s);
          double t = 1.0;
          for (int it = 0; it < opts.inner_max_iter; ++it) {
            const Eigen::MatrixXcd W = gradient(s);
            const double kkt = (C - project_cov(C + W)).norm();
            if (kkt <= opts.inner_tol * (1.0 + std::abs(f))) {
              break;
            }
            bool moved = false;
            bool backtracked = false;
            while (t >= 1e-18) {
              const Eigen::MatrixXcd C_trial = project_cov(C + t * W);
              const Eigen::VectorXd s_trial = s_of(C_trial);
              const double f_trial = objective(s_trial);
              const double lin =
                  W.cwiseProduct((C_trial - C).conjugate()).sum().real();
              if (f_trial >= f + 1e-4 * lin) {
                C = C_trial;
                s = s_trial;
                f = f_trial;
                moved = true;
                break;
              }
              backtracked = true;
              t *= 0.5;
            }
            if (!moved) {
              break;
            }
            if (!backtracked) {
              t = std::min(t * 2.0, 1e12);
            }
          }
          *C_state = C;
          return s;
        });
  };

  const auto objective = [&](const Eigen::VectorXd& s) {
    return total_dc(bank, as_span(s));
  };

  // Start (a): all power on the dominant direction of the reduced gram.
  // Start (b): isotropic over the channel span.
  Eigen::MatrixXcd reduced_gram = Eigen::MatrixXcd::Zero(r, r);
  for (const auto& o : channel_outer) {
    reduced_gram += o;
  }
  const DominantEig e = dominant_eigenvector(reduced_gram);
  std::vector<Eigen::MatrixXcd> start_cov;
  start_cov.push_back(p_max * (e.v * e.v.adjoint()));
  start_cov.push_back((p_max / static_cast<double>(r)) *
                      Eigen::MatrixXcd::Identity(r, r));

  std::vector<detail::NewtonRun> runs;
  std::vector<std::shared_ptr<Eigen::MatrixXcd>> run_cov;
  for (std::size_t i = 0; i < start_cov.size(); ++i) {
    auto C_state = std::make_shared<Eigen::MatrixXcd>(start_cov[i]);
    const auto inner = make_inner(C_state);
    const Eigen::VectorXd s0 = s_of(*C_state);
    Eigen::VectorXd mu0, beta0;
    detail::parameters_at(bank, s0, mu0, beta0);
    runs.push_back(detail::modified_newton(bank, inner, mu0, beta0, s0,
                                           objective, opts,
                                           static_cast<int>(i)));
    run_cov.push_back(std::move(C_state));
  }

  int best = -1;
  double best_obj = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (!runs[i].converged) {
      continue;
    }
    const double obj = sigmoid_sum(bank, as_span(runs[i].state.inner_solution.s));
    if (obj > best_obj) {
      best_obj = obj;
      best = static_cast<int>(i);
    }
  }

  const auto finish = [&](int idx, bool converged) {
    const auto& st = runs[static_cast<std::size_t>(idx)].state;
    BaselineResult out;
    out.design_id = "per_antenna";
    Eigen::MatrixXcd X = U * (*run_cov[static_cast<std::size_t>(idx)]) * U.adjoint();
    out.covariance = TransmitCovariance{(X + X.adjoint()) * 0.5, p_max};
    out.total_dc_w = total_dc(bank, as_span(st.inner_solution.s));
    out.iterations = st.iter;
    out.converged = converged;
    for (const auto& run : runs) {
      out.trace.insert(out.trace.end(), run.trace.begin(), run.trace.end());
    }
    return out;
  };

  if (best < 0) {
    int fallback = 0;
    double fb_obj = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const double obj = sigmoid_sum(bank, as_span(runs[i].state.inner_solution.s));
      if (obj > fb_obj) {
        fb_obj = obj;
        fallback = static_cast<int>(i);
      }
    }
    throw BaselineFailure("per-antenna solve did not converge from any start",
                          finish(fallback, false));
  }
  return finish(best, true);
}

}  // namespace wpt
