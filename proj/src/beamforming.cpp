// SPDX-License-Identifier: Apache-2.0
//
// wptsim: MIMO wireless power transfer with non-linear energy harvesting

#include "wpt/beamforming.hpp"

#include <cmath>
#include <stdexcept>

#include "wpt/channel.hpp"
#include "wpt/rng.hpp"

namespace wpt {

namespace {

constexpr int kMaxIterations = 100000;
constexpr double kRayleighTol = 1e-12;
constexpr double kResidualTol = 1e-9;  // on ||G v - lambda v|| / lambda

DominantEig iterate_from(const Eigen::MatrixXcd& G, Eigen::VectorXcd v) {
  DominantEig out;
  v.normalize();
  double prev = -1.0;
  int it = 0;
  for (; it < kMaxIterations; ++it) {
    const Eigen::VectorXcd w = G * v;
    const double rq = v.dot(w).real();
    const double scale = std::max(std::abs(rq), 1e-300);
    const double residual = (w - rq * v).norm();
    if (it > 0 && residual <= kResidualTol * scale &&
        std::abs(rq - prev) <= kRayleighTol * scale) {
      prev = rq;
      break;
    }
    prev = rq;
    const double wn = w.norm();
    if (wn == 0.0) {
      prev = 0.0;  // start vector lies in the null space
      break;
    }
    v = w / wn;
  }
  out.v = v;
  out.lambda = prev;
  out.iterations = it;
  return out;
}

}  // namespace

DominantEig dominant_eigenvector(const Eigen::MatrixXcd& G) {
  if (G.rows() != G.cols() || G.rows() < 1) {
    throw std::invalid_argument("matrix must be square and non-empty");
  }
  if (!G.allFinite()) {
    throw std::invalid_argument("matrix must be finite");
  }
  const double scale = G.norm();
  if (scale == 0.0) {
    throw std::domain_error("zero matrix has no energy-bearing direction");
  }
  if ((G - G.adjoint()).norm() > 1e-10 * scale) {
    throw std::invalid_argument("matrix must be Hermitian");
  }

  const Eigen::Index m = G.rows();
  DominantEig best = iterate_from(G, Eigen::VectorXcd::Ones(m));

  // Shifted restart from a seeded random vector in case the deterministic
  // start is orthogonal to the dominant eigenspace.
  rng::Generator gen(0x5eedbeafULL);
  Eigen::VectorXcd r(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    r(i) = gen.complex_normal();
  }
  DominantEig alt = iterate_from(G, r);
  if (alt.lambda > best.lambda) {
    alt.iterations += best.iterations;
    return alt;
  }
  best.iterations += alt.iterations;
  return best;
}

TransmitCovariance optimal_covariance(const ChannelMatrix& H, double p_max) {
  if (!(p_max > 0.0)) {
    throw std::invalid_argument("transmit power budget must be positive");
  }
  if (H.entries.size() == 0 || H.entries.norm() == 0.0) {
    throw std::domain_error("zero channel: no energy can be transferred");
  }
  const DominantEig e = dominant_eigenvector(gram(H));
  TransmitCovariance X;
  X.matrix = p_max * (e.v * e.v.adjoint());
  X.p_max = p_max;
  return X;
}

void validate_covariance(const TransmitCovariance& X) {
  if (X.matrix.rows() != X.matrix.cols()) {
    throw std::domain_error("covariance must be square");
  }
  if ((X.matrix - X.matrix.adjoint()).norm() > 1e-12 * std::max(1.0, X.matrix.norm())) {
    throw std::domain_error("covariance must be Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(X.matrix,
                                                     Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10) {
    throw std::domain_error("covariance must be positive semi-definite");
  }
  if (X.matrix.trace().real() > X.p_max + 1e-10) {
    throw std::domain_error("covariance trace exceeds the power budget");
  }
}

}  // namespace wpt
