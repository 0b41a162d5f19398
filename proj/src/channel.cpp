// SPDX-License-Identifier: Apache-2.0
//
// wptsim: MIMO wireless power transfer with non-linear energy harvesting

#include "wpt/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "wpt/rng.hpp"

namespace wpt {

double linear_from_db(double db) { return std::pow(10.0, db / 10.0); }

double path_gain(const ChannelConfig& cfg) {
  if (!(cfg.distance_m > 0.0)) {
    throw std::invalid_argument("distance must be positive");
  }
  if (!(cfg.pathloss_exponent > 0.0)) {
    throw std::invalid_argument("path loss exponent must be positive");
  }
  return linear_from_db(cfg.ref_gain_db) *
         std::pow(cfg.distance_m, -cfg.pathloss_exponent);
}

ChannelMatrix generate_channel(const ChannelConfig& cfg, Eigen::Index n_rx,
                               Eigen::Index n_tx) {
  if (n_rx < 1 || n_tx < 1) {
    throw std::invalid_argument("channel dimensions must be at least 1");
  }
  const double g = path_gain(cfg);
  const double k = linear_from_db(cfg.rician_k_db);
  const double los = std::sqrt(g * k / (k + 1.0));
  const double nlos = std::sqrt(g / (k + 1.0));

  rng::Generator gen(cfg.seed);
  ChannelMatrix H;
  H.entries.resize(n_rx, n_tx);
  for (Eigen::Index n = 0; n < n_rx; ++n) {
    for (Eigen::Index m = 0; m < n_tx; ++m) {
      H.entries(n, m) = los + nlos * gen.complex_normal();
    }
  }
  return H;
}

Eigen::MatrixXcd gram(const ChannelMatrix& H) {
  return H.entries.adjoint() * H.entries;
}

Eigen::VectorXd received_power_per_antenna(const ChannelMatrix& H,
                                           const TransmitCovariance& X) {
  const Eigen::Index m = H.n_tx();
  if (X.matrix.rows() != m || X.matrix.cols() != m) {
    throw std::invalid_argument("covariance dimension must match transmit antennas");
  }
  const double scale = std::max(1.0, X.matrix.norm());
  if ((X.matrix - X.matrix.adjoint()).norm() > 1e-10 * scale) {
    throw std::domain_error("covariance must be Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(X.matrix,
                                                     Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10 * scale) {
    throw std::domain_error("covariance must be positive semi-definite");
  }

  Eigen::VectorXd q(H.n_rx());
  for (Eigen::Index n = 0; n < H.n_rx(); ++n) {
    const std::complex<double> v =
        (H.entries.row(n) * X.matrix * H.entries.row(n).adjoint())(0, 0);
    q(n) = std::max(0.0, v.real());
  }
  return q;
}

}  // namespace wpt
