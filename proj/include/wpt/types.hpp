// SPDX-License-Identifier: Apache-2.0
//
// wptsim: MIMO wireless power transfer with non-linear energy harvesting

#ifndef WPT_TYPES_HPP
#define WPT_TYPES_HPP

#include <Eigen/Dense>

namespace wpt {

/// N x M complex channel from an M-antenna transmitter to an N-antenna
/// receiver. Row n holds h_n^H, the conjugated channel vector of receive
/// antenna n, so that the RF power collected there under transmit
/// covariance X is h_n^H X h_n.
struct ChannelMatrix {
  Eigen::MatrixXcd entries;

  Eigen::Index n_rx() const { return entries.rows(); }
  Eigen::Index n_tx() const { return entries.cols(); }
};

/// Transmit covariance X: M x M Hermitian PSD with trace(X) <= p_max.
struct TransmitCovariance {
  Eigen::MatrixXcd matrix;
  double p_max = 0.0;
};

}  // namespace wpt

#endif  // WPT_TYPES_HPP
