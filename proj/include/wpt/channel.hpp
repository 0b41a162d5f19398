// SPDX-License-Identifier: Apache-2.0
//
// wptsim: MIMO wireless power transfer with non-linear energy harvesting

#ifndef WPT_CHANNEL_HPP
#define WPT_CHANNEL_HPP

#include <cstdint>

#include "wpt/types.hpp"

namespace wpt {

/// Rician fading with distance-based path loss. The average per-entry
/// channel power gain is g = 10^(ref_gain_db/10) * distance^-exponent.
struct ChannelConfig {
  double distance_m = 5.0;
  double pathloss_exponent = 3.0;
  double ref_gain_db = -30.0;  // power gain at 1 m
  double rician_k_db = 3.0;
  std::uint64_t seed = 0;
};

double linear_from_db(double db);

/// g = zeta0 * d^-exponent.
double path_gain(const ChannelConfig& cfg);

/// Draws H = sqrt(g) (sqrt(K/(K+1)) * ones + sqrt(1/(K+1)) * W) with W
/// i.i.d. CN(0,1). The line-of-sight component is the all-ones matrix
/// (rank one, zero phase). Deterministic given cfg.seed; entries are drawn
/// row by row.
ChannelMatrix generate_channel(const ChannelConfig& cfg, Eigen::Index n_rx,
                               Eigen::Index n_tx);

/// H^H H = sum_n h_n h_n^H (M x M Hermitian PSD).
Eigen::MatrixXcd gram(const ChannelMatrix& H);

/// Q^a_n = h_n^H X h_n for every receive antenna. Throws
/// std::invalid_argument on dimension mismatch and std::domain_error when X
/// is not Hermitian PSD (eigenvalue below -1e-10 relative).
Eigen::VectorXd received_power_per_antenna(const ChannelMatrix& H,
                                           const TransmitCovariance& X);

}  // namespace wpt

#endif  // WPT_CHANNEL_HPP
