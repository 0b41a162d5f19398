// SPDX-License-Identifier: Apache-2.0
//
// wptsim: MIMO wireless power transfer with non-linear energy harvesting

#ifndef WPT_BEAMFORMING_HPP
#define WPT_BEAMFORMING_HPP

#include "wpt/types.hpp"

namespace wpt {

struct DominantEig {
  Eigen::VectorXcd v;   // unit norm
  double lambda = 0.0;  // largest eigenvalue
  int iterations = 0;
};

/// Dominant eigenpair of a Hermitian PSD matrix by power iteration.
///
/// Starts from the normalized all-ones vector and also from one seeded
/// random vector; the better Rayleigh quotient wins. The second start covers
/// the corner case of a deterministic start orthogonal to the dominant
/// eigenspace. Convergence: relative change of the Rayleigh quotient below
/// 1e-12, capped at 1e5 iterations. On a degenerate dominant eigenspace any
/// eigenvector of the dominant eigenvalue may be returned.
///
/// Throws std::invalid_argument for non-square/non-Hermitian input and
/// std::domain_error for the zero matrix.
DominantEig dominant_eigenvector(const Eigen::MatrixXcd& G);

/// X* = p_max v v^H with v the dominant eigenvector of H^H H. This attains
/// trace(H^H H X) = p_max lambda_1, the maximum total received RF power over
/// all feasible covariances. Throws std::domain_error for a zero channel and
/// std::invalid_argument unless p_max > 0.
TransmitCovariance optimal_covariance(const ChannelMatrix& H, double p_max);

/// Checks the covariance invariants (Hermitian, eigenvalues >= -1e-10,
/// trace <= p_max + 1e-10); throws std::domain_error on violation.
void validate_covariance(const TransmitCovariance& X);

}  // namespace wpt

#endif  // WPT_BEAMFORMING_HPP
