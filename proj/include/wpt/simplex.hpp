// SPDX-License-Identifier: Apache-2.0
//
// wptsim: MIMO wireless power transfer with non-linear energy harvesting

#ifndef WPT_SIMPLEX_HPP
#define WPT_SIMPLEX_HPP

#include <Eigen/Dense>

namespace wpt {

/// Euclidean projection onto {x >= 0, sum x = total} (sorting-based, exact).
Eigen::VectorXd project_simplex(const Eigen::VectorXd& v, double total);

/// Euclidean projection onto {x >= 0, sum x <= total}. Clips the negatives;
/// falls back to the equality projection only when the clipped point exceeds
/// the budget.
Eigen::VectorXd project_simplex_inequality(const Eigen::VectorXd& v, double total);

}  // namespace wpt

#endif  // WPT_SIMPLEX_HPP
