// SPDX-License-Identifier: Apache-2.0
//
// wptsim: MIMO wireless power transfer with non-linear energy harvesting

#include "wpt/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace wpt {

Eigen::VectorXd project_simplex(const Eigen::VectorXd& v, double total) {
  const Eigen::Index n = v.size();
  if (n < 1) {
    throw std::invalid_argument("cannot project an empty vector");
  }
  if (!(total >= 0.0) || !std::isfinite(total)) {
    throw std::invalid_argument("simplex budget must be finite and non-negative");
  }

  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());

  double cumulative = 0.0;
  double tau = (u[0] - total);  // overwritten below; j = 0 always qualifies
  for (Eigen::Index j = 0; j < n; ++j) {
    cumulative += u[j];
    const double candidate = (cumulative - total) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) {
      tau = candidate;
    }
  }
  return (v.array() - tau).max(0.0);
}

Eigen::VectorXd project_simplex_inequality(const Eigen::VectorXd& v, double total) {
  Eigen::VectorXd clipped = v.cwiseMax(0.0);
  if (clipped.sum() <= total) {
    return clipped;
  }
  return project_simplex(v, total);
}

}  // namespace wpt
