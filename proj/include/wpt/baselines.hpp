// SPDX-License-Identifier: Apache-2.0
//
// wptsim: MIMO wireless power transfer with non-linear energy harvesting

#ifndef WPT_BASELINES_HPP
#define WPT_BASELINES_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "wpt/eh_model.hpp"
#include "wpt/splitting.hpp"
#include "wpt/types.hpp"

namespace wpt {

struct BaselineResult {
  std::string design_id;
  TransmitCovariance covariance;
  double total_dc_w = 0.0;
  int iterations = 0;
  bool converged = true;
  std::vector<TraceRow> trace;
};

struct BaselineFailure : std::runtime_error {
  BaselineResult best;
  BaselineFailure(const std::string& msg, BaselineResult b)
      : std::runtime_error(msg), best(std::move(b)) {}
};

/// Conventional receiver with a single rectifier: all received RF power is
/// combined into it, and the best covariance is the rank-one beam along the
/// dominant eigenvector. Requires a bank of size 1.
BaselineResult baseline_single_rectifier(const ChannelMatrix& H,
                                         const RectifierBank& bank, double p_max);

/// Conventional receiver with one rectifier hard-wired to each antenna
/// (L = N, no splitters). Optimizes the covariance for the resulting
/// sum-of-ratios objective with the same outer parameter loop as the
/// splitting solver; the inner concave problem over {X >= 0, tr X <= p_max}
/// is solved by projected gradient ascent with an exact spectral projection.
/// The search runs in the span of the channel vectors, so its cost does not
/// grow with the transmit array size. Throws BaselineFailure with the best
/// iterate when no start converges.
BaselineResult baseline_per_antenna(const ChannelMatrix& H,
                                    const RectifierBank& bank, double p_max,
                                    const SolverOptions& opts = {});

}  // namespace wpt

#endif  // WPT_BASELINES_HPP
