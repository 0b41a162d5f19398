// SPDX-License-Identifier: Apache-2.0
//
// wptsim: MIMO wireless power transfer with non-linear energy harvesting

#ifndef WPT_EXPERIMENT_HPP
#define WPT_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "wpt/splitting.hpp"

namespace wpt {

enum class Design { proposed, single_rectifier, per_antenna };

std::string to_string(Design d);
std::optional<Design> design_from_string(const std::string& name);

/// Everything a Monte Carlo run depends on. One config plus one seed fully
/// determines the output bytes.
struct ExperimentConfig {
  int m_tx = 320;
  int n_rx = 4;
  int l_rect = 4;
  double p_max_w = 5.0;
  std::vector<double> distances_m = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};

  // rectifier constants (identical across the bank)
  double eh_a = 150.0;
  double eh_b = 0.014;
  double eh_q_max = 0.0024;

  // channel
  double rician_k_db = 3.0;
  double ref_gain_db = -30.0;
  double pathloss_exponent = 3.0;

  int trials = 1000;
  std::uint64_t seed = 1;

  // solver constants
  double solver_delta = 1e-6;
  int solver_max_outer = 50;
  double solver_epsilon = 0.1;

  std::vector<Design> designs = {Design::proposed, Design::single_rectifier,
                                 Design::per_antenna};

  int threads = 0;      // 0: hardware concurrency
  bool timing = false;  // populate wall_time_s (off keeps output byte-stable)
};

void validate(const ExperimentConfig& cfg);  // throws std::invalid_argument

struct ResultRow {
  Design design = Design::proposed;
  double distance_m = 0.0;
  int l_rect = 0;
  int trial = 0;
  double total_dc_w = 0.0;
  int outer_iterations = 0;
  bool converged = false;
  double wall_time_s = 0.0;
};

/// One row per (design, distance, trial), in that nesting order. The channel
/// of trial t is drawn from the substream (seed, t) and reused across
/// designs and distances, so per-realization comparisons are paired. Solver
/// failures flag the row converged = false and the run continues.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

/// Rectifier-count sweep of the proposed design at the first configured
/// distance; one row per (l, trial), channels shared across l.
std::vector<ResultRow> run_l_sweep(const ExperimentConfig& cfg,
                                   const std::vector<int>& l_values);

/// Outer-iteration trace of the splitting solve for one realization at the
/// first configured distance; rows carry (start_id, iter, ||psi||,
/// objective, step).
std::vector<TraceRow> run_convergence_trace(const ExperimentConfig& cfg,
                                            int trial_index);

void write_rows_csv(std::ostream& os, const std::vector<ResultRow>& rows);
void write_means_csv(std::ostream& os, const std::vector<ResultRow>& rows);
void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows);

}  // namespace wpt

#endif  // WPT_EXPERIMENT_HPP
