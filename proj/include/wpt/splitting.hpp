// SPDX-License-Identifier: Apache-2.0
//
// wptsim: MIMO wireless power transfer with non-linear energy harvesting

#ifndef WPT_SPLITTING_HPP
#define WPT_SPLITTING_HPP

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wpt/eh_model.hpp"

namespace wpt {

/// Power-splitting ratios: alpha(n, l) is the fraction of antenna n's RF
/// power routed to rectifier l. Entries in [0, 1], rows sum to 1.
struct SplitMatrix {
  Eigen::MatrixXd alpha;  // N x L
};

/// Aggregate per-rectifier input powers s_l = sum_n alpha(n, l) q_a_n.
/// Feasible set is the simplex {s >= 0, sum_l s_l = p_total} scaled by the
/// total received RF power: any point on it is reachable by some feasible
/// alpha, and vice versa.
struct AggregateSplit {
  Eigen::VectorXd s;  // length L, watts
  double p_total = 0.0;
};

/// State of the outer parameter iteration.
struct NewtonState {
  Eigen::VectorXd mu;    // length L, dimensionless
  Eigen::VectorXd beta;  // length L, watts
  AggregateSplit inner_solution;
  double residual_norm = 0.0;
  int iter = 0;
};

struct SolverOptions {
  double delta = 1e-6;           // outer tolerance on ||psi||
  int max_outer = 50;            // outer iteration cap per start
  double epsilon = 0.1;          // sufficient-decrease constant, in (0, 1)
  double lambda_floor = 0x1p-30; // smallest backtracking step
  double inner_tol = 1e-10;      // inner KKT residual scale
  int inner_max_iter = 100000;
};

/// One outer iteration of one start, for convergence reporting.
struct TraceRow {
  int start_id = 0;
  int iter = 0;
  double psi_norm = 0.0;
  double objective = 0.0;  // total harvested DC at the current inner solution
  double step = 0.0;       // accepted step length (0 on the initial row)
};

struct SolveResult {
  SplitMatrix alpha;
  AggregateSplit split;
  double total_dc_w = 0.0;
  Eigen::VectorXd mu;    // converged parameters of the winning start
  Eigen::VectorXd beta;
  double residual_norm = 0.0;
  int outer_iterations = 0;  // iterations of the winning start
  bool converged = false;
  std::vector<TraceRow> trace;  // all starts, tagged by start_id
};

/// Backtracking hit the step floor without sufficient decrease.
struct LineSearchStall : std::runtime_error {
  double residual_norm;
  int iter;
  LineSearchStall(double r, int k)
      : std::runtime_error("line search stalled at ||psi|| = " + std::to_string(r) +
                           ", outer iteration " + std::to_string(k)),
        residual_norm(r),
        iter(k) {}
};

/// No start converged within the iteration budget; carries the best iterate.
struct SolveFailure : std::runtime_error {
  SolveResult best;
  SolveFailure(const std::string& msg, SolveResult b)
      : std::runtime_error(msg), best(std::move(b)) {}
};

/// p_total = sum_n q_a_n. Throws std::domain_error on negative entries.
double reduce_to_aggregate(const Eigen::VectorXd& q_a);

/// Maximizes sum_l mu_l [q_max_tilde_l - beta_l (1 + e^{-a_l (s_l - b_l)})]
/// over the scaled simplex by projected gradient ascent with exact
/// projection. The objective is concave for mu, beta >= 0. Throws
/// std::domain_error when all mu_l are zero (constant objective) or any
/// parameter is negative.
AggregateSplit solve_inner(const RectifierBank& bank, const Eigen::VectorXd& mu,
                           const Eigen::VectorXd& beta, double p_total,
                           const SolverOptions& opts = {},
                           const Eigen::VectorXd* warm_start = nullptr);

/// psi_l = beta_l (1 + e^{-a_l (s_l - b_l)}) - q_max_tilde_l and
/// psi_{L+l} = mu_l (1 + e^{-a_l (s_l - b_l)}) - 1, evaluated at the state's
/// inner solution.
Eigen::VectorXd residual_psi(const RectifierBank& bank, const NewtonState& state);

/// Direction -J^{-1} psi with the Jacobian taken at fixed inner solution,
/// which makes it diagonal with entries 1 + e^{-a_l (s_l - b_l)} >= 1.
/// First L entries move beta, last L move mu.
Eigen::VectorXd newton_direction(const RectifierBank& bank, const NewtonState& state);

/// Largest lambda in {1, 1/2, 1/4, ...} with
/// ||psi(mu + lambda p_mu, beta + lambda p_beta)|| <= (1 - epsilon lambda) ||psi||,
/// re-solving the inner problem at each trial point. Throws LineSearchStall
/// below the floor.
double line_search(const RectifierBank& bank, const NewtonState& state,
                   const Eigen::VectorXd& direction, double epsilon,
                   const SolverOptions& opts = {});

/// One damped Newton update of (mu, beta), including the inner re-solve.
NewtonState newton_step(const RectifierBank& bank, const NewtonState& state,
                        const SolverOptions& opts = {});

/// Splitting-ratio optimization for given per-antenna received powers.
///
/// Works in the aggregate variable s on the scaled simplex and recovers
/// alpha(n, l) = s_l / p_total for every n. The outer root-finding runs from
/// a saturation start (mu = 1, beta = q_max_tilde) and from k-way
/// uniform-support candidates (k = 1..L); the converged run with the best
/// objective wins. Throws SolveFailure when no start converges.
SolveResult solve_p2(const RectifierBank& bank, const Eigen::VectorXd& q_a,
                     const SolverOptions& opts = {});

namespace detail {

/// Inner oracle: maximizer s of the weighted concave surrogate at (mu, beta),
/// warm-started from the previous solution.
using InnerOracle = std::function<Eigen::VectorXd(
    const Eigen::VectorXd& mu, const Eigen::VectorXd& beta,
    const Eigen::VectorXd& warm)>;

struct NewtonRun {
  NewtonState state;
  std::vector<TraceRow> trace;
  int iterations = 0;
  bool converged = false;
  bool stalled = false;
};

/// Damped Newton outer loop on psi(mu, beta) = 0, shared by the splitting
/// solver and the per-antenna baseline. After convergence one full step is
/// applied (and kept if ||psi|| stays within delta), so the returned
/// parameters satisfy beta_l = q_max_tilde_l mu_l exactly.
NewtonRun modified_newton(const RectifierBank& bank, const InnerOracle& inner,
                          Eigen::VectorXd mu0, Eigen::VectorXd beta0,
                          const Eigen::VectorXd& warm0,
                          const std::function<double(const Eigen::VectorXd&)>& objective,
                          const SolverOptions& opts, int start_id);

/// Fixed-point parameter values at aggregate inputs s:
/// mu_l = 1 / (1 + e^{-a_l (s_l - b_l)}), beta_l = q_max_tilde_l mu_l.
void parameters_at(const RectifierBank& bank, const Eigen::VectorXd& s,
                   Eigen::VectorXd& mu, Eigen::VectorXd& beta);

}  // namespace detail
}  // namespace wpt

#endif  // WPT_SPLITTING_HPP
