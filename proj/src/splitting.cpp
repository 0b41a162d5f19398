// SPDX-License-Identifier: Apache-2.0
//
// wptsim: MIMO wireless power transfer with non-linear energy harvesting

#include "wpt/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <utility>

#include "wpt/simplex.hpp"

namespace wpt {

namespace {

std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

Eigen::VectorXd psi_of(const RectifierBank& bank, const Eigen::VectorXd& mu,
                       const Eigen::VectorXd& beta, const Eigen::VectorXd& s) {
  const auto L = static_cast<Eigen::Index>(bank.size());
  Eigen::VectorXd psi(2 * L);
  for (Eigen::Index l = 0; l < L; ++l) {
    const double d = 1.0 + exp_term(bank[l], s(l));
    psi(l) = beta(l) * d - bank[l].q_max_tilde;
    psi(L + l) = mu(l) * d - 1.0;
  }
  return psi;
}

struct StepOutcome {
  double lambda = 0.0;
  Eigen::VectorXd mu, beta, s;
  double residual = 0.0;
};

// Backtracking step along the Newton direction; re-solves the inner problem
// at every trial point. Empty when no step above the floor decreases ||psi||
// by the required factor.
std::optional<StepOutcome> try_step(const RectifierBank& bank,
                                    const NewtonState& state,
                                    const Eigen::VectorXd& direction,
                                    double epsilon, const SolverOptions& opts,
                                    const detail::InnerOracle& inner) {
  const auto L = static_cast<Eigen::Index>(bank.size());
  double lambda = 1.0;
  while (lambda >= opts.lambda_floor) {
    StepOutcome o;
    o.lambda = lambda;
    o.mu = state.mu + lambda * direction.tail(L);
    o.beta = state.beta + lambda * direction.head(L);
    o.s = inner(o.mu, o.beta, state.inner_solution.s);
    o.residual = psi_of(bank, o.mu, o.beta, o.s).norm();
    if (o.residual <= (1.0 - epsilon * lambda) * state.residual_norm) {
      return o;
    }
    lambda *= 0.5;
  }
  return std::nullopt;
}

detail::InnerOracle simplex_oracle(const RectifierBank& bank, double p_total,
                                   const SolverOptions& opts) {
  return [&bank, p_total, opts](const Eigen::VectorXd& mu,
                                const Eigen::VectorXd& beta,
                                const Eigen::VectorXd& warm) {
    return solve_inner(bank, mu, beta, p_total, opts, &warm).s;
  };
}

}  // namespace

double reduce_to_aggregate(const Eigen::VectorXd& q_a) {
  for (Eigen::Index n = 0; n < q_a.size(); ++n) {
    if (!(q_a(n) >= 0.0) || !std::isfinite(q_a(n))) {
      throw std::domain_error("received powers must be finite and non-negative");
    }
  }
  return q_a.sum();
}

AggregateSplit solve_inner(const RectifierBank& bank, const Eigen::VectorXd& mu,
                           const Eigen::VectorXd& beta, double p_total,
                           const SolverOptions& opts,
                           const Eigen::VectorXd* warm_start) {
  const auto L = static_cast<Eigen::Index>(bank.size());
  if (L < 1) {
    throw std::invalid_argument("empty rectifier bank");
  }
  if (mu.size() != L || beta.size() != L) {
    throw std::invalid_argument("parameter length must match bank size");
  }
  if ((mu.array() < 0.0).any() || (beta.array() < 0.0).any()) {
    throw std::domain_error("parameters must be non-negative");
  }
  if (!(mu.array() > 0.0).any()) {
    throw std::domain_error("all mu are zero: the objective is constant");
  }
  if (!(p_total >= 0.0) || !std::isfinite(p_total)) {
    throw std::domain_error("total power must be finite and non-negative");
  }

  AggregateSplit out;
  out.p_total = p_total;
  if (p_total == 0.0) {
    out.s = Eigen::VectorXd::Zero(L);
    return out;
  }

  auto objective = [&](const Eigen::VectorXd& s) {
    double f = 0.0;
    for (Eigen::Index l = 0; l < L; ++l) {
      f += mu(l) * (bank[l].q_max_tilde - beta(l) * (1.0 + exp_term(bank[l], s(l))));
    }
    return f;
  };
  auto gradient = [&](const Eigen::VectorXd& s, Eigen::VectorXd& g) {
    for (Eigen::Index l = 0; l < L; ++l) {
      g(l) = mu(l) * beta(l) * bank[l].a * exp_term(bank[l], s(l));
    }
  };

  // per-coordinate gradient is w_l e^{-a_l (s_l - b_l)}
  Eigen::VectorXd w(L);
  for (Eigen::Index l = 0; l < L; ++l) {
    w(l) = mu(l) * beta(l) * bank[l].a;
  }
  if (w.maxCoeff() <= 0.0) {
    // objective does not depend on s; pick the symmetric point
    out.s = Eigen::VectorXd::Constant(L, p_total / static_cast<double>(L));
    return out;
  }

  // A warm point that already satisfies the optimality conditions is
  // returned bit-for-bit, which keeps exact fixed points stable across
  // repeated solves.
  if (warm_start != nullptr) {
    Eigen::VectorXd s0 = project_simplex(*warm_start, p_total);
    Eigen::VectorXd g(L);
    gradient(s0, g);
    const double kkt = (s0 - project_simplex(s0 + g, p_total)).norm();
    if (kkt <= opts.inner_tol * (1.0 + std::abs(objective(s0)))) {
      out.s = std::move(s0);
      return out;
    }
  }

  // The objective is separable and strictly concave in every coordinate with
  // w_l > 0, so the maximizer solves g_l(s_l) = nu on the active set for the
  // threshold nu matching the power budget: a 1-D monotone root-finding
  // problem in log(nu), solved by bisection to machine precision.
  const auto split_at = [&](double log_nu, Eigen::VectorXd& s) {
    double sum = 0.0;
    for (Eigen::Index l = 0; l < L; ++l) {
      double v = 0.0;
      if (w(l) > 0.0) {
        v = bank[l].b + (std::log(w(l)) - log_nu) / bank[l].a;
        v = std::clamp(v, 0.0, p_total);
      }
      s(l) = v;
      sum += v;
    }
    return sum;
  };

  double log_hi = std::log(w(0)) + bank[0].a * bank[0].b;
  for (Eigen::Index l = 1; l < L; ++l) {
    if (w(l) > 0.0) {
      log_hi = std::max(log_hi, std::log(w(l)) + bank[l].a * bank[l].b);
    }
  }
  Eigen::VectorXd s(L);
  double log_lo = log_hi - 1.0;
  double width = 1.0;
  while (split_at(log_lo, s) < p_total && width < 1e6) {
    width *= 2.0;
    log_lo = log_hi - width;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (log_lo + log_hi);
    if (split_at(mid, s) >= p_total) {
      log_lo = mid;
    } else {
      log_hi = mid;
    }
  }
  split_at(log_lo, s);
  out.s = project_simplex(s, p_total);  // exact budget
  return out;
}

Eigen::VectorXd residual_psi(const RectifierBank& bank, const NewtonState& state) {
  return psi_of(bank, state.mu, state.beta, state.inner_solution.s);
}

Eigen::VectorXd newton_direction(const RectifierBank& bank, const NewtonState& state) {
  const auto L = static_cast<Eigen::Index>(bank.size());
  const Eigen::VectorXd psi = residual_psi(bank, state);
  Eigen::VectorXd dir(2 * L);
  for (Eigen::Index l = 0; l < L; ++l) {
    const double d = 1.0 + exp_term(bank[l], state.inner_solution.s(l));
    dir(l) = -psi(l) / d;
    dir(L + l) = -psi(L + l) / d;
  }
  if (!dir.allFinite()) {
    throw std::runtime_error("non-finite Newton direction");
  }
  return dir;
}

double line_search(const RectifierBank& bank, const NewtonState& state,
                   const Eigen::VectorXd& direction, double epsilon,
                   const SolverOptions& opts) {
  const auto inner = simplex_oracle(bank, state.inner_solution.p_total, opts);
  const auto outcome = try_step(bank, state, direction, epsilon, opts, inner);
  if (!outcome) {
    throw LineSearchStall(state.residual_norm, state.iter);
  }
  return outcome->lambda;
}

NewtonState newton_step(const RectifierBank& bank, const NewtonState& state,
                        const SolverOptions& opts) {
  const auto inner = simplex_oracle(bank, state.inner_solution.p_total, opts);
  const Eigen::VectorXd dir = newton_direction(bank, state);
  const auto outcome = try_step(bank, state, dir, opts.epsilon, opts, inner);
  if (!outcome) {
    throw LineSearchStall(state.residual_norm, state.iter);
  }
  NewtonState next;
  next.mu = outcome->mu;
  next.beta = outcome->beta;
  next.inner_solution = AggregateSplit{outcome->s, outcome->s.sum()};
  next.residual_norm = outcome->residual;
  next.iter = state.iter + 1;
  return next;
}

namespace detail {

void parameters_at(const RectifierBank& bank, const Eigen::VectorXd& s,
                   Eigen::VectorXd& mu, Eigen::VectorXd& beta) {
  const auto L = static_cast<Eigen::Index>(bank.size());
  mu.resize(L);
  beta.resize(L);
  for (Eigen::Index l = 0; l < L; ++l) {
    const double d = 1.0 + exp_term(bank[l], s(l));
    mu(l) = 1.0 / d;
    beta(l) = bank[l].q_max_tilde * mu(l);  // beta = q_max_tilde * mu exactly
  }
}

NewtonRun modified_newton(const RectifierBank& bank, const InnerOracle& inner,
                          Eigen::VectorXd mu0, Eigen::VectorXd beta0,
                          const Eigen::VectorXd& warm0,
                          const std::function<double(const Eigen::VectorXd&)>& objective,
                          const SolverOptions& opts, int start_id) {
  NewtonRun run;
  NewtonState st;
  st.mu = std::move(mu0);
  st.beta = std::move(beta0);
  {
    Eigen::VectorXd s = inner(st.mu, st.beta, warm0);
    st.residual_norm = psi_of(bank, st.mu, st.beta, s).norm();
    st.inner_solution = AggregateSplit{std::move(s), 0.0};
    st.inner_solution.p_total = st.inner_solution.s.sum();
  }
  run.trace.push_back({start_id, 0, st.residual_norm,
                       objective(st.inner_solution.s), 0.0});

  while (st.residual_norm > opts.delta && st.iter < opts.max_outer) {
    Eigen::VectorXd dir;
    try {
      dir = newton_direction(bank, st);
    } catch (const std::runtime_error&) {
      run.stalled = true;
      break;
    }
    const auto outcome = try_step(bank, st, dir, opts.epsilon, opts, inner);
    if (!outcome) {
      // Leave the oracle's warm state consistent with the returned iterate.
      run.stalled = true;
      Eigen::VectorXd s = inner(st.mu, st.beta, st.inner_solution.s);
      st.residual_norm = psi_of(bank, st.mu, st.beta, s).norm();
      st.inner_solution = AggregateSplit{std::move(s), 0.0};
      st.inner_solution.p_total = st.inner_solution.s.sum();
      break;
    }
    st.mu = outcome->mu;
    st.beta = outcome->beta;
    st.inner_solution = AggregateSplit{outcome->s, outcome->s.sum()};
    st.residual_norm = outcome->residual;
    ++st.iter;
    run.trace.push_back({start_id, st.iter, st.residual_norm,
                         objective(st.inner_solution.s), outcome->lambda});
  }

  run.converged = st.residual_norm <= opts.delta;
  if (run.converged) {
    // Full-step polish onto the fixed-point parameter values at the current
    // inner solution; kept only if the residual stays converged.
    Eigen::VectorXd mu_s, beta_s;
    parameters_at(bank, st.inner_solution.s, mu_s, beta_s);
    Eigen::VectorXd s_s = inner(mu_s, beta_s, st.inner_solution.s);
    const double r_s = psi_of(bank, mu_s, beta_s, s_s).norm();
    if (r_s <= opts.delta) {
      st.mu = std::move(mu_s);
      st.beta = std::move(beta_s);
      st.inner_solution = AggregateSplit{std::move(s_s), 0.0};
      st.inner_solution.p_total = st.inner_solution.s.sum();
      st.residual_norm = r_s;
    } else {
      (void)inner(st.mu, st.beta, st.inner_solution.s);
    }
  }
  run.state = std::move(st);
  run.iterations = run.state.iter;
  return run;
}

}  // namespace detail

SolveResult solve_p2(const RectifierBank& bank, const Eigen::VectorXd& q_a,
                     const SolverOptions& opts) {
  const auto L = static_cast<Eigen::Index>(bank.size());
  if (L < 1) {
    throw std::invalid_argument("empty rectifier bank");
  }
  const Eigen::Index n = q_a.size();
  if (n < 1) {
    throw std::invalid_argument("at least one receive antenna required");
  }
  const double p_total = reduce_to_aggregate(q_a);

  SolveResult out;
  if (p_total <= 0.0) {
    out.alpha.alpha = Eigen::MatrixXd::Constant(n, L, 1.0 / static_cast<double>(L));
    out.split = AggregateSplit{Eigen::VectorXd::Zero(L), 0.0};
    out.total_dc_w = 0.0;
    detail::parameters_at(bank, out.split.s, out.mu, out.beta);
    out.residual_norm = 0.0;
    out.converged = true;
    return out;
  }

  struct Start {
    Eigen::VectorXd mu, beta, warm;
  };
  std::vector<Start> starts;

  // Saturation start: the parameter values the fixed point approaches as all
  // rectifiers saturate.
  {
    Start s0;
    s0.mu = Eigen::VectorXd::Ones(L);
    s0.beta.resize(L);
    for (Eigen::Index l = 0; l < L; ++l) {
      s0.beta(l) = bank[l].q_max_tilde;
    }
    s0.warm = Eigen::VectorXd::Constant(L, p_total / static_cast<double>(L));
    starts.push_back(std::move(s0));
  }

  // k-way uniform-support candidates, largest saturation levels first. For
  // identical rectifiers these cover every stationary support pattern, so the
  // best converged run is the global optimum.
  const auto push_candidate = [&](const Eigen::VectorXd& s_c) {
    Start st;
    detail::parameters_at(bank, s_c, st.mu, st.beta);
    st.warm = s_c;
    starts.push_back(std::move(st));
  };
  std::vector<Eigen::Index> order(L);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    return bank[i].q_max_tilde > bank[j].q_max_tilde;
  });
  for (Eigen::Index k = 1; k <= L; ++k) {
    Eigen::VectorXd s_c = Eigen::VectorXd::Zero(L);
    for (Eigen::Index i = 0; i < k; ++i) {
      s_c(order[i]) = p_total / static_cast<double>(k);
    }
    push_candidate(s_c);
  }
  // For mixed banks the best single rectifier need not be the one with the
  // largest saturation level, so lump onto each distinct rectifier type.
  for (Eigen::Index l = 0; l < L; ++l) {
    if (l == order[0]) {
      continue;
    }
    const auto& r = bank[l];
    const auto& top = bank[order[0]];
    if (r.a == top.a && r.b == top.b && r.q_max == top.q_max) {
      continue;
    }
    Eigen::VectorXd s_c = Eigen::VectorXd::Zero(L);
    s_c(l) = p_total;
    push_candidate(s_c);
  }

  const auto oracle = simplex_oracle(bank, p_total, opts);
  const auto objective = [&](const Eigen::VectorXd& s) {
    return total_dc(bank, as_span(s));
  };

  std::vector<detail::NewtonRun> runs;
  runs.reserve(starts.size());
  for (std::size_t i = 0; i < starts.size(); ++i) {
    runs.push_back(detail::modified_newton(bank, oracle, starts[i].mu,
                                           starts[i].beta, starts[i].warm,
                                           objective, opts, static_cast<int>(i)));
  }

  for (const auto& run : runs) {
    out.trace.insert(out.trace.end(), run.trace.begin(), run.trace.end());
  }

  int best = -1;
  double best_obj = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (!runs[i].converged) {
      continue;
    }
    const double obj = sigmoid_sum(bank, as_span(runs[i].state.inner_solution.s));
    if (obj > best_obj) {
      best_obj = obj;
      best = static_cast<int>(i);
    }
  }
  if (best < 0) {
    // Nothing converged: report the least-bad iterate.
    int fallback = 0;
    double fb_obj = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const double obj = sigmoid_sum(bank, as_span(runs[i].state.inner_solution.s));
      if (obj > fb_obj) {
        fb_obj = obj;
        fallback = static_cast<int>(i);
      }
    }
    const auto& st = runs[fallback].state;
    out.split = AggregateSplit{st.inner_solution.s, p_total};
    out.alpha.alpha = (Eigen::VectorXd::Ones(n) * (st.inner_solution.s / p_total).transpose());
    out.total_dc_w = total_dc(bank, as_span(st.inner_solution.s));
    out.mu = st.mu;
    out.beta = st.beta;
    out.residual_norm = st.residual_norm;
    out.outer_iterations = st.iter;
    out.converged = false;
    throw SolveFailure("splitting solve did not converge from any start", out);
  }

  const auto& st = runs[best].state;
  out.split = AggregateSplit{st.inner_solution.s, p_total};
  out.alpha.alpha = (Eigen::VectorXd::Ones(n) * (st.inner_solution.s / p_total).transpose());
  out.total_dc_w = total_dc(bank, as_span(st.inner_solution.s));
  out.mu = st.mu;
  out.beta = st.beta;
  out.residual_norm = st.residual_norm;
  out.outer_iterations = st.iter;
  out.converged = true;
  return out;
}

}  // namespace wpt
