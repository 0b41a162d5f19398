// SPDX-License-Identifier: Apache-2.0
//
// wptsim: MIMO wireless power transfer with non-linear energy harvesting

#include "wpt/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "wpt/baselines.hpp"
#include "wpt/beamforming.hpp"
#include "wpt/channel.hpp"
#include "wpt/rng.hpp"

namespace wpt {

std::string to_string(Design d) {
  switch (d) {
    case Design::proposed:
      return "proposed";
    case Design::single_rectifier:
      return "single_rectifier";
    case Design::per_antenna:
      return "per_antenna";
  }
  return "unknown";
}

std::optional<Design> design_from_string(const std::string& name) {
  if (name == "proposed") return Design::proposed;
  if (name == "single_rectifier") return Design::single_rectifier;
  if (name == "per_antenna") return Design::per_antenna;
  return std::nullopt;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.m_tx < 1 || cfg.n_rx < 1 || cfg.l_rect < 1) {
    throw std::invalid_argument("antenna and rectifier counts must be at least 1");
  }
  if (!(cfg.p_max_w > 0.0)) {
    throw std::invalid_argument("p_max must be positive");
  }
  if (cfg.distances_m.empty()) {
    throw std::invalid_argument("at least one distance required");
  }
  for (const double d : cfg.distances_m) {
    if (!(d > 0.0)) {
      throw std::invalid_argument("distances must be positive");
    }
  }
  if (!(cfg.eh_a > 0.0) || !(cfg.eh_b > 0.0) || !(cfg.eh_q_max > 0.0)) {
    throw std::invalid_argument("rectifier constants must be positive");
  }
  if (!(cfg.pathloss_exponent > 0.0)) {
    throw std::invalid_argument("path loss exponent must be positive");
  }
  if (cfg.trials < 1) {
    throw std::invalid_argument("trials must be at least 1");
  }
  if (!(cfg.solver_delta > 0.0)) {
    throw std::invalid_argument("solver tolerance must be positive");
  }
  if (cfg.solver_max_outer < 1) {
    throw std::invalid_argument("solver iteration cap must be at least 1");
  }
  if (!(cfg.solver_epsilon > 0.0) || !(cfg.solver_epsilon < 1.0)) {
    throw std::invalid_argument("epsilon must lie in (0, 1)");
  }
  if (cfg.designs.empty()) {
    throw std::invalid_argument("at least one design required");
  }
  if (cfg.threads < 0) {
    throw std::invalid_argument("threads must be non-negative");
  }
}

namespace {

SolverOptions solver_options(const ExperimentConfig& cfg) {
  SolverOptions opts;
  opts.delta = cfg.solver_delta;
  opts.max_outer = cfg.solver_max_outer;
  opts.epsilon = cfg.solver_epsilon;
  return opts;
}

ChannelConfig channel_config(const ExperimentConfig& cfg, double distance,
                             std::uint64_t trial) {
  ChannelConfig cc;
  cc.distance_m = distance;
  cc.pathloss_exponent = cfg.pathloss_exponent;
  cc.ref_gain_db = cfg.ref_gain_db;
  cc.rician_k_db = cfg.rician_k_db;
  // One fading substream per trial, shared across designs, distances, and
  // rectifier counts so comparisons are paired realization by realization.
  cc.seed = rng::stream_seed(cfg.seed, trial);
  return cc;
}

struct Solved {
  double dc = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Dominant transmit beam through the smaller-sided Gram matrix: H H^H and
// H^H H share their top eigenvalue, and v = H^H u / ||H^H u|| maps the
// receive-side eigenvector back to the transmit side. Keeps the per-trial
// cost independent of large transmit arrays.
Eigen::VectorXcd dominant_beam(const ChannelMatrix& H) {
  if (H.n_tx() <= H.n_rx()) {
    return dominant_eigenvector(gram(H)).v;
  }
  const Eigen::MatrixXcd small = H.entries * H.entries.adjoint();
  const DominantEig e = dominant_eigenvector(small);
  Eigen::VectorXcd v = H.entries.adjoint() * e.v;
  const double n = v.norm();
  if (n == 0.0) {
    throw std::domain_error("zero channel: no energy can be transferred");
  }
  return v / n;
}

// Per-antenna received RF power under the rank-one beam p_max v v^H.
Eigen::VectorXd received_from_beam(const ChannelMatrix& H,
                                   const Eigen::VectorXcd& v, double p_max) {
  Eigen::VectorXd q(H.n_rx());
  const Eigen::VectorXcd hv = H.entries * v;
  for (Eigen::Index n = 0; n < H.n_rx(); ++n) {
    q(n) = p_max * std::norm(hv(n));
  }
  return q;
}

Solved solve_design(Design design, const ChannelMatrix& H,
                    const Eigen::VectorXd& q_beam, const ExperimentConfig& cfg,
                    const SolverOptions& opts) {
  try {
    switch (design) {
      case Design::proposed: {
        const RectifierBank bank =
            uniform_bank(static_cast<std::size_t>(cfg.l_rect), cfg.eh_a,
                         cfg.eh_b, cfg.eh_q_max);
        try {
          const SolveResult r = solve_p2(bank, q_beam, opts);
          return {r.total_dc_w, r.outer_iterations, true};
        } catch (const SolveFailure& f) {
          return {f.best.total_dc_w, f.best.outer_iterations, false};
        }
      }
      case Design::single_rectifier: {
        const RectifierParams rect =
            make_rectifier(cfg.eh_a, cfg.eh_b, cfg.eh_q_max);
        return {harvested_dc(rect, q_beam.sum()), 0, true};
      }
      case Design::per_antenna: {
        const RectifierBank bank =
            uniform_bank(static_cast<std::size_t>(cfg.n_rx), cfg.eh_a, cfg.eh_b,
                         cfg.eh_q_max);
        try {
          const BaselineResult r = baseline_per_antenna(H, bank, cfg.p_max_w, opts);
          return {r.total_dc_w, r.iterations, true};
        } catch (const BaselineFailure& f) {
          return {f.best.total_dc_w, f.best.iterations, false};
        }
      }
    }
  } catch (const std::exception&) {
    return {0.0, 0, false};
  }
  return {0.0, 0, false};
}

void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& body) {
  unsigned workers = threads > 0
                         ? static_cast<unsigned>(threads)
                         : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(
      std::min<std::size_t>(workers, std::max<std::size_t>(1, count)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      body(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) {
        body(i);
      }
    });
  }
  for (auto& th : pool) {
    th.join();
  }
}

int design_l(const ExperimentConfig& cfg, Design d) {
  switch (d) {
    case Design::proposed:
      return cfg.l_rect;
    case Design::single_rectifier:
      return 1;
    case Design::per_antenna:
      return cfg.n_rx;
  }
  return cfg.l_rect;
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  const SolverOptions opts = solver_options(cfg);
  const std::size_t n_designs = cfg.designs.size();
  const std::size_t n_dist = cfg.distances_m.size();
  const auto trials = static_cast<std::size_t>(cfg.trials);

  std::vector<ResultRow> rows(n_designs * n_dist * trials);
  parallel_for(n_dist * trials, cfg.threads, [&](std::size_t job) {
    const std::size_t di = job / trials;
    const auto trial = static_cast<int>(job % trials);
    const ChannelMatrix H = generate_channel(
        channel_config(cfg, cfg.distances_m[di], static_cast<std::uint64_t>(trial)),
        cfg.n_rx, cfg.m_tx);
    const Eigen::VectorXd q_beam =
        received_from_beam(H, dominant_beam(H), cfg.p_max_w);
    for (std::size_t k = 0; k < n_designs; ++k) {
      const auto t0 = std::chrono::steady_clock::now();
      const Solved s = solve_design(cfg.designs[k], H, q_beam, cfg, opts);
      ResultRow row;
      row.design = cfg.designs[k];
      row.distance_m = cfg.distances_m[di];
      row.l_rect = design_l(cfg, cfg.designs[k]);
      row.trial = trial;
      row.total_dc_w = s.dc;
      row.outer_iterations = s.iterations;
      row.converged = s.converged;
      row.wall_time_s = cfg.timing ? elapsed_s(t0) : 0.0;
      rows[(k * n_dist + di) * trials + static_cast<std::size_t>(trial)] = row;
    }
  });
  return rows;
}

std::vector<ResultRow> run_l_sweep(const ExperimentConfig& cfg,
                                   const std::vector<int>& l_values) {
  validate(cfg);
  if (l_values.empty()) {
    throw std::invalid_argument("at least one rectifier count required");
  }
  for (const int l : l_values) {
    if (l < 1) {
      throw std::invalid_argument("rectifier counts must be at least 1");
    }
  }
  const SolverOptions opts = solver_options(cfg);
  const double distance = cfg.distances_m.front();
  const auto trials = static_cast<std::size_t>(cfg.trials);

  std::vector<ResultRow> rows(l_values.size() * trials);
  parallel_for(trials, cfg.threads, [&](std::size_t job) {
    const auto trial = static_cast<int>(job);
    const ChannelMatrix H = generate_channel(
        channel_config(cfg, distance, static_cast<std::uint64_t>(trial)),
        cfg.n_rx, cfg.m_tx);
    // The beam does not depend on the rectifier count.
    const Eigen::VectorXd q =
        received_from_beam(H, dominant_beam(H), cfg.p_max_w);
    for (std::size_t li = 0; li < l_values.size(); ++li) {
      const auto t0 = std::chrono::steady_clock::now();
      const RectifierBank bank =
          uniform_bank(static_cast<std::size_t>(l_values[li]), cfg.eh_a,
                       cfg.eh_b, cfg.eh_q_max);
      ResultRow row;
      row.design = Design::proposed;
      row.distance_m = distance;
      row.l_rect = l_values[li];
      row.trial = trial;
      try {
        const SolveResult r = solve_p2(bank, q, opts);
        row.total_dc_w = r.total_dc_w;
        row.outer_iterations = r.outer_iterations;
        row.converged = true;
      } catch (const SolveFailure& f) {
        row.total_dc_w = f.best.total_dc_w;
        row.outer_iterations = f.best.outer_iterations;
        row.converged = false;
      }
      row.wall_time_s = cfg.timing ? elapsed_s(t0) : 0.0;
      rows[li * trials + static_cast<std::size_t>(trial)] = row;
    }
  });
  return rows;
}

std::vector<TraceRow> run_convergence_trace(const ExperimentConfig& cfg,
                                            int trial_index) {
  validate(cfg);
  if (trial_index < 0) {
    throw std::invalid_argument("trial index must be non-negative");
  }
  bool has_proposed = false;
  for (const Design d : cfg.designs) {
    has_proposed = has_proposed || d == Design::proposed;
  }
  if (!has_proposed) {
    throw std::invalid_argument("convergence trace requires the proposed design");
  }
  const ChannelMatrix H = generate_channel(
      channel_config(cfg, cfg.distances_m.front(),
                     static_cast<std::uint64_t>(trial_index)),
      cfg.n_rx, cfg.m_tx);
  const Eigen::VectorXd q =
      received_from_beam(H, dominant_beam(H), cfg.p_max_w);
  const RectifierBank bank = uniform_bank(static_cast<std::size_t>(cfg.l_rect),
                                          cfg.eh_a, cfg.eh_b, cfg.eh_q_max);
  try {
    return solve_p2(bank, q, solver_options(cfg)).trace;
  } catch (const SolveFailure& f) {
    return f.best.trace;
  }
}

namespace {

void append_sci(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  out += buf;
}

void append_plain(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  out += buf;
}

}  // namespace

void write_rows_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  os << "design_id,distance_m,l_rect,trial,total_dc_w,outer_iterations,"
        "converged,wall_time_s\n";
  std::string line;
  for (const auto& r : rows) {
    line.clear();
    line += to_string(r.design);
    line += ',';
    append_plain(line, r.distance_m);
    line += ',';
    line += std::to_string(r.l_rect);
    line += ',';
    line += std::to_string(r.trial);
    line += ',';
    append_sci(line, r.total_dc_w);
    line += ',';
    line += std::to_string(r.outer_iterations);
    line += ',';
    line += r.converged ? '1' : '0';
    line += ',';
    append_sci(line, r.wall_time_s);
    line += '\n';
    os << line;
  }
}

void write_means_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  using Key = std::tuple<Design, double, int>;
  struct Acc {
    double dc = 0.0;
    double iters = 0.0;
    double conv = 0.0;
    int count = 0;
  };
  std::map<Key, Acc> acc;
  std::vector<Key> order;
  for (const auto& r : rows) {
    const Key key{r.design, r.distance_m, r.l_rect};
    auto it = acc.find(key);
    if (it == acc.end()) {
      it = acc.emplace(key, Acc{}).first;
      order.push_back(key);
    }
    it->second.dc += r.total_dc_w;
    it->second.iters += r.outer_iterations;
    it->second.conv += r.converged ? 1.0 : 0.0;
    it->second.count += 1;
  }

  os << "design_id,distance_m,l_rect,trials,mean_total_dc_w,"
        "mean_outer_iterations,converged_fraction\n";
  std::string line;
  for (const auto& key : order) {
    const Acc& a = acc.at(key);
    const double n = a.count;
    line.clear();
    line += to_string(std::get<0>(key));
    line += ',';
    append_plain(line, std::get<1>(key));
    line += ',';
    line += std::to_string(std::get<2>(key));
    line += ',';
    line += std::to_string(a.count);
    line += ',';
    append_sci(line, a.dc / n);
    line += ',';
    append_sci(line, a.iters / n);
    line += ',';
    append_sci(line, a.conv / n);
    line += '\n';
    os << line;
  }
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows) {
  os << "start_id,iter,psi_norm,objective_w,step\n";
  std::string line;
  for (const auto& r : rows) {
    line.clear();
    line += std::to_string(r.start_id);
    line += ',';
    line += std::to_string(r.iter);
    line += ',';
    append_sci(line, r.psi_norm);
    line += ',';
    append_sci(line, r.objective);
    line += ',';
    append_sci(line, r.step);
    line += '\n';
    os << line;
  }
}

}  // namespace wpt
