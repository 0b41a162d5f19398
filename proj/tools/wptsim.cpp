// SPDX-License-Identifier: Apache-2.0
//
// wptsim: MIMO wireless power transfer with non-linear energy harvesting

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wpt/baselines.hpp"
#include "wpt/beamforming.hpp"
#include "wpt/channel.hpp"
#include "wpt/experiment.hpp"
#include "wpt/rng.hpp"
#include "wpt/splitting.hpp"

namespace {

double mw(double watts) { return watts * 1e3; }

// --- INI config ------------------------------------------------------------
// Sections group the keys ([experiment], [channel], [eh], [solver]); values
// set any ExperimentConfig field not already given on the command line.

std::map<std::string, std::string> parse_ini(const std::string& path) {
  std::ifstream is(path);
  if (!is) {
    throw std::invalid_argument("cannot open config file: " + path);
  }
  std::map<std::string, std::string> out;
  std::string line;
  std::string section;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  };
  while (std::getline(is, line)) {
    ++lineno;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) {
      line.erase(comment);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                    ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": empty key");
    }
    out[section.empty() ? key : section + "." + key] = value;
  }
  return out;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::string token;
  for (const char c : value) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!token.empty()) {
        items.push_back(token);
        token.clear();
      }
    } else {
      token += c;
    }
  }
  if (!token.empty()) {
    items.push_back(token);
  }
  return items;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) {
      throw std::invalid_argument(value);
    }
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key " + key + ": bad number '" + value + "'");
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size()) {
      throw std::invalid_argument(value);
    }
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key " + key + ": bad integer '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw std::invalid_argument("config key " + key + ": bad boolean '" + value + "'");
}

// Applies config values for options the command line did not set; rejects
// unknown keys.
void apply_config(const std::map<std::string, std::string>& ini,
                  wpt::ExperimentConfig& cfg,
                  std::vector<std::string>& design_names,
                  const std::map<std::string, const CLI::Option*>& cli_options) {
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"experiment.m_tx", [&](const std::string& k, const std::string& v) {
         cfg.m_tx = static_cast<int>(parse_int(k, v));
       }},
      {"experiment.n_rx", [&](const std::string& k, const std::string& v) {
         cfg.n_rx = static_cast<int>(parse_int(k, v));
       }},
      {"experiment.l_rect", [&](const std::string& k, const std::string& v) {
         cfg.l_rect = static_cast<int>(parse_int(k, v));
       }},
      {"experiment.p_max_w", [&](const std::string& k, const std::string& v) {
         cfg.p_max_w = parse_double(k, v);
       }},
      {"experiment.distances_m", [&](const std::string& k, const std::string& v) {
         cfg.distances_m.clear();
         for (const auto& item : split_list(v)) {
           cfg.distances_m.push_back(parse_double(k, item));
         }
       }},
      {"experiment.trials", [&](const std::string& k, const std::string& v) {
         cfg.trials = static_cast<int>(parse_int(k, v));
       }},
      {"experiment.seed", [&](const std::string& k, const std::string& v) {
         cfg.seed = static_cast<std::uint64_t>(parse_int(k, v));
       }},
      {"experiment.designs", [&](const std::string&, const std::string& v) {
         design_names = split_list(v);
       }},
      {"experiment.threads", [&](const std::string& k, const std::string& v) {
         cfg.threads = static_cast<int>(parse_int(k, v));
       }},
      {"experiment.timing", [&](const std::string& k, const std::string& v) {
         cfg.timing = parse_bool(k, v);
       }},
      {"eh.a", [&](const std::string& k, const std::string& v) {
         cfg.eh_a = parse_double(k, v);
       }},
      {"eh.b", [&](const std::string& k, const std::string& v) {
         cfg.eh_b = parse_double(k, v);
       }},
      {"eh.q_max", [&](const std::string& k, const std::string& v) {
         cfg.eh_q_max = parse_double(k, v);
       }},
      {"channel.rician_k_db", [&](const std::string& k, const std::string& v) {
         cfg.rician_k_db = parse_double(k, v);
       }},
      {"channel.ref_gain_db", [&](const std::string& k, const std::string& v) {
         cfg.ref_gain_db = parse_double(k, v);
       }},
      {"channel.pathloss_exponent", [&](const std::string& k, const std::string& v) {
         cfg.pathloss_exponent = parse_double(k, v);
       }},
      {"solver.delta", [&](const std::string& k, const std::string& v) {
         cfg.solver_delta = parse_double(k, v);
       }},
      {"solver.max_outer", [&](const std::string& k, const std::string& v) {
         cfg.solver_max_outer = static_cast<int>(parse_int(k, v));
       }},
      {"solver.epsilon", [&](const std::string& k, const std::string& v) {
         cfg.solver_epsilon = parse_double(k, v);
       }},
  };

  for (const auto& [key, value] : ini) {
    const auto setter = setters.find(key);
    if (setter == setters.end()) {
      throw std::invalid_argument("unknown config key: " + key);
    }
    const auto cli = cli_options.find(key);
    if (cli != cli_options.end() && cli->second->count() > 0) {
      continue;  // command line wins
    }
    setter->second(key, value);
  }
}

// --- output helpers ----------------------------------------------------------

std::string default_means_path(const std::string& out) {
  const std::string suffix = ".csv";
  if (out.size() > suffix.size() &&
      out.compare(out.size() - suffix.size(), suffix.size(), suffix) == 0) {
    return out.substr(0, out.size() - suffix.size()) + "_means.csv";
  }
  return out + "_means.csv";
}

bool write_file(const std::string& path,
                const std::function<void(std::ostream&)>& writer) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    std::cerr << "error: cannot open " << path << " for writing\n";
    return false;
  }
  writer(os);
  return os.good();
}

void print_vector_mw(const char* label, const Eigen::VectorXd& v) {
  std::printf("%s [", label);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    std::printf("%s%.6f", i ? ", " : "", mw(v(i)));
  }
  std::printf("] mW\n");
}

wpt::SolverOptions solver_options(const wpt::ExperimentConfig& cfg) {
  wpt::SolverOptions opts;
  opts.delta = cfg.solver_delta;
  opts.max_outer = cfg.solver_max_outer;
  opts.epsilon = cfg.solver_epsilon;
  return opts;
}

int run_solve(const wpt::ExperimentConfig& cfg, int trial) {
  using namespace wpt;
  ChannelConfig cc;
  cc.distance_m = cfg.distances_m.front();
  cc.pathloss_exponent = cfg.pathloss_exponent;
  cc.ref_gain_db = cfg.ref_gain_db;
  cc.rician_k_db = cfg.rician_k_db;
  cc.seed = rng::stream_seed(cfg.seed, static_cast<std::uint64_t>(trial));

  const ChannelMatrix H = generate_channel(cc, cfg.n_rx, cfg.m_tx);
  const TransmitCovariance X = optimal_covariance(H, cfg.p_max_w);
  const Eigen::VectorXd q = received_power_per_antenna(H, X);
  const RectifierBank bank = uniform_bank(static_cast<std::size_t>(cfg.l_rect),
                                          cfg.eh_a, cfg.eh_b, cfg.eh_q_max);

  std::printf("instance: d = %g m, M = %d, N = %d, L = %d, P_max = %g W, trial = %d\n",
              cc.distance_m, cfg.m_tx, cfg.n_rx, cfg.l_rect, cfg.p_max_w, trial);
  std::printf("path gain g = %.6e\n", path_gain(cc));
  const DominantEig eig = dominant_eigenvector(gram(H));
  std::printf("beamforming: lambda_1 = %.6e, trace(X*) = %.6f W, rank-1 beam\n",
              eig.lambda, X.matrix.trace().real());
  if (cfg.m_tx <= 8) {
    std::cout << "X* =\n" << X.matrix << "\n";
  }
  print_vector_mw("received RF per antenna:", q);
  std::printf("total received RF = %.6f mW\n", mw(q.sum()));

  int status = 0;
  SolveResult r;
  try {
    r = solve_p2(bank, q, solver_options(cfg));
  } catch (const SolveFailure& f) {
    std::printf("warning: splitting solve did not converge; reporting best iterate\n");
    r = f.best;
    status = 1;
  }
  print_vector_mw("rectifier inputs s:", r.split.s);
  if (cfg.n_rx <= 16 && cfg.l_rect <= 16) {
    std::cout << "alpha =\n" << r.alpha.alpha << "\n";
  }
  Eigen::VectorXd per_dc(r.split.s.size());
  for (Eigen::Index l = 0; l < per_dc.size(); ++l) {
    per_dc(l) = harvested_dc(bank[static_cast<std::size_t>(l)], r.split.s(l));
  }
  print_vector_mw("per-rectifier DC:", per_dc);
  std::printf("proposed total DC = %.6f mW (outer iterations %d, ||psi|| = %.3e)\n",
              mw(r.total_dc_w), r.outer_iterations, r.residual_norm);

  for (const Design d : cfg.designs) {
    if (d == Design::single_rectifier) {
      const BaselineResult b = baseline_single_rectifier(
          H, uniform_bank(1, cfg.eh_a, cfg.eh_b, cfg.eh_q_max), cfg.p_max_w);
      std::printf("single-rectifier baseline DC = %.6f mW\n", mw(b.total_dc_w));
    } else if (d == Design::per_antenna) {
      try {
        const BaselineResult b = baseline_per_antenna(
            H, uniform_bank(static_cast<std::size_t>(cfg.n_rx), cfg.eh_a,
                            cfg.eh_b, cfg.eh_q_max),
            cfg.p_max_w, solver_options(cfg));
        std::printf("per-antenna baseline DC = %.6f mW (outer iterations %d)\n",
                    mw(b.total_dc_w), b.iterations);
      } catch (const wpt::BaselineFailure& f) {
        std::printf("per-antenna baseline did not converge; best DC = %.6f mW\n",
                    mw(f.best.total_dc_w));
        status = 1;
      }
    }
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MIMO wireless power transfer simulator with adaptive power "
               "splitting under a sigmoidal non-linear harvesting model"};
  app.fallthrough();

  wpt::ExperimentConfig cfg;
  std::vector<std::string> design_names = {"proposed", "single_rectifier",
                                           "per_antenna"};
  std::string config_path;

  std::map<std::string, const CLI::Option*> cli_options;
  cli_options["experiment.m_tx"] =
      app.add_option("--m-tx", cfg.m_tx, "Transmit antennas")->capture_default_str();
  cli_options["experiment.n_rx"] =
      app.add_option("--n-rx", cfg.n_rx, "Receive antennas")->capture_default_str();
  cli_options["experiment.l_rect"] =
      app.add_option("--l-rect", cfg.l_rect,
                     "Rectifiers at the receiver (proposed design)")
          ->capture_default_str();
  cli_options["experiment.p_max_w"] =
      app.add_option("--p-max", cfg.p_max_w, "Transmit power budget in watts")
          ->capture_default_str();
  cli_options["experiment.distances_m"] =
      app.add_option("--distances", cfg.distances_m, "Distance sweep in meters");
  cli_options["experiment.trials"] =
      app.add_option("--trials", cfg.trials, "Monte Carlo trials per point")
          ->capture_default_str();
  cli_options["experiment.seed"] =
      app.add_option("--seed", cfg.seed, "Base RNG seed")->capture_default_str();
  cli_options["experiment.designs"] =
      app.add_option("--designs", design_names, "Designs to run")
          ->check(CLI::IsMember({"proposed", "single_rectifier", "per_antenna"}));
  cli_options["experiment.threads"] =
      app.add_option("--threads", cfg.threads,
                     "Worker threads (0 = hardware concurrency)")
          ->capture_default_str();
  cli_options["experiment.timing"] =
      app.add_flag("--timing", cfg.timing,
                   "Record wall-clock per solve (off keeps output byte-stable)");

  cli_options["eh.a"] =
      app.add_option("--eh-a", cfg.eh_a, "Rectifier curvature 1/W")
          ->capture_default_str();
  cli_options["eh.b"] =
      app.add_option("--eh-b", cfg.eh_b, "Rectifier turning point W")
          ->capture_default_str();
  cli_options["eh.q_max"] =
      app.add_option("--eh-qmax", cfg.eh_q_max, "Rectifier saturation DC power W")
          ->capture_default_str();

  cli_options["channel.rician_k_db"] =
      app.add_option("--rician-k-db", cfg.rician_k_db, "Rician factor in dB")
          ->capture_default_str();
  cli_options["channel.ref_gain_db"] =
      app.add_option("--ref-gain-db", cfg.ref_gain_db,
                     "Channel power gain at 1 m in dB")
          ->capture_default_str();
  cli_options["channel.pathloss_exponent"] =
      app.add_option("--pathloss-exp", cfg.pathloss_exponent, "Path loss exponent")
          ->capture_default_str();

  cli_options["solver.delta"] =
      app.add_option("--delta", cfg.solver_delta, "Outer tolerance on ||psi||")
          ->capture_default_str();
  cli_options["solver.max_outer"] =
      app.add_option("--max-outer", cfg.solver_max_outer,
                     "Outer iteration cap per start")
          ->capture_default_str();
  cli_options["solver.epsilon"] =
      app.add_option("--epsilon", cfg.solver_epsilon,
                     "Sufficient-decrease constant")
          ->capture_default_str();

  app.add_option("--config", config_path,
                 "INI config file with [experiment]/[channel]/[eh]/[solver] "
                 "sections; command-line flags win");

  std::string out = "results.csv";
  std::string means_out;
  std::string trace_out;
  std::string sweep_out = "l_sweep.csv";
  int trial = 0;
  std::vector<int> l_values = {1, 2, 3, 4};

  CLI::App* cmd_run = app.add_subcommand(
      "run", "Monte Carlo distance sweep; per-trial rows plus aggregated means");
  cmd_run->add_option("--out", out, "Row CSV path")->capture_default_str();
  cmd_run->add_option("--means-out", means_out,
                      "Means CSV path (default: <out>_means.csv)");

  CLI::App* cmd_trace = app.add_subcommand(
      "trace", "Outer-iteration convergence trace for one realization");
  cmd_trace->add_option("--trial", trial, "Trial index")->capture_default_str();
  cmd_trace->add_option("--out", trace_out, "Trace CSV path (default: stdout)");

  CLI::App* cmd_sweep = app.add_subcommand(
      "sweep-l", "Rectifier-count sweep at the first configured distance");
  cmd_sweep->add_option("--l-values", l_values, "Rectifier counts")
      ->capture_default_str();
  cmd_sweep->add_option("--out", sweep_out, "Row CSV path")->capture_default_str();

  CLI::App* cmd_solve = app.add_subcommand(
      "solve", "Solve one instance and print covariance, split, and DC");
  cmd_solve->add_option("--trial", trial, "Trial index")->capture_default_str();

  app.require_subcommand(1);
  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_path.empty()) {
      apply_config(parse_ini(config_path), cfg, design_names, cli_options);
    }
    cfg.designs.clear();
    for (const auto& name : design_names) {
      const auto d = wpt::design_from_string(name);
      if (!d) {
        throw std::invalid_argument("unknown design: " + name);
      }
      cfg.designs.push_back(*d);
    }
    wpt::validate(cfg);

    if (cmd_run->parsed()) {
      const auto rows = wpt::run_experiment(cfg);
      const std::string means_path =
          means_out.empty() ? default_means_path(out) : means_out;
      if (!write_file(out, [&](std::ostream& os) { wpt::write_rows_csv(os, rows); }) ||
          !write_file(means_path,
                      [&](std::ostream& os) { wpt::write_means_csv(os, rows); })) {
        return 3;
      }
      std::printf("wrote %zu rows to %s and means to %s\n", rows.size(),
                  out.c_str(), means_path.c_str());
    } else if (cmd_trace->parsed()) {
      const auto rows = wpt::run_convergence_trace(cfg, trial);
      if (trace_out.empty()) {
        wpt::write_trace_csv(std::cout, rows);
      } else if (!write_file(trace_out, [&](std::ostream& os) {
                   wpt::write_trace_csv(os, rows);
                 })) {
        return 3;
      }
    } else if (cmd_sweep->parsed()) {
      const auto rows = wpt::run_l_sweep(cfg, l_values);
      if (!write_file(sweep_out,
                      [&](std::ostream& os) { wpt::write_rows_csv(os, rows); })) {
        return 3;
      }
      std::printf("wrote %zu rows to %s\n", rows.size(), sweep_out.c_str());
    } else if (cmd_solve->parsed()) {
      return run_solve(cfg, trial);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
