#include "unipark/cli/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

namespace unipark::cli {
namespace {

namespace fs = std::filesystem;

// Runs fn(0..n-1) on a small pool. The first exception is rethrown after
// every worker has stopped.
template <typename Fn>
void parallel_for(std::size_t n, Fn fn) {
  const std::size_t workers =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(n, 1));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void write_file(const fs::path& path, const std::string& content) {
  auto out = open_output(path);
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream os;
  write_trajectory_csv(os, traj);
  return os.str();
}

struct RunResult {
  Trajectory traj;
  RunSummary summary;
};

std::vector<RunResult> run_all(const std::vector<RunSpec>& runs, const fs::path& out_dir,
                               bool parallel) {
  std::vector<RunResult> results(runs.size());
  auto one = [&](std::size_t i) {
    results[i].traj = simulate_run(runs[i]);
    results[i].summary = summarize(runs[i].name, results[i].traj);
    write_file(out_dir / (runs[i].name + ".csv"), trajectory_csv(results[i].traj));
  };
  if (parallel) {
    parallel_for(runs.size(), one);
  } else {
    for (std::size_t i = 0; i < runs.size(); ++i) one(i);
  }
  return results;
}

void log_run(std::ostream& log, const RunSummary& s) {
  log << s.name << ": " << to_string(s.terminal_reason) << "  J=" << format_double(s.J)
      << "  peak|v|=" << format_double(s.peak_abs_v)
      << "  peak|w|=" << format_double(s.peak_abs_omega) << '\n';
}

int finish_runs(const std::vector<RunSpec>& runs, const std::vector<RunResult>& results,
                const RunOptions& opts, std::ostream& log) {
  std::vector<RunSummary> rows;
  for (const auto& r : results) rows.push_back(r.summary);
  std::ostringstream os;
  write_summary_csv(os, rows);
  write_file(opts.out_dir / "summary.csv", os.str());
  int code = kExitOk;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (!opts.quiet) log_run(log, results[i].summary);
    if (runs[i].scenario->require_convergence && !results[i].traj.converged()) {
      log << "error: " << runs[i].name << " did not converge\n";
      code = kExitNotConverged;
    }
  }
  return code;
}

double peak_effort(const RunSummary& s) { return std::max(s.peak_abs_v, s.peak_abs_omega); }

int run_compare(const std::vector<Scenario>& scenarios, const RunOptions& opts,
                std::ostream& log) {
  if (scenarios.size() < 2) throw ConfigError("compare needs at least two scenarios");
  const std::size_t n_ic = scenarios.front().ics.size();
  for (const auto& s : scenarios) {
    if (s.ics.size() != n_ic) throw ConfigError("compare needs the same ICs in every scenario");
  }
  const auto runs = expand_runs(scenarios);
  const auto results = run_all(runs, opts.out_dir, true);
  // runs are grouped by scenario, ICs in order
  std::ostringstream os;
  os << "ic,name,peak_abs_v,peak_abs_omega,reduction_vs_" << scenarios.front().name << '\n';
  for (std::size_t k = 0; k < n_ic; ++k) {
    const double base = peak_effort(results[k].summary);
    for (std::size_t j = 0; j < scenarios.size(); ++j) {
      const auto& s = results[j * n_ic + k].summary;
      os << '"' << scenarios[j].ics[k].label << "\"," << s.name << ','
         << format_double(s.peak_abs_v) << ',' << format_double(s.peak_abs_omega) << ','
         << format_double(base / peak_effort(s)) << '\n';
    }
  }
  write_file(opts.out_dir / "compare.csv", os.str());
  return finish_runs(runs, results, opts, log);
}

int run_adaptive(const std::vector<Scenario>& scenarios, const RunOptions& opts,
                 std::ostream& log) {
  if (std::none_of(scenarios.begin(), scenarios.end(), [](const auto& s) { return s.adaptive(); })) {
    throw ConfigError("adaptive needs at least one scenario with controller = adaptive");
  }
  const auto runs = expand_runs(scenarios);
  const auto results = run_all(runs, opts.out_dir, true);
  std::ostringstream os;
  os << "name,eps1_hat_end,eps2_hat_end,bound,worst_margin,bound_pass\n";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& s = *runs[i].scenario;
    if (!s.adaptive()) continue;
    const auto& traj = results[i].traj;
    const auto check = check_adaptive_bound(traj, s.slip, adaptive_state(s));
    const auto& eps = *traj.back().eps_hat;
    os << runs[i].name << ',' << format_double(eps(0)) << ',' << format_double(eps(1)) << ','
       << format_double(check.bound) << ',' << format_double(check.worst_margin) << ','
       << (check.pass ? "true" : "false") << '\n';
    if (!opts.quiet) {
      log << runs[i].name << ": eps_hat=(" << format_double(eps(0)) << ", "
          << format_double(eps(1)) << ")  bound " << (check.pass ? "holds" : "VIOLATED") << '\n';
    }
  }
  write_file(opts.out_dir / "adaptive.csv", os.str());
  return finish_runs(runs, results, opts, log);
}

int run_probe(const std::vector<Scenario>& scenarios, const RunOptions& opts, std::ostream& log) {
  int code = kExitOk;
  bool any = false;
  for (const auto& run : expand_runs(scenarios)) {
    const auto& s = *run.scenario;
    if (s.kappa.empty()) continue;
    if (s.adaptive()) throw ConfigError("[" + s.name + "] probe needs a non-adaptive controller");
    any = true;
    const auto table = optimality_probe(run.xi0, controller_config(s), s.kappa, s.sim);
    std::size_t argmin = 0;
    for (std::size_t i = 1; i < table.size(); ++i) {
      if (table[i].J < table[argmin].J) argmin = i;
    }
    std::ostringstream os;
    os << "kappa,J,converged,argmin\n";
    for (std::size_t i = 0; i < table.size(); ++i) {
      os << format_double(table[i].kappa) << ',' << format_double(table[i].J) << ','
         << (table[i].converged ? "true" : "false") << ',' << (i == argmin ? 1 : 0) << '\n';
      if (s.require_convergence && !table[i].converged) {
        log << "error: " << run.name << " kappa=" << table[i].kappa << " did not converge\n";
        code = kExitNotConverged;
      }
    }
    write_file(opts.out_dir / ("probe_" + run.name + ".csv"), os.str());
    if (!opts.quiet) {
      log << run.name << ": argmin kappa=" << format_double(table[argmin].kappa)
          << "  J=" << format_double(table[argmin].J) << '\n';
    }
  }
  if (!any) throw ConfigError("probe needs a scenario with a kappa grid");
  return code;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << kTrajectoryHeader << '\n';
  for (const auto& s : traj.samples) {
    const double row[] = {s.t,      s.pose.x, s.pose.y, s.pose.theta,     s.xi.rho,
                          s.xi.delta, s.xi.gamma, s.u.v, s.u.omega,       s.V,
                          s.Vdot,   s.cost_integrand, s.J_running};
    for (double v : row) out << format_double(v) << ',';
    if (s.eps_hat) {
      out << format_double((*s.eps_hat)(0)) << ',' << format_double((*s.eps_hat)(1));
    } else {
      out << ',';
    }
    out << '\n';
  }
}

std::optional<double> settling_time(const Trajectory& traj, double fraction) {
  const auto& samples = traj.samples;
  if (samples.empty()) return std::nullopt;
  const double limit = fraction * samples.front().xi.norm();
  std::size_t k = samples.size();
  while (k > 0 && samples[k - 1].xi.norm() <= limit) --k;
  if (k == samples.size()) return std::nullopt;
  return samples[k].t;
}

RunSummary summarize(std::string name, const Trajectory& traj) {
  RunSummary s;
  s.name = std::move(name);
  s.terminal_reason = traj.terminal_reason;
  s.J = traj.back().J_running;
  for (const auto& sample : traj.samples) {
    s.peak_abs_v = std::max(s.peak_abs_v, std::abs(sample.u.v));
    s.peak_abs_omega = std::max(s.peak_abs_omega, std::abs(sample.u.omega));
  }
  s.settling_time = settling_time(traj);
  return s;
}

void write_summary_csv(std::ostream& out, const std::vector<RunSummary>& rows) {
  out << kSummaryHeader << '\n';
  for (const auto& r : rows) {
    out << r.name << ',' << to_string(r.terminal_reason) << ',' << format_double(r.J) << ','
        << format_double(r.peak_abs_v) << ',' << format_double(r.peak_abs_omega) << ',';
    if (r.settling_time) out << format_double(*r.settling_time);
    out << '\n';
  }
}

std::vector<RunSpec> expand_runs(const std::vector<Scenario>& scenarios) {
  std::vector<RunSpec> runs;
  for (const auto& s : scenarios) {
    for (std::size_t k = 0; k < s.ics.size(); ++k) {
      const std::string name = s.ics.size() == 1 ? s.name : s.name + "_" + std::to_string(k + 1);
      runs.push_back(RunSpec{name, &s, s.ics[k].xi});
    }
  }
  return runs;
}

Trajectory simulate_run(const RunSpec& run) {
  const auto& s = *run.scenario;
  if (s.adaptive()) return integrate_adaptive(run.xi0, adaptive_state(s), s.slip, s.sim);
  return integrate(run.xi0, controller_config(s), s.sim);
}

void write_penalty_tables(const fs::path& out_dir) {
  for (auto kind : {BuiltinPenalty::kQuadratic, BuiltinPenalty::kHyperbolicCosine,
                    BuiltinPenalty::kLogCosine, BuiltinPenalty::kRelayApprox}) {
    const auto p = make_penalty(kind);
    std::ostringstream os;
    os << "r,eta,eta_prime,inv_eta_prime,lf\n";
    for (int i = 0; i <= 400; ++i) {
      const double r = 3.0 * i / 400;
      os << format_double(r) << ',' << format_double(p->eta(r)) << ','
         << format_double(p->eta_prime(r)) << ',' << format_double(p->inv_eta_prime(r)) << ','
         << format_double(p->lf(r)) << '\n';
    }
    write_file(out_dir / ("penalty_" + std::string(to_string(kind)) + ".csv"), os.str());
  }
}

int run(std::string_view subcommand, const RunOptions& opts, std::ostream& log) {
  try {
    std::error_code ec;
    fs::create_directories(opts.out_dir, ec);
    if (ec) throw std::runtime_error("cannot create " + opts.out_dir.string() + ": " + ec.message());
    if (subcommand == "penalty-table") {
      write_penalty_tables(opts.out_dir);
      return kExitOk;
    }
    auto scenarios = load_scenarios(opts.config);
    for (auto& s : scenarios) {
      if (opts.dt) s.sim.dt = *opts.dt;
      if (opts.t_max) s.sim.t_max = *opts.t_max;
      try {
        s.sim.validate();
      } catch (const std::invalid_argument& e) {
        throw ConfigError("[" + s.name + "] " + e.what());
      }
    }
    if (subcommand == "simulate" || subcommand == "sweep") {
      const auto runs = expand_runs(scenarios);
      const auto results = run_all(runs, opts.out_dir, subcommand == "sweep");
      return finish_runs(runs, results, opts, log);
    }
    if (subcommand == "compare") return run_compare(scenarios, opts, log);
    if (subcommand == "adaptive") return run_adaptive(scenarios, opts, log);
    if (subcommand == "probe") return run_probe(scenarios, opts, log);
    throw ConfigError("unknown subcommand '" + std::string(subcommand) + "'");
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SimulationError& e) {
    log << "simulation failed at t=" << e.time() << ": " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace unipark::cli
