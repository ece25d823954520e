#ifndef UNIPARK_CLI_RUNNER_HPP_
#define UNIPARK_CLI_RUNNER_HPP_

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "unipark/cli/config.hpp"
#include "unipark/sim.hpp"

namespace unipark::cli {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitConfig = 2, kExitNotConverged = 3 };

struct RunOptions {
  std::filesystem::path config;
  std::filesystem::path out_dir{"."};
  std::optional<double> dt;
  std::optional<double> t_max;
  bool quiet{false};
};

inline constexpr std::string_view kTrajectoryHeader =
    "t,x,y,theta,rho,delta,gamma,v,omega,V,Vdot,cost_integrand,J_running,eps1_hat,eps2_hat";
inline constexpr std::string_view kSummaryHeader =
    "name,terminal_reason,J,peak_abs_v,peak_abs_omega,settling_time";

/// %.17g, so values round-trip exactly.
std::string format_double(double x);

void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

struct RunSummary {
  std::string name;
  TerminalReason terminal_reason{TerminalReason::kHorizon};
  double J{0};
  double peak_abs_v{0};
  double peak_abs_omega{0};
  std::optional<double> settling_time;
};

/// Settling time is the first t after which |Xi| stays within fraction * |Xi(0)|.
std::optional<double> settling_time(const Trajectory& traj, double fraction = 0.02);
RunSummary summarize(std::string name, const Trajectory& traj);
void write_summary_csv(std::ostream& out, const std::vector<RunSummary>& rows);

/// One trajectory per scenario and initial condition. Single-IC scenarios keep
/// their name; otherwise runs are suffixed _1, _2, ...
struct RunSpec {
  std::string name;
  const Scenario* scenario{nullptr};
  PolarStated xi0;
};
std::vector<RunSpec> expand_runs(const std::vector<Scenario>& scenarios);

Trajectory simulate_run(const RunSpec& run);

/// Rows of r, eta, eta', (eta')^{-1}, l_eta on [0, 3] for every built-in,
/// one file per penalty.
void write_penalty_tables(const std::filesystem::path& out_dir);

/// simulate | sweep | compare | adaptive | probe | penalty-table
int run(std::string_view subcommand, const RunOptions& opts, std::ostream& log);

}  // namespace unipark::cli

#endif  // UNIPARK_CLI_RUNNER_HPP_
