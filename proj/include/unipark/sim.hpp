#ifndef UNIPARK_SIM_HPP_
#define UNIPARK_SIM_HPP_

// Fixed-step closed-loop simulation, cost accumulation and verification
// probes for the parking controllers.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "unipark/control.hpp"
#include "unipark/model.hpp"

namespace unipark {

struct SimParams {
  double dt{1e-3};
  double t_max{50.0};
  double stop_norm{1e-3};
  double rho_floor{1e-9};

  void validate() const;
};

enum class TerminalReason { kConverged, kHorizon, kRhoFloor };

std::string_view to_string(TerminalReason reason);

struct TrajectorySample {
  double t{0};
  PolarStated xi;
  CartesianPosed pose;
  ControlInputd u;
  double u1{0};  // v / rho as fed to the dynamics
  double V{0};
  double Vdot{0};  // grad V . xi_dot at the sample
  double cost_integrand{0};
  double J_running{0};
  std::optional<Eigen::Vector2d> eps_hat;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  TerminalReason terminal_reason{TerminalReason::kHorizon};

  bool converged() const { return terminal_reason == TerminalReason::kConverged; }
  const TrajectorySample& back() const { return samples.back(); }
};

/// Raised when the state turns nonfinite or leaves rho > 0 mid-step.
class SimulationError : public std::runtime_error {
 public:
  SimulationError(const std::string& what, std::size_t step, double t)
      : std::runtime_error(what), step_(step), t_(t) {}
  std::size_t step() const { return step_; }
  double time() const { return t_; }

 private:
  std::size_t step_;
  double t_;
};

struct CostTerms {
  double state{0};    // l = l_eta1(eps1 |nu1|) + l_eta2(eps2 |nu2|)
  double control{0};  // eta1(|u1| / eps1) + eta2(|omega| / eps2)
  double total() const { return state + control; }
};

/// Integrand of J = int [l + eta1(|v|/(eps1 rho)) + eta2(|w|/eps2)] dt.
/// The velocity term uses u1 = v/rho directly.
CostTerms cost_integrand(const PolarStated& xi, const ScaledControl& u,
                         const ControllerConfig& cfg);

/// Closed-loop RK4 run under cfg's feedback multiplied by input_gain.
/// Samples record the cost of the unscaled configuration.
Trajectory integrate(const PolarStated& xi0, const ControllerConfig& cfg, const SimParams& p,
                     double input_gain = 1.0);

struct CostReport {
  double J{0};
  double state_cost{0};
  double control_cost{0};
  double tail{0};  // 2 V(end), appended upper-bound estimate of the truncated tail
  bool converged{false};
  bool tail_negligible{false};  // tail < 1% of J

  double J_with_tail() const { return J + tail; }
};

/// Trapezoidal accumulation of the integrand over the samples.
CostReport evaluate_cost(const Trajectory& traj, const ControllerConfig& cfg);

/// Unnormalized quadratic cost
///   int [(eps1 nu1)^2 + (eps2 nu2)^2 + (u1/eps1)^2 + (w/eps2)^2] dt
/// with constant gains.
CostReport evaluate_quadratic_cost(const Trajectory& traj, double eps1, double eps2);

/// Co-integrates the slip-perturbed plant, adaptive feedback and update law
/// as one five-state ODE. Samples carry the estimates in eps_hat and the
/// unit-gain quadratic cost in cost_integrand / J_running.
Trajectory integrate_adaptive(const PolarStated& xi0, const AdaptiveState& a0,
                              const SlipParamsd& b, const SimParams& p);

/// Augmented norm |(rho, delta, gamma, 1/b1 - eps1_hat, 1/b2 - eps2_hat)|.
double augmented_norm(const TrajectorySample& s, const SlipParamsd& b);

struct BoundCheck {
  bool pass{false};
  double bound{0};
  double worst_margin{0};  // min over samples of bound - upsilon(t)
  std::size_t worst_index{0};
};

BoundCheck check_adaptive_bound(const Trajectory& traj, const SlipParamsd& b,
                                const AdaptiveState& a0);

struct ProbeEntry {
  double kappa{0};
  double J{0};  // lower bound when !converged
  bool converged{false};
};

/// Simulates kappa * u for each kappa and evaluates the cost of the unscaled
/// configuration. The horizon is stretched by 1/kappa for kappa < 1 since the
/// driftless closed loop traces the same path at speed kappa. Runs in parallel.
std::vector<ProbeEntry> optimality_probe(const PolarStated& xi0, const ControllerConfig& cfg,
                                         const std::vector<double>& kappa_grid,
                                         const SimParams& p);

}  // namespace unipark

#endif  // UNIPARK_SIM_HPP_
