#include "unipark/sim.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include "unipark/clf.hpp"
#include "unipark/integrator.hpp"

namespace unipark {
namespace {

using Vector5d = Eigen::Matrix<double, 5, 1>;

std::size_t step_budget(const SimParams& p) {
  return static_cast<std::size_t>(std::ceil(p.t_max / p.dt - 1e-9));
}

// Returns the reason to stop at xi, if any.
std::optional<TerminalReason> stop_reason(const PolarStated& xi, std::size_t k,
                                          std::size_t budget, const SimParams& p) {
  if (xi.norm() < p.stop_norm) return TerminalReason::kConverged;
  if (xi.rho < p.rho_floor) return TerminalReason::kRhoFloor;
  if (k >= budget) return TerminalReason::kHorizon;
  return std::nullopt;
}

template <typename Vector>
void require_finite(const Vector& x, std::size_t k, double t) {
  if (!x.allFinite()) {
    throw SimulationError("simulation: nonfinite state after step " + std::to_string(k), k, t);
  }
}

void fill_sample(TrajectorySample& s, double t, const PolarStated& xi, const ScaledControl& u,
                 double vdot, double integrand, const TrajectorySample* prev, double dt) {
  s.t = t;
  s.xi = xi;
  s.pose = to_cartesian(xi);
  s.u = to_control_input(xi, u);
  s.u1 = u.u1;
  s.V = clf_value(xi);
  s.Vdot = vdot;
  s.cost_integrand = integrand;
  s.J_running = prev ? prev->J_running + 0.5 * dt * (prev->cost_integrand + integrand) : 0.0;
}

ScaledControl scale(const ScaledControl& u, double gain) {
  return ScaledControl{gain * u.u1, gain * u.omega};
}

double eta_or_inf(const PenaltyFunction& p, double r) {
  return r >= p.domain_limit() ? std::numeric_limits<double>::infinity() : p.eta(r);
}

CostReport finish_report(const Trajectory& traj, double state, double control) {
  CostReport report;
  report.state_cost = state;
  report.control_cost = control;
  report.J = state + control;
  report.tail = traj.samples.empty() ? 0.0 : 2.0 * traj.back().V;
  report.converged = traj.converged();
  report.tail_negligible = report.tail <= 0.01 * report.J;
  return report;
}

}  // namespace

void SimParams::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("sim: dt must be positive");
  if (!(t_max > 0.0)) throw std::invalid_argument("sim: t_max must be positive");
  if (!(stop_norm >= 0.0)) throw std::invalid_argument("sim: stop_norm must be >= 0");
  if (!(rho_floor > 0.0)) throw std::invalid_argument("sim: rho_floor must be positive");
}

std::string_view to_string(TerminalReason reason) {
  switch (reason) {
    case TerminalReason::kConverged:
      return "converged";
    case TerminalReason::kHorizon:
      return "horizon";
    case TerminalReason::kRhoFloor:
      return "rho_floor";
  }
  return "unknown";
}

CostTerms cost_integrand(const PolarStated& xi, const ScaledControl& u,
                         const ControllerConfig& cfg) {
  const auto lie = lie_derivatives(xi);
  const double e1 = cfg.eps1(xi);
  const double e2 = cfg.eps2(xi);
  CostTerms terms;
  terms.state = cfg.penalty1->lf(e1 * std::abs(lie.nu1)) + cfg.penalty2->lf(e2 * std::abs(lie.nu2));
  terms.control = eta_or_inf(*cfg.penalty1, std::abs(u.u1) / e1) +
                  eta_or_inf(*cfg.penalty2, std::abs(u.omega) / e2);
  return terms;
}

Trajectory integrate(const PolarStated& xi0, const ControllerConfig& cfg, const SimParams& p,
                     double input_gain) {
  p.validate();
  cfg.validate();
  if (!(xi0.rho > 0.0)) throw std::domain_error("integrate: initial rho must be positive");

  auto control_at = [&](const PolarStated& xi) {
    return scale(scaled_feedback(xi, cfg), input_gain);
  };
  auto rhs = [&](const Eigen::Vector3d& x) {
    const auto xi = PolarStated::from_vector(x);
    const auto u = control_at(xi);
    return Eigen::Vector3d(polar_dynamics(xi, u.u1, u.omega));
  };

  Trajectory traj;
  const std::size_t budget = step_budget(p);
  traj.samples.reserve(std::min<std::size_t>(budget + 1, 1u << 20));
  Eigen::Vector3d x = xi0.vector();
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * p.dt;
    const auto xi = PolarStated::from_vector(x);
    const auto u = control_at(xi);
    const auto lie = lie_derivatives(xi);
    const double vdot = lie.nu1 * u.u1 + lie.nu2 * u.omega;
    TrajectorySample& s = traj.samples.emplace_back();
    const TrajectorySample* prev = k > 0 ? &traj.samples[k - 1] : nullptr;
    fill_sample(s, t, xi, u, vdot, cost_integrand(xi, u, cfg).total(), prev, p.dt);

    if (auto reason = stop_reason(xi, k, budget, p)) {
      traj.terminal_reason = *reason;
      break;
    }
    try {
      x = rk4_step(x, p.dt, rhs);
    } catch (const std::domain_error& e) {
      throw SimulationError(std::string("simulation: ") + e.what() + " during step " +
                                std::to_string(k),
                            k, t);
    }
    require_finite(x, k, t);
  }
  return traj;
}

CostReport evaluate_cost(const Trajectory& traj, const ControllerConfig& cfg) {
  cfg.validate();
  double state = 0.0;
  double control = 0.0;
  CostTerms prev;
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    const auto& s = traj.samples[k];
    const CostTerms cur = cost_integrand(s.xi, ScaledControl{s.u1, s.u.omega}, cfg);
    if (k > 0) {
      const double h = s.t - traj.samples[k - 1].t;
      state += 0.5 * h * (prev.state + cur.state);
      control += 0.5 * h * (prev.control + cur.control);
    }
    prev = cur;
  }
  return finish_report(traj, state, control);
}

CostReport evaluate_quadratic_cost(const Trajectory& traj, double eps1, double eps2) {
  if (!(eps1 > 0.0) || !(eps2 > 0.0)) throw std::invalid_argument("quadratic cost: eps > 0");
  double state = 0.0;
  double control = 0.0;
  CostTerms prev;
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    const auto& s = traj.samples[k];
    const auto lie = lie_derivatives(s.xi);
    CostTerms cur;
    cur.state = std::pow(eps1 * lie.nu1, 2) + std::pow(eps2 * lie.nu2, 2);
    cur.control = std::pow(s.u1 / eps1, 2) + std::pow(s.u.omega / eps2, 2);
    if (k > 0) {
      const double h = s.t - traj.samples[k - 1].t;
      state += 0.5 * h * (prev.state + cur.state);
      control += 0.5 * h * (prev.control + cur.control);
    }
    prev = cur;
  }
  return finish_report(traj, state, control);
}

Trajectory integrate_adaptive(const PolarStated& xi0, const AdaptiveState& a0,
                              const SlipParamsd& b, const SimParams& p) {
  p.validate();
  a0.validate();
  if (!(b.b1 > 0.0) || !(b.b2 > 0.0)) throw std::invalid_argument("integrate_adaptive: b > 0");
  if (!(xi0.rho > 0.0)) throw std::domain_error("integrate_adaptive: initial rho must be positive");

  AdaptiveState a = a0;
  auto unpack = [&a](const Vector5d& x) {
    a.eps1_hat = x(3);
    a.eps2_hat = x(4);
    return PolarStated{x(0), x(1), x(2)};
  };
  auto rhs = [&](const Vector5d& x) {
    const auto xi = unpack(x);
    const auto u = adaptive_scaled_feedback(xi, a);
    Vector5d dx;
    dx.head<3>() = slip_dynamics(xi, to_control_input(xi, u), b);
    dx.tail<2>() = adaptive_update(xi, a);
    return dx;
  };

  Trajectory traj;
  const std::size_t budget = step_budget(p);
  traj.samples.reserve(std::min<std::size_t>(budget + 1, 1u << 20));
  Vector5d x;
  x << xi0.rho, xi0.delta, xi0.gamma, a0.eps1_hat, a0.eps2_hat;
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * p.dt;
    const auto xi = unpack(x);
    const auto u = adaptive_scaled_feedback(xi, a);
    const auto lie = lie_derivatives(xi);
    const double vdot = b.b1 * lie.nu1 * u.u1 + b.b2 * lie.nu2 * u.omega;
    const double integrand = 0.5 * (lie.nu1 * lie.nu1 + lie.nu2 * lie.nu2 + u.u1 * u.u1 +
                                    u.omega * u.omega);
    TrajectorySample& s = traj.samples.emplace_back();
    const TrajectorySample* prev = k > 0 ? &traj.samples[k - 1] : nullptr;
    fill_sample(s, t, xi, u, vdot, integrand, prev, p.dt);
    s.eps_hat = Eigen::Vector2d(x(3), x(4));

    if (auto reason = stop_reason(xi, k, budget, p)) {
      traj.terminal_reason = *reason;
      break;
    }
    try {
      x = rk4_step(x, p.dt, rhs);
    } catch (const std::domain_error& e) {
      throw SimulationError(std::string("simulation: ") + e.what() + " during step " +
                                std::to_string(k),
                            k, t);
    }
    require_finite(x, k, t);
  }
  return traj;
}

double augmented_norm(const TrajectorySample& s, const SlipParamsd& b) {
  const Eigen::Vector2d hat = s.eps_hat.value_or(Eigen::Vector2d::Zero());
  Vector5d aug;
  aug << s.xi.rho, s.xi.delta, s.xi.gamma, 1.0 / b.b1 - hat(0), 1.0 / b.b2 - hat(1);
  return aug.norm();
}

BoundCheck check_adaptive_bound(const Trajectory& traj, const SlipParamsd& b,
                                const AdaptiveState& a0) {
  BoundCheck check;
  if (traj.samples.empty()) {
    check.pass = true;
    return check;
  }
  check.bound = adaptive_bound(augmented_norm(traj.samples.front(), b), b, a0);
  check.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    const double margin = check.bound - augmented_norm(traj.samples[k], b);
    if (margin < check.worst_margin) {
      check.worst_margin = margin;
      check.worst_index = k;
    }
  }
  check.pass = check.worst_margin >= 0.0;
  return check;
}

std::vector<ProbeEntry> optimality_probe(const PolarStated& xi0, const ControllerConfig& cfg,
                                         const std::vector<double>& kappa_grid,
                                         const SimParams& p) {
  for (double kappa : kappa_grid) {
    if (!(kappa > 0.0)) throw std::invalid_argument("optimality_probe: kappa must be positive");
  }
  std::vector<std::future<ProbeEntry>> runs;
  runs.reserve(kappa_grid.size());
  for (double kappa : kappa_grid) {
    runs.push_back(std::async(std::launch::async, [&, kappa] {
      SimParams scaled = p;
      scaled.t_max = p.t_max / std::min(kappa, 1.0);
      const Trajectory traj = integrate(xi0, cfg, scaled, kappa);
      const CostReport cost = evaluate_cost(traj, cfg);
      return ProbeEntry{kappa, cost.J, traj.converged()};
    }));
  }
  std::vector<ProbeEntry> table;
  table.reserve(runs.size());
  for (auto& run : runs) table.push_back(run.get());
  return table;
}

}  // namespace unipark
