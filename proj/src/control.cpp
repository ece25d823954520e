#include "unipark/control.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "unipark/clf.hpp"

namespace unipark {
namespace {

double sgn(double x) { return static_cast<double>((x > 0.0) - (x < 0.0)); }

void require_positive_rho(const PolarStated& xi, const char* where) {
  if (!(xi.rho > 0.0)) throw std::domain_error(std::string(where) + ": rho must be positive");
}

// Gain for one channel under a bound schedule, or nullopt when the penalty
// has no schedule.
std::optional<double> scheduled_gain(int channel, const PenaltyFunction& p, const Saturation& sat,
                                     double rho) {
  const auto kind = p.builtin();
  if (!kind) return std::nullopt;
  const double two_over_pi = 2.0 / std::numbers::pi;
  if (*kind == BuiltinPenalty::kLogCosine) {
    return channel == 1 ? two_over_pi * sat.v_bar / (sat.sigma + rho)
                        : two_over_pi * sat.omega_bar;
  }
  if (*kind == BuiltinPenalty::kRelayApprox) {
    return channel == 1 ? sat.v_bar / (sat.sigma + rho) : sat.omega_bar;
  }
  return std::nullopt;
}

// eps * (eta')^{-1}(eps |nu|) sgn(nu)
double optimal_channel(const PenaltyFunction& p, double eps, double nu) {
  if (nu == 0.0) return 0.0;
  return eps * p.inv_eta_prime(eps * std::abs(nu)) * sgn(nu);
}

// eps * l_eta(eps |nu|) / (eps |nu|) sgn(nu), extended by 0 at nu = 0.
double continuous_channel(const PenaltyFunction& p, double eps, double nu) {
  const double r = eps * std::abs(nu);
  if (r == 0.0) return 0.0;
  return eps * (p.lf(r) / r) * sgn(nu);
}

}  // namespace

GainFunction constant_gain(double value) {
  return [value](const PolarStated&) { return value; };
}

void ControllerConfig::validate() const {
  if (!penalty1 || !penalty2) throw std::invalid_argument("controller: both penalties required");
  if (!eps1 || !eps2) throw std::invalid_argument("controller: both gain functions required");
  if (saturation) {
    if (!(saturation->sigma > 0.0)) throw std::invalid_argument("controller: sigma must be > 0");
    if (!(saturation->v_bar > 0.0) || !(saturation->omega_bar > 0.0)) {
      throw std::invalid_argument("controller: saturation limits must be > 0");
    }
  }
}

ControllerConfig make_constant_gain_config(PenaltyPtr penalty, double eps1, double eps2,
                                           FeedbackVariant variant) {
  if (!(eps1 > 0.0) || !(eps2 > 0.0)) throw std::invalid_argument("gains must be positive");
  ControllerConfig cfg;
  cfg.penalty1 = penalty;
  cfg.penalty2 = std::move(penalty);
  cfg.eps1 = constant_gain(eps1);
  cfg.eps2 = constant_gain(eps2);
  cfg.variant = variant;
  cfg.validate();
  return cfg;
}

ControllerConfig make_saturated_config(PenaltyPtr penalty, const Saturation& sat,
                                       FeedbackVariant variant, double fallback_eps1,
                                       double fallback_eps2) {
  PenaltyPtr second = penalty;
  return make_saturated_config(std::move(penalty), std::move(second), sat, variant,
                               fallback_eps1, fallback_eps2);
}

ControllerConfig make_saturated_config(PenaltyPtr penalty1, PenaltyPtr penalty2,
                                       const Saturation& sat, FeedbackVariant variant,
                                       double fallback_eps1, double fallback_eps2) {
  ControllerConfig cfg{std::move(penalty1), std::move(penalty2), constant_gain(fallback_eps1),
                       constant_gain(fallback_eps2), variant, sat};
  cfg.validate();
  const PenaltyPtr p1 = cfg.penalty1;
  if (scheduled_gain(1, *p1, sat, 1.0)) {
    cfg.eps1 = [p1, sat](const PolarStated& xi) { return *scheduled_gain(1, *p1, sat, xi.rho); };
  }
  if (scheduled_gain(2, *cfg.penalty2, sat, 1.0)) {
    cfg.eps2 = constant_gain(*scheduled_gain(2, *cfg.penalty2, sat, 1.0));
  }
  return cfg;
}

Gains epsilon_schedule(double rho, const ControllerConfig& cfg) {
  if (!cfg.saturation) throw std::invalid_argument("epsilon_schedule: saturation not configured");
  if (!(rho > 0.0)) throw std::domain_error("epsilon_schedule: rho must be positive");
  const PolarStated probe{rho, 0.0, 0.0};
  const auto g1 = scheduled_gain(1, *cfg.penalty1, *cfg.saturation, rho);
  const auto g2 = scheduled_gain(2, *cfg.penalty2, *cfg.saturation, rho);
  return Gains{g1 ? *g1 : cfg.eps1(probe), g2 ? *g2 : cfg.eps2(probe)};
}

ScaledControl optimal_scaled_feedback(const PolarStated& xi, const ControllerConfig& cfg) {
  require_positive_rho(xi, "optimal_feedback");
  const auto lie = lie_derivatives(xi);
  return ScaledControl{-optimal_channel(*cfg.penalty1, cfg.eps1(xi), lie.nu1),
                       -optimal_channel(*cfg.penalty2, cfg.eps2(xi), lie.nu2)};
}

ScaledControl continuous_scaled_feedback(const PolarStated& xi, const ControllerConfig& cfg) {
  require_positive_rho(xi, "continuous_feedback");
  const auto lie = lie_derivatives(xi);
  return ScaledControl{-continuous_channel(*cfg.penalty1, cfg.eps1(xi), lie.nu1),
                       -continuous_channel(*cfg.penalty2, cfg.eps2(xi), lie.nu2)};
}

ScaledControl scaled_feedback(const PolarStated& xi, const ControllerConfig& cfg) {
  return cfg.variant == FeedbackVariant::kOptimal ? optimal_scaled_feedback(xi, cfg)
                                                  : continuous_scaled_feedback(xi, cfg);
}

ControlInputd optimal_feedback(const PolarStated& xi, const ControllerConfig& cfg) {
  return to_control_input(xi, optimal_scaled_feedback(xi, cfg));
}

ControlInputd continuous_feedback(const PolarStated& xi, const ControllerConfig& cfg) {
  return to_control_input(xi, continuous_scaled_feedback(xi, cfg));
}

Normalization Normalization::linear(double n0) {
  if (!(n0 > 0.0)) throw std::invalid_argument("normalization: n0 must be positive");
  return Normalization{[n0](double v) { return n0 * v; }, [n0](double) { return n0; }};
}

void AdaptiveState::validate() const {
  if (!(mu1 >= 0.0) || !(mu2 >= 0.0)) throw std::invalid_argument("adaptive: mu must be >= 0");
  if (!normalization.n || !normalization.n_prime) {
    throw std::invalid_argument("adaptive: normalization n and n' required");
  }
}

ScaledControl adaptive_scaled_feedback(const PolarStated& xi, const AdaptiveState& a) {
  require_positive_rho(xi, "adaptive_feedback");
  const auto lie = lie_derivatives(xi);
  return ScaledControl{-a.eps1_hat * lie.nu1, -a.eps2_hat * lie.nu2};
}

ControlInputd adaptive_feedback(const PolarStated& xi, const AdaptiveState& a) {
  return to_control_input(xi, adaptive_scaled_feedback(xi, a));
}

Eigen::Vector2d adaptive_update(const PolarStated& xi, const AdaptiveState& a) {
  const auto lie = lie_derivatives(xi);
  const double V = clf_value(xi);
  const double k = a.normalization.n_prime(V) / (1.0 + a.normalization.n(V));
  return Eigen::Vector2d(a.mu1 * k * lie.nu1 * lie.nu1, a.mu2 * k * lie.nu2 * lie.nu2);
}

AdaptiveBoundConstants adaptive_bound_constants(const SlipParamsd& b, const AdaptiveState& a) {
  if (!(b.b1 > 0.0) || !(b.b2 > 0.0)) throw std::invalid_argument("adaptive_bound: b must be > 0");
  if (!(a.mu1 > 0.0) || !(a.mu2 > 0.0)) {
    throw std::invalid_argument("adaptive_bound: mu must be > 0");
  }
  const double k1 = b.b1 / (2.0 * a.mu1);
  const double k2 = b.b2 / (2.0 * a.mu2);
  AdaptiveBoundConstants c;
  c.c1 = std::min(k1, k2);
  c.c2 = std::max(k1, k2);
  c.M = std::max(1.0, c.c2 / c.c1);
  c.m = std::max(c.c2, 1.0 / c.c2);
  return c;
}

double adaptive_a1(double r, const AdaptiveState& a) {
  return std::min(a.normalization.n(clf_lower_bound(r)), r * r);
}

double adaptive_a2(double r, const AdaptiveState& a) {
  return std::max(a.normalization.n(clf_upper_bound(r)), r * r);
}

double adaptive_bound(double upsilon0, const SlipParamsd& b, const AdaptiveState& a) {
  if (!(upsilon0 >= 0.0)) throw std::invalid_argument("adaptive_bound: upsilon0 must be >= 0");
  const auto c = adaptive_bound_constants(b, a);
  const double target = c.M * std::expm1(c.m * adaptive_a2(upsilon0, a));
  if (target <= 0.0) return 0.0;
  if (std::isinf(target)) return kInfinity;
  // a1 is strictly increasing and unbounded: bracket, then bisect.
  double lo = 0.0;
  double hi = 1.0;
  while (adaptive_a1(hi, a) < target) {
    lo = hi;
    hi *= 2.0;
    if (std::isinf(hi)) return kInfinity;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (adaptive_a1(mid, a) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

}  // namespace unipark
