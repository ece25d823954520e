#ifndef UNIPARK_CONTROL_HPP_
#define UNIPARK_CONTROL_HPP_

// Feedback laws built from the CLF Lie derivatives nu1, nu2:
//
//   optimal     u1 = -eps1 (eta1')^{-1}(eps1 |nu1|) sgn(nu1)
//               w  = -eps2 (eta2')^{-1}(eps2 |nu2|) sgn(nu2)
//   continuous  u1 = -eps1 [l_eta1(eps1 |nu1|) / (eps1 |nu1|)] sgn(nu1), w likewise
//   adaptive    u1 = -eps1_hat nu1,  w = -eps2_hat nu2
//
// with u1 = v / rho. Every law is evaluated in the scaled input first and
// v = rho * u1 is formed afterwards, so v -> 0 as rho -> 0 without a 0/0.

#include <functional>
#include <optional>

#include <Eigen/Core>

#include "unipark/model.hpp"
#include "unipark/penalty.hpp"

namespace unipark {

/// Control with the velocity channel scaled by 1/rho.
struct ScaledControl {
  double u1{0};
  double omega{0};
};

inline ControlInputd to_control_input(const PolarStated& xi, const ScaledControl& s) {
  return ControlInputd{xi.rho * s.u1, s.omega};
}

using GainFunction = std::function<double(const PolarStated&)>;

GainFunction constant_gain(double value);

enum class FeedbackVariant { kOptimal, kContinuous };

struct Saturation {
  double v_bar{1};
  double omega_bar{1};
  double sigma{0.1};
};

struct ControllerConfig {
  PenaltyPtr penalty1;
  PenaltyPtr penalty2;
  GainFunction eps1;
  GainFunction eps2;
  FeedbackVariant variant{FeedbackVariant::kContinuous};
  std::optional<Saturation> saturation;

  /// Throws std::invalid_argument on missing penalties/gains or sigma <= 0.
  void validate() const;
};

/// Same penalty on both channels with constant gains.
ControllerConfig make_constant_gain_config(PenaltyPtr penalty, double eps1, double eps2,
                                           FeedbackVariant variant);

/// Same penalty on both channels, gains from epsilon_schedule. For penalties
/// without a bound schedule the constant fallback gains are used.
ControllerConfig make_saturated_config(PenaltyPtr penalty, const Saturation& sat,
                                       FeedbackVariant variant, double fallback_eps1 = 1.0,
                                       double fallback_eps2 = 1.0);
ControllerConfig make_saturated_config(PenaltyPtr penalty1, PenaltyPtr penalty2,
                                       const Saturation& sat, FeedbackVariant variant,
                                       double fallback_eps1 = 1.0, double fallback_eps2 = 1.0);

struct Gains {
  double eps1{0};
  double eps2{0};
};

/// Bounded-input gain schedules.
///   LogCosine:   eps1 = (2/pi) v_bar / (sigma + rho), eps2 = 2 omega_bar / pi
///   RelayApprox: eps1 = v_bar / (sigma + rho),        eps2 = omega_bar
/// Other penalties keep the configured gains. Throws if cfg has no saturation.
Gains epsilon_schedule(double rho, const ControllerConfig& cfg);

ScaledControl optimal_scaled_feedback(const PolarStated& xi, const ControllerConfig& cfg);
ScaledControl continuous_scaled_feedback(const PolarStated& xi, const ControllerConfig& cfg);
/// Dispatches on cfg.variant.
ScaledControl scaled_feedback(const PolarStated& xi, const ControllerConfig& cfg);

ControlInputd optimal_feedback(const PolarStated& xi, const ControllerConfig& cfg);
ControlInputd continuous_feedback(const PolarStated& xi, const ControllerConfig& cfg);

/// Normalization n in K-infinity and C^1, supplied together with n'.
struct Normalization {
  std::function<double(double)> n;
  std::function<double(double)> n_prime;

  /// n(V) = n0 V.
  static Normalization linear(double n0 = 1.0);
};

struct AdaptiveState {
  double eps1_hat{0};  // estimate of 1/b1
  double eps2_hat{0};  // estimate of 1/b2
  double mu1{0.5};
  double mu2{0.5};
  Normalization normalization{Normalization::linear()};

  /// Requires mu >= 0 (mu = 0 freezes the estimate) and a normalization.
  void validate() const;
};

/// No projection: estimates of either sign are used as is.
ScaledControl adaptive_scaled_feedback(const PolarStated& xi, const AdaptiveState& a);
ControlInputd adaptive_feedback(const PolarStated& xi, const AdaptiveState& a);

/// (d eps1_hat/dt, d eps2_hat/dt) = mu_i n'(V)/(1+n(V)) nu_i^2.
Eigen::Vector2d adaptive_update(const PolarStated& xi, const AdaptiveState& a);

struct AdaptiveBoundConstants {
  double c1{0};
  double c2{0};
  double M{0};
  double m{0};
};

AdaptiveBoundConstants adaptive_bound_constants(const SlipParamsd& b, const AdaptiveState& a);

/// a1(r) = min{n(alpha1(r)), r^2}, a2(r) = max{n(alpha2(r)), r^2}.
double adaptive_a1(double r, const AdaptiveState& a);
double adaptive_a2(double r, const AdaptiveState& a);

/// Transient bound a1^{-1}(M (e^{m a2(upsilon0)} - 1)) on the augmented
/// norm |(rho, delta, gamma, eps1_tilde, eps2_tilde)|. May be +inf when the
/// exponential overflows.
double adaptive_bound(double upsilon0, const SlipParamsd& b, const AdaptiveState& a);

}  // namespace unipark

#endif  // UNIPARK_CONTROL_HPP_
