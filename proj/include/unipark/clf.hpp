#ifndef UNIPARK_CLF_HPP_
#define UNIPARK_CLF_HPP_

// Strict control Lyapunov function for the polar unicycle
//
//   V(rho, delta, gamma) = rho^2 + delta^2 + z^2,  z = gamma + atan(2 delta) / 2
//
// and its Lie derivatives along the desingularized input fields
//   gbar1 = (-rho cos gamma, sin gamma, sin gamma),  g2 = (0, 0, -1).

#include <cmath>

#include "unipark/model.hpp"

namespace unipark {

template <typename Scalar>
struct LieDerivatives {
  Scalar nu1{0};  // L_{gbar1} V
  Scalar nu2{0};  // L_{g2} V
  Scalar z{0};
};

template <typename Scalar>
Scalar clf_z(const PolarState<Scalar>& xi) {
  using std::atan;
  return xi.gamma + atan(Scalar(2) * xi.delta) / Scalar(2);
}

template <typename Scalar>
Scalar clf_value(const PolarState<Scalar>& xi) {
  const Scalar z = clf_z(xi);
  return xi.rho * xi.rho + xi.delta * xi.delta + z * z;
}

template <typename Scalar>
LieDerivatives<Scalar> lie_derivatives(const PolarState<Scalar>& xi) {
  using std::cos;
  using std::sin;
  const Scalar z = clf_z(xi);
  const Scalar d2 = Scalar(4) * xi.delta * xi.delta;
  const Scalar bracket = xi.delta + (Scalar(1) + Scalar(1) / (Scalar(1) + d2)) * z;
  const Scalar half_neg_nu1 = xi.rho * xi.rho * cos(xi.gamma) - sin(xi.gamma) * bracket;
  return LieDerivatives<Scalar>{Scalar(-2) * half_neg_nu1, Scalar(-2) * z, z};
}

template <typename Scalar>
Vector3<Scalar> velocity_field(const PolarState<Scalar>& xi) {
  using std::cos;
  using std::sin;
  const Scalar s = sin(xi.gamma);
  return Vector3<Scalar>(-xi.rho * cos(xi.gamma), s, s);
}

template <typename Scalar>
Vector3<Scalar> steering_field() {
  return Vector3<Scalar>(Scalar(0), Scalar(0), Scalar(-1));
}

// Class-K-infinity sandwich alpha1(|xi|) <= V(xi) <= alpha2(|xi|).
template <typename Scalar>
Scalar clf_lower_bound(Scalar r) {
  return r * r / Scalar(3);
}

template <typename Scalar>
Scalar clf_upper_bound(Scalar r) {
  return Scalar(3) * r * r;
}

}  // namespace unipark

#endif  // UNIPARK_CLF_HPP_
