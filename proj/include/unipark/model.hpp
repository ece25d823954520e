#ifndef UNIPARK_MODEL_HPP_
#define UNIPARK_MODEL_HPP_

// Unicycle kinematics in Cartesian and polar parking coordinates.
//
// Polar coordinates follow the parking convention
//   rho   = |(x, y)|
//   delta = mod(atan2(y, x), 2pi) - pi
//   gamma = mod(atan2(y, x) - theta, 2pi) - pi
// so that the target pose (0, 0, 0) corresponds to rho = delta = gamma = 0
// approached from the polar side.

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Core>

namespace unipark {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

template <typename Scalar>
struct CartesianPose {
  Scalar x{0};
  Scalar y{0};
  Scalar theta{0};

  Vector3<Scalar> vector() const { return Vector3<Scalar>(x, y, theta); }
};

template <typename Scalar>
struct PolarState {
  Scalar rho{0};
  Scalar delta{0};
  Scalar gamma{0};

  Vector3<Scalar> vector() const { return Vector3<Scalar>(rho, delta, gamma); }
  Scalar norm() const { return vector().norm(); }

  static PolarState from_vector(const Vector3<Scalar>& v) {
    return PolarState{v(0), v(1), v(2)};
  }
};

template <typename Scalar>
struct ControlInput {
  Scalar v{0};
  Scalar omega{0};
};

/// Unknown positive input coefficients of the slip-perturbed unicycle.
template <typename Scalar>
struct SlipParams {
  Scalar b1{1};
  Scalar b2{1};
};

using CartesianPosed = CartesianPose<double>;
using PolarStated = PolarState<double>;
using ControlInputd = ControlInput<double>;
using SlipParamsd = SlipParams<double>;

/// Wraps an angle with mod(angle, 2pi) - pi. Result lies in [-pi, pi).
template <typename Scalar>
Scalar shifted_angle(Scalar angle) {
  using std::fmod;
  const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  Scalar m = fmod(angle, two_pi);
  if (m < Scalar(0)) m += two_pi;
  // fmod of a tiny negative value can round up to exactly 2pi.
  if (m >= two_pi) m = Scalar(0);
  return m - std::numbers::pi_v<Scalar>;
}

template <typename Scalar>
PolarState<Scalar> to_polar(const CartesianPose<Scalar>& pose) {
  using std::atan2;
  using std::hypot;
  if (pose.x == Scalar(0) && pose.y == Scalar(0)) {
    throw std::domain_error("to_polar: polar chart is singular at (x, y) = (0, 0)");
  }
  const Scalar bearing = atan2(pose.y, pose.x);
  return PolarState<Scalar>{hypot(pose.x, pose.y), shifted_angle(bearing),
                            shifted_angle(bearing - pose.theta)};
}

/// Inverse of to_polar. Heading is returned as delta - gamma (not wrapped).
template <typename Scalar>
CartesianPose<Scalar> to_cartesian(const PolarState<Scalar>& xi) {
  using std::cos;
  using std::sin;
  return CartesianPose<Scalar>{-xi.rho * cos(xi.delta), -xi.rho * sin(xi.delta),
                               xi.delta - xi.gamma};
}

/// State derivative with the scaled velocity input u1 = v / rho.
template <typename Scalar>
Vector3<Scalar> polar_dynamics(const PolarState<Scalar>& xi, Scalar u1, Scalar omega) {
  using std::cos;
  using std::sin;
  if (!(xi.rho > Scalar(0))) {
    throw std::domain_error("polar_dynamics: rho must be positive");
  }
  const Scalar s = sin(xi.gamma) * u1;
  return Vector3<Scalar>(-xi.rho * cos(xi.gamma) * u1, s, s - omega);
}

/// Slip-perturbed model; takes the physical velocity v and divides by rho.
template <typename Scalar>
Vector3<Scalar> slip_dynamics(const PolarState<Scalar>& xi, const ControlInput<Scalar>& u,
                              const SlipParams<Scalar>& b) {
  using std::cos;
  using std::sin;
  if (!(xi.rho > Scalar(0))) {
    throw std::domain_error("slip_dynamics: rho must be positive");
  }
  if (!(b.b1 > Scalar(0)) || !(b.b2 > Scalar(0))) {
    throw std::invalid_argument("slip_dynamics: slip coefficients must be positive");
  }
  const Scalar s = b.b1 * (u.v / xi.rho) * sin(xi.gamma);
  return Vector3<Scalar>(-b.b1 * u.v * cos(xi.gamma), s, s - b.b2 * u.omega);
}

template <typename Scalar>
Vector3<Scalar> cartesian_dynamics(const CartesianPose<Scalar>& pose,
                                   const ControlInput<Scalar>& u) {
  using std::cos;
  using std::sin;
  return Vector3<Scalar>(u.v * cos(pose.theta), u.v * sin(pose.theta), u.omega);
}

}  // namespace unipark

#endif  // UNIPARK_MODEL_HPP_
