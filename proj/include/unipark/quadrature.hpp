#ifndef UNIPARK_QUADRATURE_HPP_
#define UNIPARK_QUADRATURE_HPP_

#include <functional>

namespace unipark {

struct QuadratureResult {
  double value{0};
  double error{0};
  int intervals{0};
};

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature on [a, b].
///
/// Subdivides the interval with the largest error estimate until the summed
/// estimate drops below max(abs_tol, rel_tol * |I|) or max_intervals is hit.
/// The integrand is never evaluated at the endpoints.
QuadratureResult integrate_gauss_kronrod(const std::function<double(double)>& f, double a,
                                         double b, double abs_tol = 1e-10,
                                         double rel_tol = 1e-14, int max_intervals = 4000);

}  // namespace unipark

#endif  // UNIPARK_QUADRATURE_HPP_
