#include "unipark/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace unipark {
namespace {

// QUADPACK qk15 abscissae and weights.
constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for kNodes[1], kNodes[3], kNodes[5], kNodes[7].
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment kronrod15(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kNodes[j];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[j] * sum;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * sum;
  }
  return Segment{a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace

QuadratureResult integrate_gauss_kronrod(const std::function<double(double)>& f, double a,
                                         double b, double abs_tol, double rel_tol,
                                         int max_intervals) {
  if (a == b) return {};
  std::priority_queue<Segment> heap;
  Segment first = kronrod15(f, a, b);
  double total = first.value;
  double error = first.error;
  heap.push(first);
  int intervals = 1;
  while (error > std::max(abs_tol, rel_tol * std::abs(total)) && intervals < max_intervals) {
    const Segment worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) break;  // interval no longer splittable
    heap.pop();
    const Segment left = kronrod15(f, worst.a, mid);
    const Segment right = kronrod15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
  }
  // Re-sum to shed the drift accumulated by incremental updates.
  double value = 0.0;
  double err = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  return QuadratureResult{value, err, intervals};
}

}  // namespace unipark
