#include "unipark/clf.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

namespace unipark {
namespace {

constexpr double kPi = std::numbers::pi;

// Central differences of V along a direction, in long double.
long double directional_fd(const PolarState<long double>& xi, const Vector3<long double>& dir,
                           long double h) {
  const Vector3<long double> x = xi.vector();
  const auto plus = PolarState<long double>::from_vector(x + h * dir);
  const auto minus = PolarState<long double>::from_vector(x - h * dir);
  return (clf_value(plus) - clf_value(minus)) / (2 * h);
}

TEST(ClfValue, Examples) {
  EXPECT_EQ(clf_value(PolarStated{0, 0, 0}), 0.0);
  EXPECT_DOUBLE_EQ(clf_value(PolarStated{1, 0, 0}), 1.0);
  // mpmath, 40 digits
  EXPECT_NEAR(clf_value(PolarStated{1, -kPi / 2, -kPi / 2}), 8.316689352572049508, 1e-13);
}

TEST(LieDerivatives, Examples) {
  auto a = lie_derivatives(PolarStated{1, 0, 0});
  EXPECT_DOUBLE_EQ(a.nu1, -2.0);
  EXPECT_DOUBLE_EQ(a.nu2, 0.0);

  auto b = lie_derivatives(PolarStated{1, 0, kPi / 2});
  EXPECT_NEAR(b.nu1, 2 * kPi, 1e-14);
  EXPECT_NEAR(b.nu2, -kPi, 1e-14);

  // Values frozen from a 40-digit finite-difference oracle (mpmath).
  auto c = lie_derivatives(PolarStated{1, -kPi / 2, -kPi / 2});
  EXPECT_NEAR(c.nu1, 7.950999333853338710, 1e-13);
  EXPECT_NEAR(c.nu2, 4.404219909268704922, 1e-13);
}

TEST(LieDerivatives, MatchFiniteDifferences) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> rho(0.01, 10.0);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  const long double h = 1e-6L;
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const PolarState<long double> xi{rho(rng), ang(rng), ang(rng)};
    const auto lie = lie_derivatives(xi);
    const long double fd1 = directional_fd(xi, velocity_field(xi), h);
    const long double fd2 = directional_fd(xi, steering_field<long double>(), h);
    const long double scale1 = std::max(1.0L, std::abs(fd1));
    const long double scale2 = std::max(1.0L, std::abs(fd2));
    worst = std::max(worst, static_cast<double>(std::abs(lie.nu1 - fd1) / scale1));
    worst = std::max(worst, static_cast<double>(std::abs(lie.nu2 - fd2) / scale2));
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(LieDerivatives, VanishOnlyAtOrigin) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> log_scale(-9.0, 1.0);
  for (int i = 0; i < 100000; ++i) {
    const double s = std::pow(10.0, log_scale(rng));
    const PolarStated xi{s * std::abs(unit(rng)) + 1e-300, s * unit(rng), s * unit(rng)};
    if (xi.norm() <= 1e-9) continue;
    const auto lie = lie_derivatives(xi);
    ASSERT_GT(std::abs(lie.nu1) + std::abs(lie.nu2), 0.0) << xi.rho << " " << xi.delta;
  }
}

TEST(ClfBounds, SandwichHolds) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> rho(0.0, 10.0);
  std::uniform_real_distribution<double> ang(-10.0, 10.0);
  for (int i = 0; i < 100000; ++i) {
    const PolarStated xi{rho(rng), ang(rng), ang(rng)};
    const double r = xi.norm();
    const double V = clf_value(xi);
    ASSERT_LE(clf_lower_bound(r), V * (1 + 1e-14));
    ASSERT_LE(V, clf_upper_bound(r) * (1 + 1e-14));
  }
}

}  // namespace
}  // namespace unipark
