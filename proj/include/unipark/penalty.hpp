#ifndef UNIPARK_PENALTY_HPP_
#define UNIPARK_PENALTY_HPP_

// Cost-on-control functions eta and their Legendre-Fenchel transforms
//
//   l_eta(r) = integral_0^r (eta')^{-1}(s) ds.
//
// eta and eta' are class K-infinity on [0, a); (eta')^{-1} maps [0, inf)
// onto [0, a). Built-in penalties provide closed forms where they exist;
// everything else falls back to bisection and adaptive quadrature.

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace unipark {

enum class BuiltinPenalty { kQuadratic, kHyperbolicCosine, kLogCosine, kRelayApprox };

std::string_view to_string(BuiltinPenalty kind);
/// Parses "Quadratic", "HyperbolicCosine", "LogCosine" or "RelayApprox".
std::optional<BuiltinPenalty> parse_builtin_penalty(std::string_view name);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

class PenaltyFunction {
 public:
  virtual ~PenaltyFunction() = default;

  virtual std::string name() const = 0;
  /// Right end a of the domain [0, a); infinity when unbounded.
  virtual double domain_limit() const = 0;
  /// Returns +inf for r >= domain_limit().
  virtual double eta(double r) const = 0;
  virtual double eta_prime(double r) const = 0;
  virtual double inv_eta_prime(double r) const;
  virtual double lf(double r) const;
  virtual std::optional<BuiltinPenalty> builtin() const { return std::nullopt; }
};

using PenaltyPtr = std::shared_ptr<const PenaltyFunction>;

// Checked entry points; both reject r < 0.
double lf_transform(const PenaltyFunction& p, double r);
double inv_eta_prime(const PenaltyFunction& p, double r);

/// Inverts eta' by bisection on [0, a] (or a doubling bracket when a = inf).
double bisect_inv_eta_prime(const PenaltyFunction& p, double r, double tol = 1e-13);
/// l_eta(r) by quadrature of p.inv_eta_prime over [0, r].
double quadrature_lf(const PenaltyFunction& p, double r, double abs_tol = 1e-10);

class QuadraticPenalty final : public PenaltyFunction {
 public:
  std::string name() const override { return "Quadratic"; }
  double domain_limit() const override { return kInfinity; }
  double eta(double r) const override;
  double eta_prime(double r) const override;
  double inv_eta_prime(double r) const override;
  double lf(double r) const override;
  std::optional<BuiltinPenalty> builtin() const override { return BuiltinPenalty::kQuadratic; }
};

class HyperbolicCosinePenalty final : public PenaltyFunction {
 public:
  std::string name() const override { return "HyperbolicCosine"; }
  double domain_limit() const override { return kInfinity; }
  double eta(double r) const override;
  double eta_prime(double r) const override;
  double inv_eta_prime(double r) const override;
  double lf(double r) const override;
  std::optional<BuiltinPenalty> builtin() const override {
    return BuiltinPenalty::kHyperbolicCosine;
  }
};

/// eta(r) = -ln(cos r) on [0, pi/2).
class LogCosinePenalty final : public PenaltyFunction {
 public:
  std::string name() const override { return "LogCosine"; }
  double domain_limit() const override;
  double eta(double r) const override;
  double eta_prime(double r) const override;
  double inv_eta_prime(double r) const override;
  double lf(double r) const override;
  std::optional<BuiltinPenalty> builtin() const override { return BuiltinPenalty::kLogCosine; }
};

/// Relay-approximating penalty on [0, 1).
///
/// eta'(r) = e / (e^{1/r} - e), which is infinitely flat at 0 and blows up
/// at r = 1; its inverse is (eta')^{-1}(s) = 1 / (1 + ln(1 + 1/s)). Neither
/// eta nor l_eta is elementary, so both are evaluated by quadrature.
class RelayApproxPenalty final : public PenaltyFunction {
 public:
  std::string name() const override { return "RelayApprox"; }
  double domain_limit() const override { return 1.0; }
  double eta(double r) const override;
  double eta_prime(double r) const override;
  double inv_eta_prime(double r) const override;
  double lf(double r) const override;
  std::optional<BuiltinPenalty> builtin() const override {
    return BuiltinPenalty::kRelayApprox;
  }
};

/// User-supplied penalty from explicit eta and eta'. Inversion and the
/// transform use the numeric fallbacks.
class CustomPenalty final : public PenaltyFunction {
 public:
  CustomPenalty(std::string name, std::function<double(double)> eta,
                std::function<double(double)> eta_prime, double domain_limit = kInfinity);

  std::string name() const override { return name_; }
  double domain_limit() const override { return limit_; }
  double eta(double r) const override;
  double eta_prime(double r) const override;

 private:
  std::string name_;
  std::function<double(double)> eta_;
  std::function<double(double)> eta_prime_;
  double limit_;
};

/// Wraps a penalty and serves lf() from a precomputed table.
///
/// The table holds exact l_eta values on a geometric grid over
/// [r_min, r_max]; lookups use cubic Hermite interpolation with the exact
/// slope (eta')^{-1}. Queries outside the grid are evaluated exactly.
/// Immutable after construction, so concurrent readers are safe.
class TabulatedPenalty final : public PenaltyFunction {
 public:
  explicit TabulatedPenalty(PenaltyPtr base, double tolerance = 1e-10, double r_min = 1e-9,
                            double r_max = 1e4, double growth = 1.01);

  std::string name() const override { return base_->name(); }
  double domain_limit() const override { return base_->domain_limit(); }
  double eta(double r) const override { return base_->eta(r); }
  double eta_prime(double r) const override { return base_->eta_prime(r); }
  double inv_eta_prime(double r) const override { return base_->inv_eta_prime(r); }
  double lf(double r) const override;
  std::optional<BuiltinPenalty> builtin() const override { return base_->builtin(); }

  const PenaltyFunction& base() const { return *base_; }
  double tolerance() const { return tolerance_; }

 private:
  PenaltyPtr base_;
  double tolerance_;
  std::vector<double> nodes_;
  std::vector<double> values_;
  std::vector<double> slopes_;
};

PenaltyPtr make_penalty(BuiltinPenalty kind);

}  // namespace unipark

#endif  // UNIPARK_PENALTY_HPP_
