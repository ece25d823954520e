#include "unipark/penalty.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "unipark/quadrature.hpp"

namespace unipark {

std::string_view to_string(BuiltinPenalty kind) {
  switch (kind) {
    case BuiltinPenalty::kQuadratic:
      return "Quadratic";
    case BuiltinPenalty::kHyperbolicCosine:
      return "HyperbolicCosine";
    case BuiltinPenalty::kLogCosine:
      return "LogCosine";
    case BuiltinPenalty::kRelayApprox:
      return "RelayApprox";
  }
  return "unknown";
}

std::optional<BuiltinPenalty> parse_builtin_penalty(std::string_view name) {
  for (auto kind : {BuiltinPenalty::kQuadratic, BuiltinPenalty::kHyperbolicCosine,
                    BuiltinPenalty::kLogCosine, BuiltinPenalty::kRelayApprox}) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

double PenaltyFunction::inv_eta_prime(double r) const { return bisect_inv_eta_prime(*this, r); }

double PenaltyFunction::lf(double r) const { return quadrature_lf(*this, r); }

double lf_transform(const PenaltyFunction& p, double r) {
  if (!(r >= 0.0)) throw std::domain_error("lf_transform: argument must be nonnegative");
  return p.lf(r);
}

double inv_eta_prime(const PenaltyFunction& p, double r) {
  if (!(r >= 0.0)) throw std::domain_error("inv_eta_prime: argument must be nonnegative");
  return p.inv_eta_prime(r);
}

double bisect_inv_eta_prime(const PenaltyFunction& p, double r, double tol) {
  if (r <= 0.0) return 0.0;
  double lo = 0.0;
  double hi = p.domain_limit();
  if (std::isinf(hi)) {
    hi = 1.0;
    while (p.eta_prime(hi) < r) {
      lo = hi;
      hi *= 2.0;
      if (std::isinf(hi)) return hi;
    }
  }
  // Only midpoints are evaluated, so a finite limit a (where eta' blows up)
  // is never touched and the open bracket [lo, a) always holds the root.
  for (int it = 0; it < 400 && hi - lo > tol * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (p.eta_prime(mid) < r) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double quadrature_lf(const PenaltyFunction& p, double r, double abs_tol) {
  if (r <= 0.0) return 0.0;
  return integrate_gauss_kronrod([&p](double s) { return p.inv_eta_prime(s); }, 0.0, r, abs_tol)
      .value;
}

// Quadratic: eta = r^2/2, (eta')^{-1} = identity, l_eta = r^2/2.

double QuadraticPenalty::eta(double r) const { return 0.5 * r * r; }
double QuadraticPenalty::eta_prime(double r) const { return r; }
double QuadraticPenalty::inv_eta_prime(double r) const { return r; }
double QuadraticPenalty::lf(double r) const { return 0.5 * r * r; }

// Hyperbolic cosine: eta = cosh r - 1, (eta')^{-1} = asinh.

double HyperbolicCosinePenalty::eta(double r) const {
  const double s = std::sinh(0.5 * r);
  return 2.0 * s * s;
}
double HyperbolicCosinePenalty::eta_prime(double r) const { return std::sinh(r); }
double HyperbolicCosinePenalty::inv_eta_prime(double r) const { return std::asinh(r); }
double HyperbolicCosinePenalty::lf(double r) const {
  // r asinh(r) - (sqrt(r^2 + 1) - 1), with the difference rewritten to avoid
  // cancellation for small r.
  const double root = std::hypot(r, 1.0);
  return r * std::asinh(r) - r * r / (root + 1.0);
}

// Log cosine: eta = -ln cos r on [0, pi/2), (eta')^{-1} = atan.

double LogCosinePenalty::domain_limit() const { return 0.5 * std::numbers::pi; }
double LogCosinePenalty::eta(double r) const {
  if (r >= domain_limit()) return kInfinity;
  return -std::log(std::cos(r));
}
double LogCosinePenalty::eta_prime(double r) const {
  if (r >= domain_limit()) return kInfinity;
  return std::tan(r);
}
double LogCosinePenalty::inv_eta_prime(double r) const { return std::atan(r); }
double LogCosinePenalty::lf(double r) const { return r * std::atan(r) - 0.5 * std::log1p(r * r); }

// Relay approximation on [0, 1).

double RelayApproxPenalty::eta(double r) const {
  if (r <= 0.0) return 0.0;
  if (r >= 1.0) return kInfinity;
  return integrate_gauss_kronrod([this](double s) { return eta_prime(s); }, 0.0, r, 1e-15)
      .value;
}
double RelayApproxPenalty::eta_prime(double r) const {
  if (r <= 0.0) return 0.0;
  if (r >= 1.0) return kInfinity;
  // e / (e^{1/r} - e) = 1 / (e^{1/r - 1} - 1)
  return 1.0 / std::expm1(1.0 / r - 1.0);
}
double RelayApproxPenalty::inv_eta_prime(double r) const {
  if (r <= 0.0) return 0.0;
  return 1.0 / (1.0 + std::log1p(1.0 / r));
}
double RelayApproxPenalty::lf(double r) const { return quadrature_lf(*this, r, 1e-15); }

CustomPenalty::CustomPenalty(std::string name, std::function<double(double)> eta,
                             std::function<double(double)> eta_prime, double domain_limit)
    : name_(std::move(name)),
      eta_(std::move(eta)),
      eta_prime_(std::move(eta_prime)),
      limit_(domain_limit) {
  if (!eta_ || !eta_prime_) throw std::invalid_argument("CustomPenalty: eta and eta' required");
  if (!(limit_ > 0.0)) throw std::invalid_argument("CustomPenalty: domain limit must be positive");
}

double CustomPenalty::eta(double r) const {
  if (r >= limit_) return kInfinity;
  return eta_(r);
}

double CustomPenalty::eta_prime(double r) const {
  if (r >= limit_) return kInfinity;
  return eta_prime_(r);
}

TabulatedPenalty::TabulatedPenalty(PenaltyPtr base, double tolerance, double r_min, double r_max,
                                   double growth)
    : base_(std::move(base)), tolerance_(tolerance) {
  if (!base_) throw std::invalid_argument("TabulatedPenalty: null base penalty");
  if (!(r_min > 0.0 && r_max > r_min && growth > 1.0)) {
    throw std::invalid_argument("TabulatedPenalty: bad grid parameters");
  }
  for (double r = r_min; r < r_max * growth; r *= growth) nodes_.push_back(r);
  const double piece_tol = tolerance_ / static_cast<double>(nodes_.size());
  auto slope = [this](double s) { return base_->inv_eta_prime(s); };
  values_.reserve(nodes_.size());
  slopes_.reserve(nodes_.size());
  values_.push_back(quadrature_lf(*base_, nodes_.front(), piece_tol));
  slopes_.push_back(slope(nodes_.front()));
  for (std::size_t k = 1; k < nodes_.size(); ++k) {
    values_.push_back(values_.back() +
                      integrate_gauss_kronrod(slope, nodes_[k - 1], nodes_[k], piece_tol).value);
    slopes_.push_back(slope(nodes_[k]));
  }
}

double TabulatedPenalty::lf(double r) const {
  if (r <= 0.0) return 0.0;
  if (r < nodes_.front() || r >= nodes_.back()) return base_->lf(r);
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), r);
  const std::size_t k = static_cast<std::size_t>(it - nodes_.begin()) - 1;
  const double h = nodes_[k + 1] - nodes_[k];
  const double t = (r - nodes_[k]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * values_[k] + (t3 - 2 * t2 + t) * h * slopes_[k] +
         (-2 * t3 + 3 * t2) * values_[k + 1] + (t3 - t2) * h * slopes_[k + 1];
}

PenaltyPtr make_penalty(BuiltinPenalty kind) {
  switch (kind) {
    case BuiltinPenalty::kQuadratic:
      return std::make_shared<QuadraticPenalty>();
    case BuiltinPenalty::kHyperbolicCosine:
      return std::make_shared<HyperbolicCosinePenalty>();
    case BuiltinPenalty::kLogCosine:
      return std::make_shared<LogCosinePenalty>();
    case BuiltinPenalty::kRelayApprox:
      return std::make_shared<RelayApproxPenalty>();
  }
  throw std::invalid_argument("make_penalty: unknown penalty");
}

}  // namespace unipark
