#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "cgalopt/linalg.hpp"

namespace cgalopt {

/// eta_k = 2 / (k + 1).
inline double eta_schedule(int k) {
  if (k < 1) throw ConfigError("eta_schedule: k must be >= 1");
  return 2.0 / (static_cast<double>(k) + 1.0);
}

/// lambda_k = lambda0 * sqrt(k + 1).
inline double lambda_schedule(int k, double lambda0) {
  if (k < 1) throw ConfigError("lambda_schedule: k must be >= 1");
  if (!(lambda0 > 0.0)) throw ConfigError("lambda_schedule: lambda0 must be positive");
  return lambda0 * std::sqrt(static_cast<double>(k) + 1.0);
}

enum class DualVariant { kDecreasing, kConstant, kOff };

inline std::string to_string(DualVariant v) {
  switch (v) {
    case DualVariant::kDecreasing: return "decr";
    case DualVariant::kConstant: return "const";
    case DualVariant::kOff: return "off";
  }
  return "?";
}

/// Dual safeguard: which rule, lambda0, and the nondecreasing dual-norm
/// bound D_Y(k).
struct StepRule {
  DualVariant variant = DualVariant::kConstant;
  double lambda0 = 1.0;
  std::function<double(int)> dual_bound;

  double dual_bound_at(int k) const {
    return dual_bound ? dual_bound(k) : std::numeric_limits<double>::infinity();
  }

  void validate() const {
    if (!(lambda0 > 0.0)) throw ConfigError("StepRule: lambda0 must be positive");
    if (variant != DualVariant::kOff && dual_bound && !(dual_bound(1) >= 0.0))
      throw ConfigError("StepRule: dual bound must be nonnegative");
  }

  /// Constant D_Y = factor * D_X * ||A|| * lambda0.
  static std::function<double(int)> proportional_bound(double factor, double diameter,
                                                       double norm_a, double lambda0) {
    const double value = factor * diameter * norm_a * lambda0;
    return [value](int) { return value; };
  }
};

/// Largest sigma >= 0 with ||y + sigma d|| <= radius; +inf when d == 0.
inline double sigma_norm_limit(const Vector& y, const Vector& d, double radius) {
  if (y.size() != d.size()) throw ConfigError("dual step: dimension mismatch");
  const double yy = y.squaredNorm();
  const double r2 = radius * radius;
  if (std::isinf(radius)) return std::numeric_limits<double>::infinity();
  if (std::sqrt(yy) > radius * (1.0 + 1e-12) + 1e-12)
    throw InvariantError("dual step: ||y|| = " + std::to_string(std::sqrt(yy)) +
                         " exceeds the dual bound " + std::to_string(radius));
  const double dd = d.squaredNorm();
  if (dd == 0.0) return std::numeric_limits<double>::infinity();
  const double yd = y.dot(d);
  const double slack = std::max(0.0, r2 - yy);
  const double disc = yd * yd + dd * slack;
  if (!(disc >= 0.0)) return 0.0;
  const double root = std::sqrt(disc);
  // Nonnegative root of dd s^2 + 2 yd s - slack = 0, in cancellation-free form.
  if (yd > 0.0) return slack / (yd + root);
  return (root - yd) / dd;
}

/// Decreasing-bound rule: sigma <= lambda0 / (2 sqrt(k+1)) and
/// ||y + sigma d|| <= D_Y(k+1).
inline double dual_sigma_decr(int k, const StepRule& rule, const Vector& y, const Vector& d) {
  if (k < 1) throw ConfigError("dual_sigma_decr: k must be >= 1");
  const double cap = rule.lambda0 / (2.0 * std::sqrt(static_cast<double>(k) + 1.0));
  return std::min(cap, sigma_norm_limit(y, d, rule.dual_bound_at(k + 1)));
}

/// Constant-bound rule: sigma <= lambda0, ||y + sigma d|| <= D_Y(k+1) and
/// sigma ||d||^2 <= 0.5 eta_k^2 (L_f + lambda_{k+1} ||A||^2) D_X^2.
inline double dual_sigma_const(int k, const StepRule& rule, const Vector& y, const Vector& d,
                               double lipschitz_f, double norm_a, double diameter) {
  if (k < 1) throw ConfigError("dual_sigma_const: k must be >= 1");
  const double eta = eta_schedule(k);
  const double lambda_next = lambda_schedule(k + 1, rule.lambda0);
  const double growth = 0.5 * eta * eta * (lipschitz_f + lambda_next * norm_a * norm_a) *
                        diameter * diameter;
  const double dd = d.squaredNorm();
  const double sigma_growth = dd == 0.0 ? std::numeric_limits<double>::infinity() : growth / dd;
  return std::min({rule.lambda0, sigma_norm_limit(y, d, rule.dual_bound_at(k + 1)), sigma_growth});
}

/// y + sigma d.
inline Vector dual_step(const Vector& y, double sigma, const Vector& d) {
  if (y.size() != d.size()) throw ConfigError("dual_step: dimension mismatch");
  if (sigma == 0.0) return y;
  return y + sigma * d;
}

/// Left side of the parameter condition required by the decreasing-rule
/// analysis at index ell >= 2, with sigma_ell at its cap. Must be <= 0.
inline double decr_parameter_condition(int ell, double lambda0) {
  const double eta = eta_schedule(ell);
  const double eta_prev = eta_schedule(ell - 1);
  const double lam = lambda_schedule(ell, lambda0);
  const double lam_next = lambda_schedule(ell + 1, lambda0);
  const double sigma = lambda0 / (2.0 * std::sqrt(static_cast<double>(ell)));
  return 0.5 * ((1.0 - eta) * lam_next - lam) +
         (1.0 - eta_prev) * lam * lam * sigma / ((lam - sigma) * (lam - sigma));
}

}  // namespace cgalopt
