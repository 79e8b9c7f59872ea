#pragma once

#include <cmath>
#include <string>

#include "cgalopt/problem.hpp"
#include "cgalopt/state.hpp"
#include "cgalopt/step_rules.hpp"
#include "cgalopt/steps.hpp"

namespace cgalopt {

// ---------------------------------------------------------------------------
// Registered nonsmooth terms.

namespace prox {

/// prox_{t ||.||_1}: soft thresholding.
inline Vector l1(const Vector& z, double t) {
  return (z.array().abs() - t).max(0.0) * z.array().sign();
}

/// Euclidean projection onto the l1 ball of given radius.
inline Vector project_l1_ball(const Vector& z, double radius) {
  if (z.lpNorm<1>() <= radius) return z;
  const Vector mag = project_simplex(z.cwiseAbs(), radius);
  return mag.cwiseProduct(z.cwiseSign());
}

/// prox_{t ||.||_inf} via Moreau: z - t * proj_{l1 ball}(z / t).
inline Vector linf(const Vector& z, double t) {
  if (t == 0.0) return z;
  return z - t * project_l1_ball(z / t, 1.0);
}

/// prox_{t * s * sum max(0, 1 - z_i)}.
inline Vector hinge(const Vector& z, double t, double scale) {
  const double step = t * scale;
  Vector out(z.size());
  for (Index i = 0; i < z.size(); ++i) {
    if (z(i) >= 1.0) out(i) = z(i);
    else if (z(i) <= 1.0 - step) out(i) = z(i) + step;
    else out(i) = 1.0;
  }
  return out;
}

}  // namespace prox

/// g(Bx) = scale * ||Bx||_1.
inline NonsmoothTerm l1_term(LinearOperator map, double scale = 1.0) {
  const Index q = map.range_dim;
  NonsmoothTerm g;
  g.name = "l1";
  g.map = std::move(map);
  g.prox = [scale](const Vector& z, double t) { return prox::l1(z, t * scale); };
  g.eval = [scale](const Vector& z) { return scale * z.lpNorm<1>(); };
  g.lipschitz = scale * std::sqrt(static_cast<double>(q));
  g.center = Vector::Zero(q);
  return g;
}

/// g(Bx) = scale * ||Bx||_inf.
inline NonsmoothTerm linf_term(LinearOperator map, double scale = 1.0) {
  const Index q = map.range_dim;
  NonsmoothTerm g;
  g.name = "linf";
  g.map = std::move(map);
  g.prox = [scale](const Vector& z, double t) { return prox::linf(z, t * scale); };
  g.eval = [scale](const Vector& z) { return scale * z.lpNorm<Eigen::Infinity>(); };
  g.lipschitz = scale;
  g.center = Vector::Zero(q);
  return g;
}

/// g(Bx) = scale * sum_i max(0, 1 - (Bx)_i).
inline NonsmoothTerm hinge_term(LinearOperator map, double scale = 1.0) {
  const Index q = map.range_dim;
  NonsmoothTerm g;
  g.name = "hinge";
  g.map = std::move(map);
  g.prox = [scale](const Vector& z, double t) { return prox::hinge(z, t, scale); };
  g.eval = [scale](const Vector& z) { return scale * (1.0 - z.array()).max(0.0).sum(); };
  g.lipschitz = scale * std::sqrt(static_cast<double>(q));
  g.center = Vector::Zero(q);
  return g;
}

/// prox of the conjugate through the Moreau decomposition:
/// prox_{t g*}(w) = w - t prox_{g/t}(w / t).
inline Vector prox_conjugate(const NonsmoothTerm& g, const Vector& w, double t) {
  if (!(t > 0.0)) throw ConfigError("prox_conjugate: t must be positive");
  return w - t * g.prox(w / t, 1.0 / t);
}

// ---------------------------------------------------------------------------
// Nesterov smoothing with a Euclidean prox-function centered at `center`.

struct SmoothedTerm {
  NonsmoothTerm base;
  double beta = 1.0;
  Vector center;

  SmoothedTerm(NonsmoothTerm g, double smoothness)
      : base(std::move(g)), beta(smoothness), center(base.center) {
    if (!(beta > 0.0)) throw ConfigError("SmoothedTerm: beta must be positive");
  }
  SmoothedTerm(NonsmoothTerm g, double smoothness, Vector prox_center)
      : base(std::move(g)), beta(smoothness), center(std::move(prox_center)) {
    if (!(beta > 0.0)) throw ConfigError("SmoothedTerm: beta must be positive");
    if (center.size() != base.map.range_dim) throw ConfigError("SmoothedTerm: center dimension");
  }

  /// Maximizer u* = prox_{g*/beta}(center + Bx / beta), together with
  /// p = prox_{beta g}(beta center + Bx), so that u* = (beta center + Bx - p) / beta.
  std::pair<Vector, Vector> dual_point(const Vector& bx) const {
    const Vector shifted = beta * center + bx;
    Vector p = base.prox(shifted, beta);
    Vector u = (shifted - p) / beta;
    return {std::move(u), std::move(p)};
  }
};

/// g_beta(Bx) = max_u <Bx, u> - g*(u) - beta/2 ||u - center||^2, evaluated
/// with Fenchel-Young at the prox point instead of g*.
inline double smoothed_value(const SmoothedTerm& term, const Vector& bx) {
  const auto [u, p] = term.dual_point(bx);
  // g*(u) = <u, p> - g(p) because u is a subgradient of g at p.
  const double conj = u.dot(p) - term.base.eval(p);
  return bx.dot(u) - conj - 0.5 * term.beta * (u - term.center).squaredNorm();
}

/// Gradient of x -> g_beta(Bx):
/// B^T center + (1/beta) B^T (Bx - prox_{beta g}(beta center + Bx)).
inline Matrix smoothed_grad(const SmoothedTerm& term, const Matrix& x) {
  const Vector bx = term.base.map.forward(x);
  const Vector p = term.base.prox(term.beta * term.center + bx, term.beta);
  return term.base.map.adjoint(term.center + (bx - p) / term.beta);
}

/// Extra direction contributed by the nonsmooth term at penalty lambda with
/// dual anchor z: B^T z + lambda B^T (Bx - prox_{g/lambda}(Bx + z/lambda)).
inline Matrix composite_term_direction(const NonsmoothTerm& g, const Matrix& x, const Vector& z,
                                       double lambda) {
  const Vector bx = g.map.forward(x);
  const Vector p = g.prox(bx + z / lambda, 1.0 / lambda);
  return g.map.adjoint(z + lambda * (bx - p));
}

/// Residual Bx - prox_{g/lambda}(Bx + z/lambda) driving the z ascent step.
inline Vector composite_dual_residual(const NonsmoothTerm& g, const Vector& bx, const Vector& z,
                                      double lambda) {
  return bx - g.prox(bx + z / lambda, 1.0 / lambda);
}

enum class ZMode { kFixed, kAscent };

/// primal_direction plus the smoothed nonsmooth-term contribution at
/// smoothness 1/lambda_k, anchored at z_k.
inline Matrix composite_direction(const SolverState& state, const ProblemSpec& problem, const Vector& r) {
  if (!problem.nonsmooth) throw ConfigError("composite_direction: problem has no nonsmooth term");
  if (!state.z) throw ConfigError("composite_direction: solver state has no z");
  Matrix v = primal_direction(state, problem, r);
  v += composite_term_direction(*problem.nonsmooth, state.x, *state.z, state.lambda);
  if (!v.allFinite()) throw NumericError("composite_direction: non-finite direction");
  return v;
}

/// Dual update of the composite anchor after iteration k. `x_next` is
/// x_{k+1}. In ascent mode the step mirrors the y rule with the dual ball
/// radius D_Z = L_g and ||B|| in place of ||A||.
inline Vector dual_step_z(const Vector& z, const Matrix& x_next, int k, const ProblemSpec& problem,
                          ZMode mode, const StepRule& rule) {
  if (!problem.nonsmooth) throw ConfigError("dual_step_z: problem has no nonsmooth term");
  if (mode == ZMode::kFixed || rule.variant == DualVariant::kOff) return z;
  const NonsmoothTerm& g = *problem.nonsmooth;
  const double lambda_next = lambda_schedule(k + 1, rule.lambda0);
  const Vector d = composite_dual_residual(g, g.map.forward(x_next), z, lambda_next);
  StepRule zrule = rule;
  const double radius = g.lipschitz;
  zrule.dual_bound = [radius](int) { return radius; };
  const double sigma =
      rule.variant == DualVariant::kDecreasing
          ? dual_sigma_decr(k, zrule, z, d)
          : dual_sigma_const(k, zrule, z, d, problem.objective.lipschitz, g.map.norm_bound,
                             problem.domain.diameter);
  return dual_step(z, sigma, d);
}

}  // namespace cgalopt
