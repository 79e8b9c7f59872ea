#pragma once

#include "cgalopt/problem.hpp"
#include "cgalopt/state.hpp"

namespace cgalopt {

/// r = proj_K(Ax + y / lambda).
inline Vector compute_slack(const Vector& ax, const Vector& y, double lambda, const ConstraintSet& set) {
  if (ax.size() != y.size() || ax.size() != set.dim)
    throw ConfigError("compute_slack: dimension mismatch");
  if (!(lambda > 0.0)) throw ConfigError("compute_slack: lambda must be positive");
  if (!ax.allFinite() || !y.allFinite()) throw NumericError("compute_slack: non-finite input");
  return set.project(ax + y / lambda);
}

/// Gradient of the augmented Lagrangian in x:
/// grad f(x) + A^T (y + lambda (Ax - r)).
inline Matrix primal_direction(const SolverState& state, const ProblemSpec& problem, const Vector& r) {
  Matrix v = problem.objective.grad(state.x);
  v += problem.constraint_map.adjoint(state.y + state.lambda * (state.ax - r));
  if (!v.allFinite()) throw NumericError("primal_direction: non-finite direction");
  return v;
}

/// x + eta (s - x), with the atom kept factored.
inline Matrix primal_step(const Matrix& x, const Atom& s, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("primal_step: eta must lie in [0, 1]");
  Matrix next = (1.0 - eta) * x;
  s.add_to(next, eta);
  return next;
}

/// In-place variant used inside the solver loop.
inline void primal_step_inplace(Matrix& x, const Atom& s, double eta) {
  x *= (1.0 - eta);
  s.add_to(x, eta);
}

/// Two-argument augmented Lagrangian
/// f(x) - ||y||^2 / (2 lambda) + lambda/2 dist^2(Ax + y/lambda, K).
inline double augmented_lagrangian(const ProblemSpec& problem, const Matrix& x, const Vector& y,
                                   double lambda) {
  const Vector shifted = problem.constraint_map.forward(x) + y / lambda;
  const double dist = problem.constraint_set.distance(shifted);
  return problem.objective.eval(x) - y.squaredNorm() / (2.0 * lambda) + 0.5 * lambda * dist * dist;
}

/// Three-argument augmented Lagrangian f(x) + <y, Ax - r> + lambda/2 ||Ax - r||^2.
inline double augmented_lagrangian(const ProblemSpec& problem, const Matrix& x, const Vector& r,
                                   const Vector& y, double lambda) {
  const Vector res = problem.constraint_map.forward(x) - r;
  return problem.objective.eval(x) + y.dot(res) + 0.5 * lambda * res.squaredNorm();
}

}  // namespace cgalopt
