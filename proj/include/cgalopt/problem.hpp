#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cgalopt/atom.hpp"
#include "cgalopt/linalg.hpp"

namespace cgalopt {

/// Smooth convex term f with L_f-Lipschitz gradient.
struct SmoothObjective {
  std::function<double(const Matrix&)> eval;
  std::function<Matrix(const Matrix&)> grad;
  double lipschitz = 0.0;

  /// f(x) = <c, x>.
  static SmoothObjective linear(Matrix c) {
    auto cost = std::make_shared<const Matrix>(std::move(c));
    return {[cost](const Matrix& x) { return inner(*cost, x); },
            [cost](const Matrix&) { return *cost; }, 0.0};
  }

  /// f(x) = 0.5 * ||x - center||^2 * weight.
  static SmoothObjective quadratic(Matrix center, double weight = 1.0) {
    auto c = std::make_shared<const Matrix>(std::move(center));
    return {[c, weight](const Matrix& x) { return 0.5 * weight * (x - *c).squaredNorm(); },
            [c, weight](const Matrix& x) -> Matrix { return weight * (x - *c); }, weight};
  }
};

/// Linear map from the ambient space into R^p, with its adjoint.
struct LinearOperator {
  PointShape domain;
  Index range_dim = 0;
  std::function<Vector(const Matrix&)> forward;
  std::function<Matrix(const Vector&)> adjoint;
  /// Upper bound on the operator norm ||A||.
  double norm_bound = 0.0;

  Vector apply(const Matrix& x) const { return forward(x); }
  Matrix apply_adjoint(const Vector& u) const { return adjoint(u); }

  static LinearOperator identity(PointShape shape) {
    const Index p = shape.size();
    return {shape, p,
            [](const Matrix& x) -> Vector { return x.reshaped(); },
            [shape](const Vector& u) -> Matrix {
              Matrix m = u.reshaped(shape.rows, shape.cols);
              if (shape.symmetric) m = symmetrize(m);
              return m;
            },
            1.0};
  }

  static LinearOperator zero(PointShape shape, Index p) {
    return {shape, p,
            [p](const Matrix&) -> Vector { return Vector::Zero(p); },
            [shape](const Vector&) -> Matrix { return Matrix::Zero(shape.rows, shape.cols); },
            0.0};
  }

  /// x -> diag(x) on symmetric n x n matrices; adjoint embeds a vector on the diagonal.
  static LinearOperator diag_extraction(Index n) {
    return {PointShape::symmetric_matrix(n), n,
            [](const Matrix& x) -> Vector { return x.diagonal(); },
            [](const Vector& u) -> Matrix { return u.asDiagonal(); },
            1.0};
  }

  /// x -> x * 1 on symmetric matrices; adjoint (u 1^T + 1 u^T) / 2.
  static LinearOperator row_sum(Index n) {
    return {PointShape::symmetric_matrix(n), n,
            [](const Matrix& x) -> Vector { return x.rowwise().sum(); },
            [n](const Vector& u) -> Matrix {
              Matrix m = u.replicate(1, n);
              return 0.5 * (m + m.transpose());
            },
            std::sqrt(static_cast<double>(n))};
  }

  /// Stacks the outputs of several maps defined on the same domain.
  static LinearOperator stack(std::vector<LinearOperator> parts) {
    if (parts.empty()) throw ConfigError("stack: no operators");
    const PointShape shape = parts.front().domain;
    Index total = 0;
    double norm_sq = 0.0;
    for (const auto& part : parts) {
      if (!(part.domain == shape)) throw ConfigError("stack: operator domains differ");
      total += part.range_dim;
      norm_sq += part.norm_bound * part.norm_bound;
    }
    auto blocks = std::make_shared<const std::vector<LinearOperator>>(std::move(parts));
    return {shape, total,
            [blocks, total](const Matrix& x) -> Vector {
              Vector out(total);
              Index offset = 0;
              for (const auto& b : *blocks) {
                out.segment(offset, b.range_dim) = b.forward(x);
                offset += b.range_dim;
              }
              return out;
            },
            [blocks, shape](const Vector& u) -> Matrix {
              Matrix out = Matrix::Zero(shape.rows, shape.cols);
              Index offset = 0;
              for (const auto& b : *blocks) {
                out += b.adjoint(u.segment(offset, b.range_dim));
                offset += b.range_dim;
              }
              return out;
            },
            std::sqrt(norm_sq)};
  }
};

/// Per-call context handed to the domain's linear minimization oracle.
struct LmoContext {
  int iteration = 1;
  std::uint64_t seed = 0;
};

/// Convex compact domain, accessed through its linear minimization oracle.
struct CompactDomain {
  enum class TraceMode { kEquality, kAtMost };

  PointShape shape;
  std::function<Atom(const Matrix&, const LmoContext&)> lmo;
  /// D_X in the ambient norm.
  double diameter = 0.0;
  /// Distance-to-domain proxy, used by tests and invariant checks.
  std::function<double(const Matrix&)> membership_residual;
  /// Exact Euclidean projection, only needed by the dense reference solver.
  std::function<Matrix(const Matrix&)> project;
  /// Trace bound for spectrahedral domains (0 otherwise).
  double trace_bound = 0.0;
  TraceMode trace_mode = TraceMode::kEquality;
  bool spectrahedral = false;
};

/// Closed convex set K in R^p, accessed through its Euclidean projection.
struct ConstraintSet {
  Index dim = 0;
  std::function<Vector(const Vector&)> project;
  /// Support function sup_{r in K} <y, r>, +inf outside the barrier cone.
  /// Optional; used for duality gaps.
  std::function<double(const Vector&)> support;

  double distance(const Vector& z) const { return (z - project(z)).norm(); }
};

/// g(Bx) with g convex and L_g-Lipschitz, accessed through prox_{t g}.
struct NonsmoothTerm {
  LinearOperator map;
  std::function<Vector(const Vector&, double)> prox;
  std::function<double(const Vector&)> eval;
  double lipschitz = 0.0;
  /// Prox-function center (dual anchor); zero by default.
  Vector center;
  std::string name;
};

/// minimize f(x) + g(Bx) subject to x in X and Ax in K.
struct ProblemSpec {
  std::string name;
  SmoothObjective objective;
  LinearOperator constraint_map;
  ConstraintSet constraint_set;
  CompactDomain domain;
  std::optional<NonsmoothTerm> nonsmooth;
  std::optional<double> reference_value;

  /// Checks that all pieces agree on dimensions.
  void validate() const {
    if (!objective.eval || !objective.grad) throw ConfigError(name + ": objective oracle missing");
    if (!constraint_map.forward || !constraint_map.adjoint)
      throw ConfigError(name + ": constraint map missing");
    if (!constraint_set.project) throw ConfigError(name + ": constraint set projection missing");
    if (!domain.lmo) throw ConfigError(name + ": domain lmo missing");
    if (constraint_map.range_dim != constraint_set.dim)
      throw ConfigError(name + ": constraint map output has dimension " +
                        std::to_string(constraint_map.range_dim) + " but constraint set has " +
                        std::to_string(constraint_set.dim));
    if (!(constraint_map.domain == domain.shape))
      throw ConfigError(name + ": constraint map domain differs from the compact domain");
    if (nonsmooth) {
      if (!(nonsmooth->map.domain == domain.shape))
        throw ConfigError(name + ": nonsmooth map domain differs from the compact domain");
      if (nonsmooth->center.size() != nonsmooth->map.range_dim)
        throw ConfigError(name + ": nonsmooth center has the wrong dimension");
    }
  }

  /// f(x) + g(Bx).
  double total_objective(const Matrix& x) const {
    double value = objective.eval(x);
    if (nonsmooth) value += nonsmooth->eval(nonsmooth->map.forward(x));
    return value;
  }

  double feasibility(const Matrix& x) const {
    return constraint_set.distance(constraint_map.forward(x));
  }
};

/// Max over trials of |<Ax,u> - <x,A^T u>| relative to the larger of the two
/// inner products.
inline double check_adjoint(const LinearOperator& op, int trials, std::uint64_t rng_seed) {
  if (op.domain.rows <= 0 || op.domain.cols <= 0 || op.range_dim < 0)
    throw ConfigError("check_adjoint: invalid operator dimensions");
  Rng rng(rng_seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Matrix x = random_point(op.domain, rng);
    const Vector u = gaussian_vector(op.range_dim, rng);
    const Vector ax = op.forward(x);
    const Matrix atu = op.adjoint(u);
    if (ax.size() != op.range_dim)
      throw ConfigError("check_adjoint: forward output has dimension " + std::to_string(ax.size()) +
                        ", expected " + std::to_string(op.range_dim));
    if (atu.rows() != op.domain.rows || atu.cols() != op.domain.cols)
      throw ConfigError("check_adjoint: adjoint output has the wrong shape");
    const double lhs = ax.dot(u);
    const double rhs = inner(x, atu);
    const double scale = std::max(std::abs(lhs), std::abs(rhs)) +
                         std::numeric_limits<double>::epsilon() * ax.norm() * u.norm();
    if (scale == 0.0) continue;
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return worst;
}

/// Power iteration on A^T A. Returns sqrt of the Rayleigh quotient, which is a
/// lower estimate of ||A||; callers inflate it before using it as a bound.
inline double estimate_operator_norm(const LinearOperator& op, int iterations,
                                     std::uint64_t rng_seed) {
  if (iterations < 1) throw ConfigError("estimate_operator_norm: iterations must be >= 1");
  Rng rng(rng_seed);
  Matrix q = random_point(op.domain, rng);
  double estimate = 0.0;
  for (int it = 0; it < iterations; ++it) {
    const double qn = q.norm();
    if (qn == 0.0) return estimate;
    q /= qn;
    const Vector aq = op.forward(q);
    const double rayleigh = aq.squaredNorm();
    if (!std::isfinite(rayleigh)) throw NumericError("estimate_operator_norm: non-finite values");
    estimate = std::max(estimate, std::sqrt(rayleigh));
    if (rayleigh == 0.0) return 0.0;
    q = op.adjoint(aq);
  }
  return estimate;
}

/// Inflated norm estimate, for user-supplied maps without an analytic bound.
inline double operator_norm_bound(const LinearOperator& op, int iterations = 200,
                                  std::uint64_t rng_seed = 0, double safety = 1.01) {
  return safety * estimate_operator_norm(op, iterations, rng_seed);
}

}  // namespace cgalopt
