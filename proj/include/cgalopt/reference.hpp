#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cgalopt/problem.hpp"
#include "cgalopt/state.hpp"
#include "cgalopt/step_rules.hpp"

namespace cgalopt {

struct ReferenceSolution {
  Matrix x_star;
  double f_star = 0.0;
  Vector y_star;
  /// dist(A x*, K).
  double primal_residual = 0.0;
  /// Frank-Wolfe gap of the Lagrangian in x.
  double dual_residual = 0.0;
  /// Complementarity |sigma_K(y*) - <y*, A x*>| (fixed-point residual of z
  /// for composite problems).
  double kkt_gap = 0.0;
  long iterations = 0;
  bool converged = false;
};

struct ReferenceOptions {
  double tol = 1e-8;
  long max_iter = 2000000;
  Index max_dim = 30;
  int check_every = 50;
  /// Restart when the KKT error dropped by this factor since the last restart.
  double restart_factor = 0.2;
};

namespace detail {

/// min over the domain of <g, s>.
inline double domain_min_linear(const CompactDomain& dom, const Matrix& g) {
  if (dom.spectrahedral) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(g), Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues()(0);
    return dom.trace_mode == CompactDomain::TraceMode::kEquality ? dom.trace_bound * lmin
                                                                 : dom.trace_bound * std::min(lmin, 0.0);
  }
  const Atom s = dom.lmo(g, LmoContext{1, 0});
  return s.value(g);
}

struct KktState {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
  double objective = 0.0;

  double error(double scale) const { return std::max({primal, dual / scale, gap / scale}); }
};

inline KktState kkt_measure(const ProblemSpec& p, const Matrix& x, const Vector& y, const Vector* z) {
  KktState s;
  const Vector ax = p.constraint_map.forward(x);
  s.primal = p.constraint_set.distance(ax);
  Matrix g = p.objective.grad(x) + p.constraint_map.adjoint(y);
  if (p.nonsmooth) g += p.nonsmooth->map.adjoint(*z);
  s.dual = std::max(0.0, inner(g, x) - domain_min_linear(p.domain, g));
  const double support =
      p.constraint_set.support ? p.constraint_set.support(y) : y.dot(p.constraint_set.project(ax));
  s.gap = std::isfinite(support) ? std::abs(support - y.dot(ax)) : std::numeric_limits<double>::infinity();
  if (p.nonsmooth) {
    // z in dg(Bx)  <=>  z = prox_{g*}(z + Bx) = z + Bx - prox_g(z + Bx).
    const Vector w = *z + p.nonsmooth->map.forward(x);
    s.gap = std::max(s.gap, (w - p.nonsmooth->prox(w, 1.0) - *z).norm());
  }
  s.objective = p.total_objective(x);
  return s;
}

}  // namespace detail

/// Dense restarted primal-dual hybrid gradient on
///   min_x max_{y,z} f(x) + <y, Ax> - sigma_K(y) + <z, Bx> - g*(z),  x in X,
/// with exact projections onto X. Stops when dist(Ax, K), the Lagrangian
/// Frank-Wolfe gap and the complementarity residual are all below tol
/// (the latter two relative to 1 + |f|).
inline ReferenceSolution dense_reference_solve(const ProblemSpec& p, const ReferenceOptions& opts = {}) {
  p.validate();
  if (!(opts.tol > 0.0) || opts.max_iter < 1) throw ConfigError("reference: tol and max_iter must be positive");
  if (!p.domain.project) throw ConfigError("reference: domain has no exact projection");
  if (p.domain.shape.rows > opts.max_dim)
    throw ConfigError("reference: dimension " + std::to_string(p.domain.shape.rows) + " exceeds the dense limit " +
                      std::to_string(opts.max_dim));

  const auto& A = p.constraint_map;
  const auto& K = p.constraint_set;
  const NonsmoothTerm* g = p.nonsmooth ? &*p.nonsmooth : nullptr;
  const double norm_a = estimate_operator_norm(A, 300, 7);
  const double norm_b = g ? estimate_operator_norm(g->map, 300, 11) : 0.0;
  const double norm_total = std::max(1e-12, std::sqrt(norm_a * norm_a + norm_b * norm_b)) * 1.02;
  const double lf = p.objective.lipschitz;

  Matrix x = p.domain.project(Matrix::Zero(p.domain.shape.rows, p.domain.shape.cols));
  Vector y = Vector::Zero(A.range_dim);
  Vector z = g ? g->center : Vector();
  double omega = 1.0;  // primal weight

  Matrix x_sum = Matrix::Zero(x.rows(), x.cols());
  Vector y_sum = Vector::Zero(y.size());
  Vector z_sum = Vector::Zero(z.size());
  long since_restart = 0;
  Matrix x_anchor = x;
  Vector y_anchor = y;
  Vector z_anchor = z;
  double anchor_error = std::numeric_limits<double>::infinity();

  ReferenceSolution out;
  auto finish = [&](const Matrix& xs, const Vector& ys, const detail::KktState& s, long it) {
    out.x_star = xs;
    out.y_star = ys;
    out.f_star = s.objective;
    out.primal_residual = s.primal;
    out.dual_residual = s.dual;
    out.kkt_gap = s.gap;
    out.iterations = it;
    out.converged = true;
    return out;
  };

  detail::KktState last{};
  for (long it = 1; it <= opts.max_iter; ++it) {
    // tau (L_f/2 + sigma ||A||^2) < 1 with sigma = omega * eta, tau = eta / omega.
    const double eta = 0.95 / norm_total;
    double tau = eta / omega;
    const double sigma = eta * omega;
    if (lf > 0.0) tau = std::min(tau, 0.95 / (0.5 * lf + sigma * norm_total * norm_total));

    Matrix grad = p.objective.grad(x) + A.adjoint(y);
    if (g) grad += g->map.adjoint(z);
    const Matrix x_new = p.domain.project(x - tau * grad);
    const Matrix x_bar = 2.0 * x_new - x;
    const Vector wy = y + sigma * A.forward(x_bar);
    const Vector y_new = wy - sigma * K.project(wy / sigma);
    Vector z_new = z;
    if (g) {
      const Vector wz = z + sigma * g->map.forward(x_bar);
      z_new = wz - sigma * g->prox(wz / sigma, 1.0 / sigma);
    }
    if (!x_new.allFinite() || !y_new.allFinite()) throw NumericError("reference: iterates diverged");
    x = x_new;
    y = y_new;
    z = z_new;
    x_sum += x;
    y_sum += y;
    if (g) z_sum += z;
    ++since_restart;

    if (it % opts.check_every != 0 && it != opts.max_iter) continue;
    const detail::KktState cur = detail::kkt_measure(p, x, y, g ? &z : nullptr);
    const double scale = 1.0 + std::abs(cur.objective);
    const Matrix x_avg = x_sum / static_cast<double>(since_restart);
    const Vector y_avg = y_sum / static_cast<double>(since_restart);
    const Vector z_avg = g ? Vector(z_sum / static_cast<double>(since_restart)) : z;
    const detail::KktState avg = detail::kkt_measure(p, x_avg, y_avg, g ? &z_avg : nullptr);
    const bool use_avg = avg.error(scale) < cur.error(scale);
    const detail::KktState& best = use_avg ? avg : cur;
    last = best;
    if (best.primal <= opts.tol && best.dual <= opts.tol * scale && best.gap <= opts.tol * scale)
      return use_avg ? finish(x_avg, y_avg, avg, it) : finish(x, y, cur, it);

    const bool restart = best.error(scale) <= opts.restart_factor * anchor_error || since_restart >= 20000;
    if (restart) {
      if (use_avg) {
        x = x_avg;
        y = y_avg;
        z = z_avg;
      }
      // Primal weight update from the movement since the previous restart.
      const double dx = (x - x_anchor).norm();
      const double dy = std::sqrt((y - y_anchor).squaredNorm() + (g ? (z - z_anchor).squaredNorm() : 0.0));
      if (dx > 1e-12 && dy > 1e-12) omega = std::exp(0.5 * std::log(dy / dx) + 0.5 * std::log(omega));
      x_anchor = x;
      y_anchor = y;
      z_anchor = z;
      anchor_error = best.error(scale);
      x_sum.setZero();
      y_sum.setZero();
      z_sum.setZero();
      since_restart = 0;
    }
  }
  throw NumericError("reference: no convergence after " + std::to_string(opts.max_iter) +
                     " iterations (primal " + std::to_string(last.primal) + ", dual " +
                     std::to_string(last.dual) + ", gap " + std::to_string(last.gap) + ")");
}

// ---------------------------------------------------------------------------
// Convergence-bound checks.

struct BoundConstants {
  double diameter = 0.0;  // D_X
  std::function<double(int)> dual_bound;  // D_Y(k); empty means 0 (penalty method)
  double lipschitz_f = 0.0;
  double norm_a = 0.0;
  double lambda0 = 1.0;
  DualVariant variant = DualVariant::kConstant;

  double dual_bound_at(int k) const {
    if (variant == DualVariant::kOff || !dual_bound) return 0.0;
    return dual_bound(k);
  }
};

struct BoundReport {
  bool passed = true;
  long checked = 0;
  long violations = 0;
  long first_failing_k = -1;
  std::string first_failure;
  /// Largest (lhs - rhs) / (1 + |rhs|) seen.
  double worst_margin = -std::numeric_limits<double>::infinity();

  void note(long k, double lhs, double rhs, const char* which) {
    ++checked;
    worst_margin = std::max(worst_margin, (lhs - rhs) / (1.0 + std::abs(rhs)));
    if (lhs <= rhs) return;
    ++violations;
    if (passed) {
      passed = false;
      first_failing_k = k;
      first_failure = std::string(which) + " at k=" + std::to_string(k) + ": " + std::to_string(lhs) +
                      " > " + std::to_string(rhs);
    }
  }
};

/// The three objective / feasibility bounds evaluated on every record. A
/// record with index k describes x_{k+1}, so the bounds are taken at k+1.
/// `dual_distances[i]` is ||y - y*|| for record i; when empty the triangle
/// inequality ||y|| + ||y*|| is used instead.
inline BoundReport check_theorem1(const Trace& trace, const ReferenceSolution& ref, const BoundConstants& c,
                                  const std::vector<double>& dual_distances = {}) {
  if (!dual_distances.empty() && dual_distances.size() != trace.size())
    throw ConfigError("check_theorem1: one dual distance per record is required");
  BoundReport rep;
  const double slack = 1e-7 * (1.0 + std::abs(ref.f_star));
  const double ystar = 1.01 * ref.y_star.norm();
  const double half = c.variant == DualVariant::kDecreasing ? 0.5 : 1.0;
  const double d2 = c.diameter * c.diameter;
  const double a2 = c.norm_a * c.norm_a;
  const double c0 = c.lipschitz_f + a2 * c.lambda0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& rec = trace[i];
    const double k = static_cast<double>(rec.k + 1);
    const double sk = std::sqrt(k);
    const double dy = c.dual_bound_at(static_cast<int>(rec.k + 1));
    const double resid = rec.objective - ref.f_star;
    rep.note(rec.k, -resid, ystar * rec.feasibility + slack, "lower objective bound");
    const double upper =
        half * 4.0 * d2 * (c.lipschitz_f / k + c.lambda0 * a2 / sk) + dy * dy / (2.0 * c.lambda0 * sk) + slack;
    rep.note(rec.k, resid, upper, "upper objective bound");
    const double ydist = dual_distances.empty() ? rec.dual_norm + ystar : dual_distances[i];
    const double feas = (2.0 / c.lambda0) / sk * (0.5 * dy + ydist + std::sqrt(2.0 * half * c0 * c.lambda0 * d2)) + slack;
    rep.note(rec.k, rec.feasibility, feas, "feasibility bound");
  }
  return rep;
}

/// Full iterate after iteration k: x_{k+1}, y_{k+1} and lambda_{k+1}.
struct StateSnapshot {
  long k = 0;
  Matrix x;
  Vector y;
  double lambda = 0.0;
};

/// Augmented-Lagrangian recursion bound
///   L_{lambda_{k+1}}(x_{k+1}, r_{k+1}, y_{k+1}) - f* <= 4/(k+1) D_X^2 (L_f + lambda_{k+1} ||A||^2)
/// with r_{k+1} = proj_K(A x_{k+1} + y_{k+1} / lambda_{k+1}).
inline BoundReport check_appendix_recursion(const std::vector<StateSnapshot>& snaps, const ProblemSpec& p,
                                            const ReferenceSolution& ref, const BoundConstants& c) {
  BoundReport rep;
  const double slack = 1e-7 * (1.0 + std::abs(ref.f_star));
  for (const auto& s : snaps) {
    const Vector ax = p.constraint_map.forward(s.x);
    const Vector r = p.constraint_set.project(ax + s.y / s.lambda);
    const Vector res = ax - r;
    const double lag = p.objective.eval(s.x) + s.y.dot(res) + 0.5 * s.lambda * res.squaredNorm();
    const double bound = 4.0 / (static_cast<double>(s.k) + 1.0) * c.diameter * c.diameter *
                             (c.lipschitz_f + s.lambda * c.norm_a * c.norm_a) +
                         slack;
    rep.note(s.k, lag - ref.f_star, bound, "augmented Lagrangian bound");
  }
  return rep;
}

}  // namespace cgalopt
