#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "cgalopt/lanczos.hpp"
#include "cgalopt/problem.hpp"

namespace cgalopt {

using TraceMode = CompactDomain::TraceMode;

/// Side information from a spectrahedron LMO call.
struct LmoDiagnostics {
  double eigenvalue = 0.0;
  double residual = 0.0;
  bool converged = true;
  int matvecs = 0;
};

/// argmin of <x, v> over {x psd, tr x = bound} (equality) or
/// {x psd, tr x <= bound} (at-most). In at-most mode the zero matrix is
/// returned unless the estimated minimum eigenvalue is below
/// -1e-12 * ||v||_F.
inline Atom lmo_spectrahedron(const Matrix& v, double trace_bound, TraceMode mode,
                              const LanczosConfig& cfg, LmoDiagnostics* diag = nullptr) {
  if (!(trace_bound > 0.0)) throw ConfigError("lmo_spectrahedron: trace bound must be positive");
  if (v.rows() != v.cols()) throw ConfigError("lmo_spectrahedron: direction must be square");
  if (!v.allFinite()) throw NumericError("lmo_spectrahedron: non-finite direction");
  const EigenPairEstimate eig = lanczos_min_eigpair(v, cfg);
  if (diag) *diag = {eig.value, eig.residual, eig.converged, eig.matvecs};
  if (mode == TraceMode::kAtMost && !(eig.value < -1e-12 * v.norm()))
    return Atom::rank_one(0.0, eig.vector);
  return Atom::rank_one(trace_bound, eig.vector);
}

/// Same contract, backed by a dense eigendecomposition (small n only).
inline Atom lmo_spectrahedron_dense(const Matrix& v, double trace_bound, TraceMode mode,
                                    LmoDiagnostics* diag = nullptr) {
  if (!v.allFinite()) throw NumericError("lmo_spectrahedron: non-finite direction");
  const EigenPairEstimate eig = dense_min_eigpair(v);
  if (diag) *diag = {eig.value, eig.residual, true, 0};
  if (mode == TraceMode::kAtMost && !(eig.value < -1e-12 * v.norm()))
    return Atom::rank_one(0.0, eig.vector);
  return Atom::rank_one(trace_bound, eig.vector);
}

/// Accuracy schedule for the in-solver spectrahedron LMO: at outer iteration
/// k the Lanczos budget is ceil(c (k+1)^(1/4) ln n), capped at n, with a
/// fresh start vector per call.
struct LanczosSchedule {
  double c = 8.0;
  /// Residual tolerance relative to ||v||_F.
  double relative_tolerance = 1e-10;
  int restarts = 1;
  /// Use a dense eigensolver instead of Lanczos.
  bool dense = false;

  int budget(int iteration, Index n) const {
    const double raw = c * std::pow(static_cast<double>(iteration) + 1.0, 0.25) *
                       std::log(static_cast<double>(std::max<Index>(n, 2)));
    const double capped = std::min(std::ceil(raw), static_cast<double>(n));
    return std::max(1, static_cast<int>(capped));
  }

  LanczosConfig config(int iteration, Index n, double vnorm, std::uint64_t seed) const {
    LanczosConfig cfg;
    cfg.max_iterations = budget(iteration, n);
    cfg.tolerance = relative_tolerance * std::max(vnorm, 1e-300);
    cfg.rng_seed = mix_seed(seed, static_cast<std::uint64_t>(iteration));
    cfg.restarts = restarts;
    return cfg;
  }
};

/// Exact Euclidean projection onto the spectrahedron via eigenvalue
/// water-filling.
inline Matrix project_spectrahedron(const Matrix& x, double trace_bound, TraceMode mode) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(x));
  if (es.info() != Eigen::Success) throw NumericError("project_spectrahedron: eigensolver failed");
  const Vector values = mode == TraceMode::kEquality
                            ? project_simplex(es.eigenvalues(), trace_bound)
                            : project_capped_simplex(es.eigenvalues(), trace_bound);
  return es.eigenvectors() * values.asDiagonal() * es.eigenvectors().transpose();
}

/// {x in S^n : x psd, tr x = bound} or {x psd, tr x <= bound}.
inline CompactDomain make_spectrahedron(Index n, double trace_bound, TraceMode mode,
                                        LanczosSchedule schedule = {}) {
  if (n < 1) throw ConfigError("spectrahedron: n must be >= 1");
  if (!(trace_bound > 0.0)) throw ConfigError("spectrahedron: trace bound must be positive");
  CompactDomain d;
  d.shape = PointShape::symmetric_matrix(n);
  d.diameter = trace_bound * std::sqrt(2.0);
  d.trace_bound = trace_bound;
  d.trace_mode = mode;
  d.spectrahedral = true;
  d.lmo = [n, trace_bound, mode, schedule](const Matrix& v, const LmoContext& ctx) {
    if (schedule.dense) return lmo_spectrahedron_dense(v, trace_bound, mode);
    return lmo_spectrahedron(v, trace_bound, mode, schedule.config(ctx.iteration, n, v.norm(), ctx.seed));
  };
  d.membership_residual = [trace_bound, mode](const Matrix& x) {
    const double lmin = min_eigenvalue(symmetrize(x));
    const double tr = x.trace();
    const double trace_violation =
        mode == TraceMode::kEquality ? std::abs(tr - trace_bound) : std::max(0.0, tr - trace_bound);
    return std::max(0.0, -lmin) + trace_violation + (x - x.transpose()).norm();
  };
  d.project = [trace_bound, mode](const Matrix& x) { return project_spectrahedron(x, trace_bound, mode); };
  return d;
}

/// Scaled probability simplex {x in R^n : x >= 0, sum x = radius}.
inline CompactDomain make_simplex(Index n, double radius = 1.0) {
  if (n < 1) throw ConfigError("simplex: n must be >= 1");
  CompactDomain d;
  d.shape = PointShape::vector(n);
  d.diameter = radius * std::sqrt(2.0);
  d.lmo = [n, radius](const Matrix& v, const LmoContext&) {
    if (!v.allFinite()) throw NumericError("simplex lmo: non-finite direction");
    Index idx = 0;
    v.col(0).minCoeff(&idx);
    return Atom::vertex(radius, Vector::Unit(n, idx));
  };
  d.membership_residual = [radius](const Matrix& x) {
    return (-x.col(0)).cwiseMax(0.0).sum() + std::abs(x.col(0).sum() - radius);
  };
  d.project = [radius](const Matrix& x) -> Matrix { return project_simplex(x.col(0), radius); };
  return d;
}

// ---------------------------------------------------------------------------
// Projections onto the constraint sets used by the built-in instances.

/// Projection onto the singleton {b}.
inline Vector project_singleton(const Vector& z, const Vector& b) {
  if (z.size() != b.size()) throw ConfigError("project_singleton: dimension mismatch");
  return b;
}

/// Elementwise max(z, 0).
inline Vector project_nonneg(const Vector& z) { return z.cwiseMax(0.0); }
inline Matrix project_nonneg(const Matrix& z) { return z.cwiseMax(0.0); }

inline ConstraintSet singleton_set(Vector b) {
  auto target = std::make_shared<const Vector>(std::move(b));
  ConstraintSet k;
  k.dim = target->size();
  k.project = [target](const Vector& z) { return project_singleton(z, *target); };
  k.support = [target](const Vector& y) { return y.dot(*target); };
  return k;
}

inline ConstraintSet nonneg_set(Index dim) {
  ConstraintSet k;
  k.dim = dim;
  k.project = [](const Vector& z) -> Vector { return project_nonneg(z); };
  k.support = [](const Vector& y) {
    return y.maxCoeff() > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  };
  return k;
}

/// Blockwise projection of a stacked vector onto sets[0] x sets[1] x ...
inline Vector project_product(const Vector& z, const std::vector<ConstraintSet>& sets) {
  Index total = 0;
  for (const auto& s : sets) total += s.dim;
  if (total != z.size())
    throw ConfigError("project_product: block dimensions sum to " + std::to_string(total) +
                      ", input has " + std::to_string(z.size()));
  Vector out(z.size());
  Index offset = 0;
  for (const auto& s : sets) {
    out.segment(offset, s.dim) = s.project(z.segment(offset, s.dim));
    offset += s.dim;
  }
  return out;
}

inline ConstraintSet product_set(std::vector<ConstraintSet> sets) {
  auto blocks = std::make_shared<const std::vector<ConstraintSet>>(std::move(sets));
  ConstraintSet k;
  for (const auto& s : *blocks) k.dim += s.dim;
  k.project = [blocks](const Vector& z) { return project_product(z, *blocks); };
  bool have_support = true;
  for (const auto& s : *blocks) have_support = have_support && static_cast<bool>(s.support);
  if (have_support) {
    k.support = [blocks](const Vector& y) {
      double total = 0.0;
      Index offset = 0;
      for (const auto& s : *blocks) {
        total += s.support(y.segment(offset, s.dim));
        offset += s.dim;
      }
      return total;
    };
  }
  return k;
}

}  // namespace cgalopt
