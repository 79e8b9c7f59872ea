#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "cgalopt/linalg.hpp"

namespace cgalopt {

struct LanczosConfig {
  int max_iterations = 100;
  /// Stop once ||M u - theta u|| <= tolerance.
  double tolerance = 1e-10;
  std::uint64_t rng_seed = 0;
  /// Extra runs restarted from the current Ritz vector when not converged.
  int restarts = 0;

  void validate() const {
    if (max_iterations < 1) throw ConfigError("LanczosConfig: max_iterations must be >= 1");
    if (!(tolerance >= 0.0)) throw ConfigError("LanczosConfig: tolerance must be >= 0");
    if (restarts < 0) throw ConfigError("LanczosConfig: restarts must be >= 0");
  }
};

struct EigenPairEstimate {
  /// Rayleigh quotient of the returned vector; never below the true minimum.
  double value = 0.0;
  Vector vector;
  double residual = 0.0;
  bool converged = false;
  int matvecs = 0;
};

namespace detail {

// Smallest eigenvalue of the symmetric tridiagonal (a, b) by Sturm-sequence
// bisection on the Gershgorin interval.
inline double tridiag_min_eigenvalue(const Vector& a, const Vector& b) {
  const Index m = a.size();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (Index i = 0; i < m; ++i) {
    const double r = (i > 0 ? std::abs(b(i - 1)) : 0.0) + (i + 1 < m ? std::abs(b(i)) : 0.0);
    lo = std::min(lo, a(i) - r);
    hi = std::max(hi, a(i) + r);
  }
  const double scale = std::max(std::abs(lo), std::abs(hi));
  const double tiny = std::numeric_limits<double>::min();
  // Number of eigenvalues below x.
  auto count_below = [&](double x) {
    int count = 0;
    double d = 1.0;
    for (Index i = 0; i < m; ++i) {
      const double off = i > 0 ? b(i - 1) * b(i - 1) / d : 0.0;
      d = a(i) - x - off;
      if (d == 0.0) d = -tiny;
      if (d < 0.0) ++count;
    }
    return count;
  };
  hi = std::min(hi, a.minCoeff());
  for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * scale; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (count_below(mid) >= 1) hi = mid;
    else lo = mid;
  }
  return 0.5 * (lo + hi);
}

// Eigenvector of the symmetric tridiagonal (a, b) for its smallest eigenvalue
// theta, by inverse iteration with a shift just below theta. T - shift I is
// then positive definite, so elimination without pivoting is stable.
inline Vector tridiag_eigvec(const Vector& a, const Vector& b, double theta, double scale) {
  const Index m = a.size();
  const double shift = theta - 1e-9 * std::max(scale, 1e-300);
  Vector diag(m), upper(std::max<Index>(m - 1, 0)), z = Vector::Ones(m);
  // LDL^T factorization of T - shift I.
  diag(0) = a(0) - shift;
  for (Index i = 1; i < m; ++i) {
    upper(i - 1) = b(i - 1) / diag(i - 1);
    diag(i) = a(i) - shift - upper(i - 1) * b(i - 1);
  }
  for (int it = 0; it < 3; ++it) {
    for (Index i = 1; i < m; ++i) z(i) -= upper(i - 1) * z(i - 1);
    for (Index i = 0; i < m; ++i) z(i) /= diag(i);
    for (Index i = m - 2; i >= 0; --i) z(i) -= upper(i) * z(i + 1);
    z.normalize();
  }
  return z;
}

// One Lanczos run with full reorthogonalization, started from `start`.
template <class MatVec>
EigenPairEstimate lanczos_run(MatVec& matvec, const Vector& start, int steps, double tolerance) {
  const Index n = start.size();
  const int m = static_cast<int>(std::min<Index>(steps, n));
  Matrix basis(n, m);
  Vector alpha(m);
  Vector beta(m);
  Vector w(n);
  basis.col(0) = start.normalized();

  EigenPairEstimate out;
  Vector ritz_coeffs;
  int used = 0;
  int next_check = 1;
  double anorm = 0.0;
  for (int j = 0; j < m; ++j) {
    matvec(basis.col(j), w);
    ++out.matvecs;
    if (!w.allFinite()) throw NumericError("lanczos: matvec produced non-finite values");
    alpha(j) = basis.col(j).dot(w);
    w -= alpha(j) * basis.col(j);
    if (j > 0) w -= beta(j - 1) * basis.col(j - 1);
    // Two passes of classical Gram-Schmidt keep the basis orthonormal to
    // working precision.
    for (int pass = 0; pass < 2; ++pass) {
      const Vector coeffs = basis.leftCols(j + 1).transpose() * w;
      w.noalias() -= basis.leftCols(j + 1) * coeffs;
    }
    beta(j) = w.norm();
    used = j + 1;
    anorm = std::max(anorm, std::abs(alpha(j)) + beta(j) + (j > 0 ? beta(j - 1) : 0.0));

    const bool breakdown = beta(j) <= 1e-14 * std::max(anorm, 1e-300);
    // The tridiagonal eigensolve is O(j^3); only do it on a geometric grid
    // of step counts.
    if (used >= next_check || breakdown || used == m) {
      next_check = std::max(used + 1, static_cast<int>(std::ceil(1.25 * used)));
      if (used == 1) {
        ritz_coeffs = Vector::Ones(1);
      } else {
        const double theta = tridiag_min_eigenvalue(alpha.head(used), beta.head(used - 1));
        ritz_coeffs = tridiag_eigvec(alpha.head(used), beta.head(used - 1), theta, anorm);
      }
      const double estimate = beta(j) * std::abs(ritz_coeffs(used - 1));
      if (estimate <= tolerance || breakdown || used == m) break;
    }
    basis.col(j + 1) = w / beta(j);
  }

  Vector u = basis.leftCols(used) * ritz_coeffs;
  u.normalize();
  fix_sign(u);
  matvec(u, w);
  ++out.matvecs;
  if (!w.allFinite()) throw NumericError("lanczos: matvec produced non-finite values");
  out.value = u.dot(w);
  out.residual = (w - out.value * u).norm();
  out.converged = out.residual <= tolerance;
  out.vector = std::move(u);
  return out;
}

}  // namespace detail

/// Smallest eigenpair of a symmetric operator given by `matvec(in, out)`.
/// The returned value is the Rayleigh quotient of the returned unit vector,
/// hence an upper estimate of the smallest eigenvalue.
template <class MatVec>
EigenPairEstimate lanczos_min_eigpair(MatVec&& matvec, Index dim, const LanczosConfig& cfg) {
  if (dim < 1) throw ConfigError("lanczos: dimension must be >= 1");
  cfg.validate();
  Rng rng(cfg.rng_seed);
  Vector start = gaussian_vector(dim, rng);
  EigenPairEstimate best;
  bool have = false;
  int total = 0;
  for (int run = 0; run <= cfg.restarts; ++run) {
    EigenPairEstimate est = detail::lanczos_run(matvec, start, cfg.max_iterations, cfg.tolerance);
    total += est.matvecs;
    if (!have || est.value < best.value || (est.value == best.value && est.residual < best.residual)) {
      best = std::move(est);
      have = true;
    }
    if (best.converged) break;
    start = best.vector;
  }
  best.matvecs = total;
  return best;
}

/// Smallest eigenpair of a dense symmetric matrix.
inline EigenPairEstimate lanczos_min_eigpair(const Matrix& sym, const LanczosConfig& cfg) {
  auto mv = [&sym](const auto& in, Vector& out) { out.noalias() = sym * in; };
  return lanczos_min_eigpair(mv, sym.rows(), cfg);
}

/// Dense reference: full symmetric eigendecomposition.
inline EigenPairEstimate dense_min_eigpair(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  if (es.info() != Eigen::Success) throw NumericError("dense eigensolver failed");
  EigenPairEstimate out;
  out.vector = es.eigenvectors().col(0);
  fix_sign(out.vector);
  out.value = es.eigenvalues()(0);
  out.residual = (sym * out.vector - out.value * out.vector).norm();
  out.converged = true;
  out.matvecs = 0;
  return out;
}

}  // namespace cgalopt
