#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>

#include "cgalopt/errors.hpp"

namespace cgalopt {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Shape of an ambient point. Vector-valued problems use cols == 1.
struct PointShape {
  Index rows = 0;
  Index cols = 1;
  bool symmetric = false;

  Index size() const { return rows * cols; }
  bool operator==(const PointShape&) const = default;

  static PointShape symmetric_matrix(Index n) { return {n, n, true}; }
  static PointShape vector(Index n) { return {n, 1, false}; }
};

/// Frobenius inner product; reduces to the Euclidean one for column vectors.
inline double inner(const Matrix& a, const Matrix& b) {
  return (a.array() * b.array()).sum();
}

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

inline void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw NumericError(std::string("non-finite values in ") + what);
}

inline void require_shape(const Matrix& m, const PointShape& s, const char* what) {
  if (m.rows() != s.rows || m.cols() != s.cols) {
    throw ConfigError(std::string("dimension mismatch in ") + what + ": got " +
                      std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                      ", expected " + std::to_string(s.rows) + "x" + std::to_string(s.cols));
  }
}

/// splitmix64 finalizer, used to derive independent stream seeds.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b = 0) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

using Rng = std::mt19937_64;

inline Vector gaussian_vector(Index n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

inline Matrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

/// Random point of the given shape; symmetric shapes get the symmetric part.
inline Matrix random_point(const PointShape& s, Rng& rng) {
  Matrix m = gaussian_matrix(s.rows, s.cols, rng);
  if (s.symmetric) m = 0.5 * (m + m.transpose()).eval();
  return m;
}

inline Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

/// Flip sign so that the largest-magnitude entry is positive.
inline void fix_sign(Vector& v) {
  if (v.size() == 0) return;
  Index idx = 0;
  v.cwiseAbs().maxCoeff(&idx);
  if (v(idx) < 0) v = -v;
}

/// Euclidean projection onto {w >= 0, sum(w) = radius}.
inline Vector project_simplex(const Vector& v, double radius) {
  const Index n = v.size();
  Vector u = v;
  std::sort(u.data(), u.data() + n, std::greater<double>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (Index j = 0; j < n; ++j) {
    cumulative += u(j);
    const double t = (cumulative - radius) / static_cast<double>(j + 1);
    if (u(j) - t > 0.0) theta = t;
  }
  return (v.array() - theta).max(0.0).matrix();
}

/// Euclidean projection onto {w >= 0, sum(w) <= radius}.
inline Vector project_capped_simplex(const Vector& v, double radius) {
  Vector clipped = v.cwiseMax(0.0);
  if (clipped.sum() <= radius) return clipped;
  return project_simplex(v, radius);
}

inline double min_eigenvalue(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace cgalopt
