#pragma once

#include "cgalopt/linalg.hpp"

namespace cgalopt {

/// Extreme point returned by a linear minimization oracle, kept in factored
/// form. Rank-one atoms materialize to weight * v v^T, vector atoms to
/// weight * v.
struct Atom {
  enum class Kind { kRankOne, kVector };

  double weight = 0.0;
  Vector vector;
  Kind kind = Kind::kRankOne;

  static Atom rank_one(double weight, Vector unit) {
    return Atom{weight, std::move(unit), Kind::kRankOne};
  }
  static Atom vertex(double weight, Vector direction) {
    return Atom{weight, std::move(direction), Kind::kVector};
  }

  Matrix materialize() const {
    if (kind == Kind::kVector) return weight * vector;
    return weight * vector * vector.transpose();
  }

  /// x <- x + scale * materialize(), without forming the dense atom.
  void add_to(Matrix& x, double scale) const {
    const double c = scale * weight;
    if (c == 0.0) return;
    if (kind == Kind::kVector) {
      x.col(0).noalias() += c * vector;
    } else {
      x.noalias() += (c * vector) * vector.transpose();
    }
  }

  /// <materialize(), direction> without materializing.
  double value(const Matrix& direction) const {
    if (weight == 0.0) return 0.0;
    if (kind == Kind::kVector) return weight * direction.col(0).dot(vector);
    return weight * vector.dot(direction * vector);
  }
};

}  // namespace cgalopt
