#include <gtest/gtest.h>

#include "cgalopt/linalg.hpp"

using namespace cgalopt;

namespace {

// Simplex projection by bisection on the threshold: sum(max(v - t, 0)) = radius.
Vector simplex_by_bisection(const Vector& v, double radius) {
  double lo = v.minCoeff() - radius, hi = v.maxCoeff();
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    ((v.array() - mid).max(0.0).sum() > radius ? lo : hi) = mid;
  }
  return (v.array() - 0.5 * (lo + hi)).max(0.0).matrix();
}

}  // namespace

TEST(Linalg, SimplexProjectionMatchesBisection) {
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    const Vector v = 3.0 * gaussian_vector(7, rng);
    const double radius = 0.5 + t % 4;
    const Vector p = project_simplex(v, radius);
    EXPECT_NEAR(p.sum(), radius, 1e-12);
    EXPECT_GE(p.minCoeff(), 0.0);
    EXPECT_LE((p - simplex_by_bisection(v, radius)).norm(), 1e-9);
  }
}

TEST(Linalg, CappedSimplexKeepsInteriorPoints) {
  Vector v(3);
  v << 0.2, -1.0, 0.3;
  const Vector p = project_capped_simplex(v, 1.0);
  EXPECT_DOUBLE_EQ(p(0), 0.2);
  EXPECT_DOUBLE_EQ(p(1), 0.0);
  EXPECT_DOUBLE_EQ(p(2), 0.3);
  v << 2.0, 0.0, 0.0;
  EXPECT_NEAR(project_capped_simplex(v, 1.0)(0), 1.0, 1e-15);
}

TEST(Linalg, FixSignMakesLargestEntryPositive) {
  Vector v(3);
  v << 0.1, -0.9, 0.3;
  fix_sign(v);
  EXPECT_GT(v(1), 0.0);
  EXPECT_LT(v(0), 0.0);
}

TEST(Linalg, SeedsAreReproducibleAndMixed) {
  EXPECT_EQ(mix_seed(1, 2), mix_seed(1, 2));
  EXPECT_NE(mix_seed(1, 2), mix_seed(2, 1));
  EXPECT_NE(mix_seed(0, 0), mix_seed(0, 1));
  Rng a(5), b(5);
  EXPECT_EQ(gaussian_matrix(4, 4, a), gaussian_matrix(4, 4, b));
}

TEST(Linalg, RandomPointRespectsSymmetry) {
  Rng rng(1);
  const Matrix m = random_point(PointShape::symmetric_matrix(5), rng);
  EXPECT_EQ(m, m.transpose());
  const Matrix v = random_point(PointShape::vector(4), rng);
  EXPECT_EQ(v.cols(), 1);
}

TEST(Linalg, ShapeErrors) {
  EXPECT_THROW(require_shape(Matrix::Zero(2, 3), PointShape::symmetric_matrix(2), "x"), ConfigError);
  Matrix bad = Matrix::Zero(2, 2);
  bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(require_finite(bad, "x"), NumericError);
}
