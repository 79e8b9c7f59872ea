#include <gtest/gtest.h>

#include "cgalopt/cgal.hpp"
#include "cgalopt/instances.hpp"
#include "cgalopt/reference.hpp"

using namespace cgalopt;

namespace {

BoundConstants constants(const ProblemSpec& p, DualVariant v, double lambda0) {
  BoundConstants c;
  c.diameter = p.domain.diameter;
  c.norm_a = p.constraint_map.norm_bound;
  c.lipschitz_f = p.objective.lipschitz;
  c.lambda0 = lambda0;
  c.variant = v;
  c.dual_bound = StepRule::proportional_bound(1.0, c.diameter, c.norm_a, lambda0);
  return c;
}

SolverOptions options(const ProblemSpec& p, DualVariant v, double lambda0, int iters) {
  SolverOptions o;
  o.rule.variant = v;
  o.rule.lambda0 = lambda0;
  o.rule.dual_bound = StepRule::proportional_bound(1.0, p.domain.diameter, p.constraint_map.norm_bound, lambda0);
  o.iterations = iters;
  o.stride.kind = TraceStride::Kind::kEvery;
  o.record_wall_time = false;
  return o;
}

}  // namespace

TEST(Reference, TriangleMaxcut) {
  const ProblemSpec p = build_maxcut(graph_laplacian(triangle_graph()));
  const ReferenceSolution ref = dense_reference_solve(p);
  ASSERT_TRUE(ref.converged);
  EXPECT_NEAR(ref.f_star, -2.25, 1e-7);
  EXPECT_LE((ref.x_star.diagonal() - Vector::Ones(3)).norm(), 1e-7);
  EXPECT_LE(ref.dual_residual, 1e-8 * 3.25);

  // Grid search over rank-one points 3 u u^T with unit u (resolution 1e-2 in
  // the angles) never beats the reference optimum.
  double best = 0.0;
  const Matrix l = graph_laplacian(triangle_graph());
  for (double a = 0.0; a < M_PI; a += 1e-2)
    for (double b = 0.0; b < 2 * M_PI; b += 1e-2) {
      Vector u(3);
      u << std::sin(a) * std::cos(b), std::sin(a) * std::sin(b), std::cos(a);
      best = std::min(best, -0.25 * 3.0 * u.dot(l * u));
    }
  EXPECT_GE(best, ref.f_star - 1e-9);
  EXPECT_LE(best, ref.f_star + 1e-3);
}

TEST(Reference, GeneigClosedForm) {
  Matrix phi = Matrix::Zero(2, 2);
  phi.diagonal() << 2.0, 1.0;
  const ProblemSpec p = build_geneig(phi, Matrix::Identity(2, 2), 1.5);
  const ReferenceSolution ref = dense_reference_solve(p);
  EXPECT_NEAR(ref.f_star, -2.0, 1e-7);
  Matrix e11 = Matrix::Zero(2, 2);
  e11(0, 0) = 1.0;
  EXPECT_LE((ref.x_star - e11).norm(), 1e-6);
}

TEST(Reference, GeneigRankOne) {
  const Matrix phi = synth_matrix(SynthKind::kGaussian, 10, 0.0, 3);
  const ProblemSpec p = build_geneig(phi, Matrix::Identity(10, 10), 2.0);
  const ReferenceSolution ref = dense_reference_solve(p);
  EXPECT_NEAR(ref.f_star, -Eigen::SelfAdjointEigenSolver<Matrix>(phi).eigenvalues()(9), 1e-6);
  const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(ref.x_star).eigenvalues();
  EXPECT_LE(std::abs(ev(8)), 1e-6 * ev(9));
}

TEST(Reference, SaddleInequalityOnKmeans) {
  const ProblemSpec p = build_kmeans(random_distance_matrix(5, 2, 1), 2.0);
  const ReferenceSolution ref = dense_reference_solve(p);
  EXPECT_LE(ref.primal_residual, 1e-8);
  // f* <= f(x) + <y*, Ax - r> for x in X and r in K.
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    const Matrix g = gaussian_matrix(5, 5, rng);
    Matrix x = g * g.transpose();
    x *= 2.0 / x.trace();
    const Vector ax = p.constraint_map.forward(x);
    Vector r = p.constraint_set.project(ax + gaussian_vector(ax.size(), rng));
    EXPECT_LE(ref.f_star, p.objective.eval(x) + ref.y_star.dot(ax - r) + 1e-6);
  }
}

TEST(Reference, RejectsLargeProblems) {
  const ProblemSpec p = build_maxcut(graph_laplacian(random_graph(40, 80, 1)));
  EXPECT_THROW(dense_reference_solve(p), ConfigError);
  ReferenceOptions o;
  o.max_iter = 3;
  EXPECT_THROW(dense_reference_solve(build_kmeans(random_distance_matrix(5, 2, 1), 2.0), o), NumericError);
}

TEST(ConvergenceBounds, HoldsOnTriangleForAllVariants) {
  const ProblemSpec p = build_maxcut(graph_laplacian(triangle_graph()));
  const ReferenceSolution ref = dense_reference_solve(p);
  for (DualVariant v : {DualVariant::kConstant, DualVariant::kDecreasing, DualVariant::kOff}) {
    std::vector<double> dist;
    auto o = options(p, v, 1.0, 10000);
    o.observer = [&](const SolverState& st, const TraceRecord&) { dist.push_back((st.y - ref.y_star).norm()); };
    const SolverResult r = run_cgal(p, o);
    const BoundReport rep = check_theorem1(r.trace, ref, constants(p, v, 1.0), dist);
    EXPECT_TRUE(rep.passed) << to_string(v) << ": " << rep.first_failure;
    EXPECT_EQ(rep.checked, 3 * 10000);
  }
}

TEST(ConvergenceBounds, InflatedFeasibilityFails) {
  const ProblemSpec p = build_maxcut(graph_laplacian(triangle_graph()));
  const ReferenceSolution ref = dense_reference_solve(p);
  SolverResult r = run_cgal(p, options(p, DualVariant::kConstant, 1.0, 200));
  for (auto& rec : r.trace) rec.feasibility = 10.0 * std::max(rec.feasibility, 1.0);
  const BoundReport rep = check_theorem1(r.trace, ref, constants(p, DualVariant::kConstant, 1.0));
  EXPECT_FALSE(rep.passed);
  EXPECT_LE(rep.first_failing_k, 10);
  EXPECT_NE(rep.first_failure.find("feasibility"), std::string::npos);
}

TEST(RecursionBound, FirstStepBoundHoldsForAnyStart) {
  const ProblemSpec p = build_maxcut(graph_laplacian(triangle_graph()));
  const ReferenceSolution ref = dense_reference_solve(p);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto o = options(p, DualVariant::kConstant, 1.0, 1);
    Rng rng(seed);
    Matrix x1 = gaussian_matrix(3, 3, rng);
    o.x1 = project_spectrahedron(x1, 3.0, TraceMode::kEquality);
    std::vector<StateSnapshot> snaps;
    o.observer = [&](const SolverState& st, const TraceRecord& rec) {
      snaps.push_back({rec.k, st.x, st.y, st.lambda});
    };
    run_cgal(p, o);
    EXPECT_TRUE(check_appendix_recursion(snaps, p, ref, constants(p, DualVariant::kConstant, 1.0)).passed);
  }
}
