#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include "cgalopt/problem.hpp"
#include "cgalopt/smoothing.hpp"
#include "cgalopt/state.hpp"
#include "cgalopt/step_rules.hpp"
#include "cgalopt/steps.hpp"

namespace cgalopt {

/// Which iterations end up in the returned trace. Every iteration is still
/// passed to the observer.
struct TraceStride {
  enum class Kind { kEvery, kDenseThenGeometric, kGeometric };

  Kind kind = Kind::kDenseThenGeometric;
  long dense_until = 1000;
  int per_decade = 100;

  static long bin(long k, int per_decade) {
    return static_cast<long>(std::floor(per_decade * std::log10(static_cast<double>(k)) + 1e-9));
  }

  bool should_record(long k, long last_recorded) const {
    if (kind == Kind::kEvery || last_recorded <= 0) return true;
    if (kind == Kind::kDenseThenGeometric && k <= dense_until) return true;
    return bin(k, per_decade) != bin(last_recorded, per_decade);
  }
};

struct SolverOptions {
  StepRule rule;
  int iterations = 1000;
  TraceStride stride;
  std::uint64_t seed = 0;
  /// Starting points; default x_1 = initial_point(domain, seed), y_1 = 0.
  std::optional<Matrix> x1;
  std::optional<Vector> y1;
  ZMode z_mode = ZMode::kFixed;
  bool keep_atoms = false;
  bool record_wall_time = true;
  /// Replaces lambda_k = lambda0 sqrt(k+1). Only for experiments that
  /// deliberately break the schedule.
  std::function<double(int)> penalty_override;
  /// Called after every iteration with the updated state and its record.
  std::function<void(const SolverState&, const TraceRecord&)> observer;
};

struct SolverResult {
  SolverState state;
  Trace trace;
  /// Set when the run was aborted; the trace then holds the partial history.
  std::optional<std::string> failure;

  bool ok() const { return !failure.has_value(); }
};

/// lmo(random direction): always a point of the domain, deterministic per seed.
inline Matrix initial_point(const CompactDomain& domain, std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0xC0FFEE));
  const Matrix direction = random_point(domain.shape, rng);
  const Atom atom = domain.lmo(direction, LmoContext{1, mix_seed(seed, 1)});
  Matrix x = Matrix::Zero(domain.shape.rows, domain.shape.cols);
  atom.add_to(x, 1.0);
  return x;
}

/// Conditional-gradient augmented Lagrangian method. With
/// rule.variant == kOff and y_1 = 0 this is the quadratic-penalty method
/// (HCGM).
inline SolverResult run_cgal(const ProblemSpec& problem, const SolverOptions& opts) {
  problem.validate();
  opts.rule.validate();
  if (opts.iterations < 1) throw ConfigError("run_cgal: iterations must be >= 1");

  const auto& A = problem.constraint_map;
  const auto& K = problem.constraint_set;
  const double lambda0 = opts.rule.lambda0;
  auto penalty = [&](int k) {
    return opts.penalty_override ? opts.penalty_override(k) : lambda_schedule(k, lambda0);
  };

  SolverResult result;
  SolverState& st = result.state;
  st.k = 1;
  st.x = opts.x1 ? *opts.x1 : initial_point(problem.domain, opts.seed);
  require_shape(st.x, problem.domain.shape, "run_cgal x1");
  st.y = opts.y1 ? *opts.y1 : Vector::Zero(A.range_dim);
  if (st.y.size() != A.range_dim) throw ConfigError("run_cgal: y1 has the wrong dimension");
  if (problem.nonsmooth) st.z = problem.nonsmooth->center;
  st.ax = A.forward(st.x);
  st.lambda = penalty(1);
  result.trace.reserve(std::min(opts.iterations, 4000));

  const auto start = std::chrono::steady_clock::now();
  long last_recorded = 0;
  for (int it = 0; it < opts.iterations; ++it) {
    const int k = st.k;
    try {
      const double eta = eta_schedule(k);
      st.lambda = penalty(k);
      const Vector r = compute_slack(st.ax, st.y, st.lambda, K);
      const Matrix v = problem.nonsmooth ? composite_direction(st, problem, r)
                                         : primal_direction(st, problem, r);
      const Atom s = problem.domain.lmo(v, LmoContext{k, opts.seed});
      ++st.lmo_calls;
      primal_step_inplace(st.x, s, eta);
      if (opts.keep_atoms) st.atoms.push_back(s);
      st.ax = A.forward(st.x);

      const double lambda_next = penalty(k + 1);
      const Vector rbar = K.project(st.ax + st.y / lambda_next);
      const Vector d = st.ax - rbar;
      double sigma = 0.0;
      switch (opts.rule.variant) {
        case DualVariant::kDecreasing:
          sigma = dual_sigma_decr(k, opts.rule, st.y, d);
          break;
        case DualVariant::kConstant:
          sigma = dual_sigma_const(k, opts.rule, st.y, d, problem.objective.lipschitz, A.norm_bound,
                                   problem.domain.diameter);
          break;
        case DualVariant::kOff:
          break;
      }
      st.y = dual_step(st.y, sigma, d);
      if (st.z) *st.z = dual_step_z(*st.z, st.x, k, problem, opts.z_mode, opts.rule);

      const double lambda_used = st.lambda;
      st.k = k + 1;
      st.lambda = lambda_next;
      st.last_sigma = sigma;
      st.last_eta = eta;

      TraceRecord rec;
      rec.k = k;
      rec.lmo_calls = st.lmo_calls;
      rec.objective = problem.total_objective(st.x);
      rec.feasibility = K.distance(st.ax);
      rec.dual_norm = st.y.norm();
      rec.lambda = lambda_used;
      rec.sigma = sigma;
      rec.eta = eta;
      if (opts.record_wall_time)
        rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (!std::isfinite(rec.objective)) throw NumericError("run_cgal: non-finite objective");
      if (!std::isfinite(rec.feasibility) || !std::isfinite(rec.dual_norm))
        throw NumericError("run_cgal: non-finite iterate");

      if (opts.observer) opts.observer(st, rec);
      if (opts.stride.should_record(k, last_recorded) || it + 1 == opts.iterations) {
        result.trace.push_back(rec);
        last_recorded = k;
      }
    } catch (const NumericError& e) {
      result.failure = "iteration " + std::to_string(k) + ": " + e.what();
      return result;
    }
  }
  return result;
}

}  // namespace cgalopt
