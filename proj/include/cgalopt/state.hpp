#pragma once

#include <optional>
#include <vector>

#include "cgalopt/atom.hpp"
#include "cgalopt/linalg.hpp"

namespace cgalopt {

/// Mutable iterate of the solver. `k` is the index of the next iteration, so
/// x, y, lambda are x_k, y_k, lambda_k.
struct SolverState {
  int k = 1;
  Matrix x;
  Vector y;
  std::optional<Vector> z;
  Vector ax;
  double lambda = 0.0;
  long lmo_calls = 0;
  double last_sigma = 0.0;
  double last_eta = 0.0;
  /// Optional factored history of the atoms picked by the LMO.
  std::vector<Atom> atoms;
};

/// Metrics emitted after iteration k (i.e. describing x_{k+1}, y_{k+1}).
struct TraceRecord {
  long k = 0;
  long lmo_calls = 0;
  double objective = 0.0;
  double feasibility = 0.0;
  double dual_norm = 0.0;
  /// lambda_k, sigma_{k+1}, eta_k used during iteration k.
  double lambda = 0.0;
  double sigma = 0.0;
  double eta = 0.0;
  double wall_time = 0.0;

  bool operator==(const TraceRecord&) const = default;
};

using Trace = std::vector<TraceRecord>;

}  // namespace cgalopt
