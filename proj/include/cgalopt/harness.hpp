#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cgalopt/cgal.hpp"
#include "cgalopt/instances.hpp"
#include "cgalopt/oracles.hpp"
#include "cgalopt/state.hpp"

namespace cgalopt {

enum class SolverKind { kCgalConst, kCgalDecr, kHcgm };

inline constexpr const char* kSolverNames = "cgal-const, cgal-decr, hcgm";

inline SolverKind parse_solver_kind(const std::string& s) {
  if (s == "cgal-const") return SolverKind::kCgalConst;
  if (s == "cgal-decr") return SolverKind::kCgalDecr;
  if (s == "hcgm") return SolverKind::kHcgm;
  throw ConfigError("unknown solver '" + s + "' (valid: " + kSolverNames + ")");
}

inline std::string to_string(SolverKind k) {
  switch (k) {
    case SolverKind::kCgalConst: return "cgal-const";
    case SolverKind::kCgalDecr: return "cgal-decr";
    case SolverKind::kHcgm: return "hcgm";
  }
  return "?";
}

inline DualVariant variant_of(SolverKind k) {
  switch (k) {
    case SolverKind::kCgalConst: return DualVariant::kConstant;
    case SolverKind::kCgalDecr: return DualVariant::kDecreasing;
    case SolverKind::kHcgm: return DualVariant::kOff;
  }
  return DualVariant::kConstant;
}

struct RunConfig {
  InstanceConfig instance;
  SolverKind solver = SolverKind::kCgalConst;
  double lambda0 = 1.0;
  int iterations = 1000;
  /// c_y in D_Y = c_y D_X ||A|| lambda0.
  double dual_bound_factor = 1.0;
  LanczosSchedule lmo;
  TraceStride trace_stride;
  bool wall_time = true;
  std::string output;
  std::uint64_t seed = 0;

  void validate() const {
    instance.validate();
    if (iterations < 1) throw ConfigError("iterations must be >= 1");
    if (!(lambda0 > 0.0)) throw ConfigError("lambda0 must be positive");
    if (!(dual_bound_factor > 0.0)) throw ConfigError("dual_bound_factor must be positive");
    if (!(lmo.c > 0.0) || !(lmo.relative_tolerance >= 0.0) || lmo.restarts < 0)
      throw ConfigError("invalid lanczos settings");
    if (trace_stride.per_decade < 1) throw ConfigError("stride_per_decade must be >= 1");
  }
};

namespace detail {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

inline double config_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  if (!parse_double(v, out)) throw ConfigError(key + ": expected a number, got '" + v + "'");
  return out;
}

inline long long config_long(const std::string& key, const std::string& v) {
  long long out = 0;
  if (!parse_long(v, out)) throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return out;
}

inline std::string stride_name(TraceStride::Kind k) {
  switch (k) {
    case TraceStride::Kind::kEvery: return "every";
    case TraceStride::Kind::kDenseThenGeometric: return "dense-geometric";
    case TraceStride::Kind::kGeometric: return "geometric";
  }
  return "?";
}

}  // namespace detail

/// Applies one `key = value` setting. Unknown keys are configuration errors.
inline void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  using namespace detail;
  if (key == "instance") cfg.instance.kind = parse_instance_kind(value);
  else if (key == "input") cfg.instance.source = value;
  else if (key == "alpha") {
    if (value.empty() || value == "none") cfg.instance.alpha.reset();
    else cfg.instance.alpha = config_double(key, value);
  } else if (key == "psi") cfg.instance.psi = value;
  else if (key == "solver") cfg.solver = parse_solver_kind(value);
  else if (key == "lambda0") cfg.lambda0 = config_double(key, value);
  else if (key == "iters") {
    const long long n = config_long(key, value);
    if (n < 1 || n > std::numeric_limits<int>::max()) throw ConfigError("iters out of range");
    cfg.iterations = static_cast<int>(n);
  } else if (key == "seed") {
    const long long s = config_long(key, value);
    if (s < 0) throw ConfigError("seed must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(s);
    cfg.instance.rng_seed = cfg.seed;
  } else if (key == "instance_seed") cfg.instance.rng_seed = static_cast<std::uint64_t>(config_long(key, value));
  else if (key == "dual_bound_factor") cfg.dual_bound_factor = config_double(key, value);
  else if (key == "lanczos_c") cfg.lmo.c = config_double(key, value);
  else if (key == "lanczos_tol") cfg.lmo.relative_tolerance = config_double(key, value);
  else if (key == "lanczos_restarts") cfg.lmo.restarts = static_cast<int>(config_long(key, value));
  else if (key == "lanczos_dense") cfg.lmo.dense = parse_bool(key, value);
  else if (key == "stride") {
    if (value == "every") cfg.trace_stride.kind = TraceStride::Kind::kEvery;
    else if (value == "dense-geometric") cfg.trace_stride.kind = TraceStride::Kind::kDenseThenGeometric;
    else if (value == "geometric") cfg.trace_stride.kind = TraceStride::Kind::kGeometric;
    else throw ConfigError("stride: expected every, dense-geometric or geometric");
  } else if (key == "stride_dense_until") cfg.trace_stride.dense_until = config_long(key, value);
  else if (key == "stride_per_decade") cfg.trace_stride.per_decade = static_cast<int>(config_long(key, value));
  else if (key == "wall_time") cfg.wall_time = parse_bool(key, value);
  else if (key == "out") cfg.output = value;
  else throw ConfigError("unknown configuration key '" + key + "'");
}

/// Reads a flat `key = value` file; '#' starts a comment.
inline void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    apply_setting(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
}

/// Every setting of `cfg` as key/value pairs, in a fixed order.
inline std::vector<std::pair<std::string, std::string>> describe(const RunConfig& cfg) {
  using detail::fmt17;
  return {
      {"instance", to_string(cfg.instance.kind)},
      {"input", cfg.instance.source},
      {"alpha", cfg.instance.alpha ? fmt17(*cfg.instance.alpha) : "none"},
      {"psi", cfg.instance.psi},
      {"instance_seed", std::to_string(cfg.instance.rng_seed)},
      {"solver", to_string(cfg.solver)},
      {"lambda0", fmt17(cfg.lambda0)},
      {"iters", std::to_string(cfg.iterations)},
      {"seed", std::to_string(cfg.seed)},
      {"dual_bound_factor", fmt17(cfg.dual_bound_factor)},
      {"lanczos_c", fmt17(cfg.lmo.c)},
      {"lanczos_tol", fmt17(cfg.lmo.relative_tolerance)},
      {"lanczos_restarts", std::to_string(cfg.lmo.restarts)},
      {"lanczos_dense", cfg.lmo.dense ? "true" : "false"},
      {"stride", detail::stride_name(cfg.trace_stride.kind)},
      {"stride_dense_until", std::to_string(cfg.trace_stride.dense_until)},
      {"stride_per_decade", std::to_string(cfg.trace_stride.per_decade)},
      {"wall_time", cfg.wall_time ? "true" : "false"},
  };
}

inline StepRule make_step_rule(const RunConfig& cfg, const ProblemSpec& p) {
  StepRule rule;
  rule.variant = variant_of(cfg.solver);
  rule.lambda0 = cfg.lambda0;
  rule.dual_bound =
      StepRule::proportional_bound(cfg.dual_bound_factor, p.domain.diameter, p.constraint_map.norm_bound, cfg.lambda0);
  return rule;
}

inline SolverOptions make_solver_options(const RunConfig& cfg, const ProblemSpec& p) {
  SolverOptions o;
  o.rule = make_step_rule(cfg, p);
  o.iterations = cfg.iterations;
  o.stride = cfg.trace_stride;
  o.seed = cfg.seed;
  o.record_wall_time = cfg.wall_time;
  return o;
}

struct ExperimentResult {
  ProblemSpec problem;
  SolverResult run;
  StepRule rule;
  std::vector<std::string> warnings;
  /// Provenance lines written to the CSV header.
  std::vector<std::pair<std::string, std::string>> metadata;
};

// ---------------------------------------------------------------------------
// CSV traces.

inline constexpr const char* kTraceHeader = "k,lmo_calls,objective,feasibility,dual_norm,lambda,sigma,eta,wall_time";

inline void write_csv(const Trace& trace, std::ostream& out,
                      const std::vector<std::pair<std::string, std::string>>& metadata = {}) {
  using detail::fmt17;
  for (const auto& [k, v] : metadata) out << "# " << k << " = " << v << '\n';
  out << kTraceHeader << '\n';
  for (const auto& r : trace) {
    out << r.k << ',' << r.lmo_calls << ',' << fmt17(r.objective) << ',' << fmt17(r.feasibility) << ','
        << fmt17(r.dual_norm) << ',' << fmt17(r.lambda) << ',' << fmt17(r.sigma) << ',' << fmt17(r.eta) << ','
        << fmt17(r.wall_time) << '\n';
  }
}

inline void export_csv(const Trace& trace, const std::string& path,
                       const std::vector<std::pair<std::string, std::string>>& metadata = {}) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path + " for writing");
  write_csv(trace, out, metadata);
  out.flush();
  if (!out) throw Error("write to " + path + " failed");
}

struct ParsedTrace {
  Trace records;
  std::map<std::string, std::string> metadata;
};

inline ParsedTrace parse_csv(std::istream& in, const std::string& source = "<stream>") {
  ParsedTrace out;
  std::string line;
  long lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos)
        out.metadata[detail::trim(line.substr(1, eq - 1))] = detail::trim(line.substr(eq + 1));
      continue;
    }
    if (!header) {
      if (line != kTraceHeader) throw ParseError(source + ":" + std::to_string(lineno) + ": unexpected header");
      header = true;
      continue;
    }
    const auto cells = detail::split(line, ',');
    auto bad = [&] { return ParseError(source + ":" + std::to_string(lineno) + ": malformed row"); };
    if (cells.size() != 9) throw bad();
    TraceRecord r;
    long long k = 0, calls = 0;
    double* fields[] = {&r.objective, &r.feasibility, &r.dual_norm, &r.lambda, &r.sigma, &r.eta, &r.wall_time};
    if (!detail::parse_long(cells[0], k) || !detail::parse_long(cells[1], calls)) throw bad();
    for (int i = 0; i < 7; ++i) {
      char* end = nullptr;
      *fields[i] = std::strtod(cells[i + 2].c_str(), &end);
      if (end == cells[i + 2].c_str() || *end != '\0') throw bad();
    }
    r.k = k;
    r.lmo_calls = calls;
    out.records.push_back(r);
  }
  if (!header) throw ParseError(source + ": missing header");
  return out;
}

inline ParsedTrace parse_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open trace " + path);
  return parse_csv(in, path);
}

// ---------------------------------------------------------------------------
// Experiments.

/// Builds the instance, runs the configured solver and, when cfg.output is
/// set, writes the CSV trace. Solver failures are reported in
/// result.run.failure (the partial trace is still written).
inline ExperimentResult run_experiment(const RunConfig& cfg, const SolverOptions* overrides = nullptr) {
  cfg.validate();
  ExperimentResult res;
  const InstanceData data = load_instance_data(cfg.instance);
  res.warnings = data.warnings;
  res.problem = build_instance(cfg.instance, data, cfg.lmo);
  SolverOptions opts = overrides ? *overrides : make_solver_options(cfg, res.problem);
  res.rule = opts.rule;
  res.run = run_cgal(res.problem, opts);

  using detail::fmt17;
  res.metadata = describe(cfg);
  res.metadata.emplace_back("diameter", fmt17(res.problem.domain.diameter));
  res.metadata.emplace_back("norm_a", fmt17(res.problem.constraint_map.norm_bound));
  res.metadata.emplace_back("lipschitz_f", fmt17(res.problem.objective.lipschitz));
  res.metadata.emplace_back("dual_bound",
                            res.rule.variant == DualVariant::kOff ? "0" : fmt17(res.rule.dual_bound_at(1)));
  res.metadata.emplace_back("variant", to_string(res.rule.variant));
  if (res.run.failure) res.metadata.emplace_back("failure", *res.run.failure);
  if (!cfg.output.empty()) export_csv(res.run.trace, cfg.output, res.metadata);
  return res;
}

struct GridSpec {
  double center = 1.0;
  double factor = 10.0;
  int span = 5;
};

struct GridPoint {
  double lambda0 = 0.0;
  double objective = 0.0;
  double feasibility = 0.0;
  double score = std::numeric_limits<double>::infinity();
  std::optional<std::string> failure;
};

struct TuneResult {
  double best_lambda0 = 0.0;
  /// True when the winner is an interior grid point no worse than both neighbours.
  bool interior = false;
  bool widened = false;
  double f_hat = 0.0;
  std::vector<GridPoint> points;  // sorted by lambda0
};

/// Grid search over lambda0 = center * factor^j. The objective residual is
/// measured against cfg's reference value when given, otherwise against the
/// final objective of the most feasible grid run. The score is
/// max(|f - f_hat|, feasibility) after cfg.iterations; ties go to the
/// smaller lambda0.
inline TuneResult tune_lambda0(const ProblemSpec& problem, const RunConfig& base, const GridSpec& grid,
                               std::optional<double> reference_value = std::nullopt) {
  if (grid.span < 3) throw ConfigError("tune: grid span must be >= 3");
  if (!(grid.center > 0.0) || !(grid.factor > 1.0)) throw ConfigError("tune: invalid grid");

  std::map<int, GridPoint> runs;
  auto run_at = [&](int j) {
    if (runs.count(j)) return;
    RunConfig cfg = base;
    cfg.lambda0 = grid.center * std::pow(grid.factor, j);
    SolverOptions opts = make_solver_options(cfg, problem);
    opts.stride.kind = TraceStride::Kind::kGeometric;
    opts.stride.per_decade = 1;
    opts.record_wall_time = false;
    GridPoint gp;
    gp.lambda0 = cfg.lambda0;
    try {
      const SolverResult r = run_cgal(problem, opts);
      if (r.ok() && !r.trace.empty()) {
        gp.objective = r.trace.back().objective;
        gp.feasibility = r.trace.back().feasibility;
      } else {
        gp.failure = r.failure.value_or("empty trace");
      }
    } catch (const NumericError& e) {
      gp.failure = e.what();
    }
    runs[j] = gp;
  };

  auto score_all = [&](TuneResult& out) {
    double f_hat = reference_value.value_or(0.0);
    if (!reference_value) {
      double best_feas = std::numeric_limits<double>::infinity();
      for (const auto& [j, gp] : runs)
        if (!gp.failure && gp.feasibility < best_feas) {
          best_feas = gp.feasibility;
          f_hat = gp.objective;
        }
    }
    out.f_hat = f_hat;
    for (auto& [j, gp] : runs)
      gp.score = gp.failure ? std::numeric_limits<double>::infinity()
                            : std::max(std::abs(gp.objective - f_hat), gp.feasibility);
  };

  // Returns the index of the best interior point that is no worse than both
  // neighbours, or of the overall best point when none exists. Equal scores
  // keep the smaller lambda0.
  auto select = [&](bool& interior) {
    int best = runs.begin()->first;
    double best_score = std::numeric_limits<double>::infinity();
    interior = false;
    for (auto it = runs.begin(); it != runs.end(); ++it) {
      if (it == runs.begin() || std::next(it) == runs.end()) continue;
      const double s = it->second.score;
      if (s <= std::prev(it)->second.score && s <= std::next(it)->second.score && s < best_score) {
        best_score = s;
        best = it->first;
        interior = true;
      }
    }
    if (interior) return best;
    for (const auto& [j, gp] : runs)
      if (gp.score < best_score) {
        best_score = gp.score;
        best = j;
      }
    return best;
  };

  const int lo = -(grid.span - 1) / 2;
  const int hi = lo + grid.span - 1;
  for (int j = lo; j <= hi; ++j) run_at(j);

  TuneResult out;
  score_all(out);
  bool interior = false;
  int best = select(interior);
  if (!interior) {
    // Widen once towards the better edge.
    const int first = runs.begin()->first, last = runs.rbegin()->first;
    if (best == first) run_at(first - 1);
    else if (best == last) run_at(last + 1);
    else {
      run_at(first - 1);
      run_at(last + 1);
    }
    out.widened = true;
    score_all(out);
    best = select(interior);
  }
  bool any_ok = false;
  for (const auto& [j, gp] : runs) any_ok = any_ok || !gp.failure;
  if (!any_ok) throw NumericError("tune: every grid run failed");

  out.best_lambda0 = runs.at(best).lambda0;
  out.interior = interior;
  for (const auto& [j, gp] : runs) out.points.push_back(gp);
  return out;
}

inline TuneResult tune_lambda0(const RunConfig& base, const GridSpec& grid,
                               std::optional<double> reference_value = std::nullopt) {
  base.validate();
  const InstanceData data = load_instance_data(base.instance);
  return tune_lambda0(build_instance(base.instance, data, base.lmo), base, grid, reference_value);
}

}  // namespace cgalopt
