// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cgalopt/cgalopt.hpp"

using namespace cgalopt;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Instance {
  std::string name;
  ProblemSpec problem;
  ReferenceSolution ref;
};

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    pass = false;
    add(why);
  }
  void add(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Criteria 8 and 9 are checked on every run made by this binary.
struct GlobalChecks {
  long iterations_checked = 0;
  long dual_violations = 0;
  long sigma_violations = 0;
  std::string first_dual;
  int runs = 0;
  int domain_violations = 0;
  std::string first_domain;

  void watch(SolverOptions& o, const std::string& label) {
    const StepRule rule = o.rule;
    auto inner = o.observer;
    o.observer = [this, rule, inner, label](const SolverState& st, const TraceRecord& rec) {
      ++iterations_checked;
      if (rule.variant != DualVariant::kOff) {
        const double bound = rule.dual_bound_at(static_cast<int>(rec.k + 1));
        if (!(rec.dual_norm <= bound + 1e-9)) {
          if (dual_violations++ == 0)
            first_dual = label + " k=" + std::to_string(rec.k) + " |y|=" + fmt("%.6g", rec.dual_norm);
        }
      }
      if (rule.variant == DualVariant::kDecreasing &&
          !(rec.sigma <= rule.lambda0 / (2.0 * std::sqrt(static_cast<double>(rec.k) + 1.0)))) {
        if (sigma_violations++ == 0) first_dual += " sigma cap broken at " + label;
      }
      if (inner) inner(st, rec);
    };
  }

  void final_iterate(const ProblemSpec& p, const Matrix& x, const std::string& label) {
    ++runs;
    if (!p.domain.spectrahedral) return;
    const double tr = x.trace();
    const double bound = p.domain.trace_bound;
    const bool trace_ok = p.domain.trace_mode == TraceMode::kEquality ? std::abs(tr - bound) <= 1e-6
                                                                       : tr <= bound + 1e-6;
    const double lmin = min_eigenvalue(symmetrize(x));
    const bool psd_ok = lmin >= -1e-6 * std::abs(tr);
    if (!trace_ok || !psd_ok) {
      if (domain_violations++ == 0)
        first_domain = label + " tr=" + fmt("%.10g", tr) + " lmin=" + fmt("%.3g", lmin);
    }
  }
};

GlobalChecks g_checks;

SolverOptions make_options(const ProblemSpec& p, DualVariant v, double lambda0, int iters) {
  SolverOptions o;
  o.rule.variant = v;
  o.rule.lambda0 = lambda0;
  o.rule.dual_bound = StepRule::proportional_bound(1.0, p.domain.diameter, p.constraint_map.norm_bound, lambda0);
  o.iterations = iters;
  o.record_wall_time = false;
  return o;
}

SolverResult checked_run(const ProblemSpec& p, SolverOptions o, const std::string& label) {
  g_checks.watch(o, label);
  SolverResult r = run_cgal(p, o);
  g_checks.final_iterate(p, r.state.x, label);
  return r;
}

BoundConstants bound_constants(const ProblemSpec& p, const StepRule& rule) {
  BoundConstants c;
  c.diameter = p.domain.diameter;
  c.norm_a = p.constraint_map.norm_bound;
  c.lipschitz_f = p.objective.lipschitz;
  c.lambda0 = rule.lambda0;
  c.variant = rule.variant;
  c.dual_bound = rule.dual_bound;
  return c;
}

void report(int id, const char* title, const Outcome& o, double secs, int& failures) {
  std::printf("criterion %2d %s  %s (%.1fs): %s\n", id, o.pass ? "PASS" : "FAIL", title, secs, o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

/// Least-squares slope of log10(feasibility) against log10(k) over
/// [k_lo, k_hi], using records at least 0.01 apart in log10(k).
double loglog_slope(const Trace& t, double k_lo, double k_hi) {
  std::vector<double> xs, ys;
  double last = -1.0;
  for (const auto& r : t) {
    if (r.k < k_lo || r.k > k_hi || !(r.feasibility > 0.0)) continue;
    const double lx = std::log10(static_cast<double>(r.k));
    if (!xs.empty() && lx - last < 0.01) continue;
    xs.push_back(lx);
    ys.push_back(std::log10(r.feasibility));
    last = lx;
  }
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

long first_below(const Trace& t, double feas) {
  for (const auto& r : t)
    if (r.feasibility <= feas) return r.k;
  return -1;
}

double tuned_lambda0(const ProblemSpec& p, SolverKind solver, int iters, double f_star, std::string& note) {
  RunConfig cfg;
  cfg.solver = solver;
  cfg.iterations = iters;
  cfg.wall_time = false;
  GridSpec grid;
  grid.center = 1.0;
  grid.span = 5;
  const TuneResult t = tune_lambda0(p, cfg, grid, f_star);
  note = to_string(solver) + " lambda0=" + fmt("%g", t.best_lambda0) + (t.interior ? "" : " (grid edge)");
  return t.best_lambda0;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main() {
  int failures = 0;
  const auto t_all = Clock::now();

  // Tiny instances with dense references at tol 1e-8.
  std::vector<Instance> tiny;
  {
    ReferenceOptions ro;
    ro.tol = 1e-8;
    tiny.push_back({"triangle-maxcut", build_maxcut(graph_laplacian(triangle_graph())), {}});
    tiny.push_back({"kmeans-5", build_kmeans(random_distance_matrix(5, 2, 1), 2.0), {}});
    tiny.push_back({"geneig-10",
                    build_geneig(synth_matrix(SynthKind::kGaussian, 10, 0.0, 1), Matrix::Identity(10, 10), 2.0),
                    {}});
    for (auto& inst : tiny) inst.ref = dense_reference_solve(inst.problem, ro);
  }

  // 1. Oracle equivalence.
  std::map<std::string, double> tiny_lambda;
  {
    const auto t0 = Clock::now();
    Outcome o;
    for (auto& inst : tiny) {
      const auto ti = Clock::now();
      std::string note;
      const double f_star = inst.ref.f_star;
      const double lambda0 = tuned_lambda0(inst.problem, SolverKind::kCgalConst, 100000, f_star, note);
      tiny_lambda[inst.name] = lambda0;
      long hit = -1;
      SolverOptions opts = make_options(inst.problem, DualVariant::kConstant, lambda0, 100000);
      opts.stride.kind = TraceStride::Kind::kGeometric;
      opts.observer = [&](const SolverState&, const TraceRecord& rec) {
        if (hit < 0 && std::abs(rec.objective - f_star) <= 1e-2 * (1.0 + std::abs(f_star)) &&
            rec.feasibility <= 1e-2)
          hit = rec.k;
      };
      const SolverResult r = checked_run(inst.problem, opts, inst.name + "/const");
      const double secs = seconds_since(ti);
      std::string line = inst.name + ": f*=" + fmt("%.8g", f_star) + " " + note + " reached at k=" +
                         std::to_string(hit) + fmt(" in %.1fs", secs);
      if (!r.ok() || hit < 0 || secs >= 120.0) o.fail(line);
      else o.add(line);
    }
    report(1, "oracle equivalence", o, seconds_since(t0), failures);
  }

  // 2. Objective and feasibility bounds on every recorded k <= 1e4.
  {
    const auto t0 = Clock::now();
    Outcome o;
    for (auto& inst : tiny) {
      for (DualVariant v : {DualVariant::kConstant, DualVariant::kDecreasing, DualVariant::kOff}) {
        const double lambda0 = tiny_lambda[inst.name];
        SolverOptions opts = make_options(inst.problem, v, lambda0, 10000);
        opts.stride.kind = TraceStride::Kind::kEvery;
        std::vector<double> dist;
        opts.observer = [&](const SolverState& st, const TraceRecord&) {
          dist.push_back((st.y - inst.ref.y_star).norm());
        };
        const SolverResult r = checked_run(inst.problem, opts, inst.name + "/" + to_string(v));
        const BoundReport rep = check_theorem1(r.trace, inst.ref, bound_constants(inst.problem, opts.rule), dist);
        const std::string label = inst.name + "/" + to_string(v);
        if (!r.ok()) o.fail(label + " solver failure: " + *r.failure);
        else if (!rep.passed) o.fail(label + " " + rep.first_failure + " (" + std::to_string(rep.violations) + " violations)");
        else o.add(label + " ok");
      }
    }
    report(2, "convergence bounds", o, seconds_since(t0), failures);
  }

  // 3. Augmented-Lagrangian recursion on the triangle, plus the broken-schedule control.
  {
    const auto t0 = Clock::now();
    Outcome o;
    const Instance& tri = tiny[0];
    const double lambda0 = tiny_lambda[tri.name];
    auto snapshots = [&](SolverOptions opts, const std::string& label) {
      std::vector<StateSnapshot> snaps;
      opts.observer = [&](const SolverState& st, const TraceRecord& rec) {
        if ((rec.k & (rec.k - 1)) == 0) snaps.push_back({rec.k, st.x, st.y, st.lambda});
      };
      checked_run(tri.problem, opts, label);
      return snaps;
    };
    // The bound holds for every lambda0; check the tuned one and a large one.
    for (double l0 : {lambda0, 10.0}) {
      SolverOptions opts = make_options(tri.problem, DualVariant::kConstant, l0, 8192);
      const auto snaps = snapshots(opts, "triangle/recursion");
      const BoundReport rep =
          check_appendix_recursion(snaps, tri.problem, tri.ref, bound_constants(tri.problem, opts.rule));
      const std::string label = "lambda0=" + fmt("%g", l0) + ": ";
      if (snaps.size() != 14 || !rep.passed)
        o.fail(label + std::to_string(snaps.size()) + " snapshots, " + rep.first_failure);
      else
        o.add(label + "14 snapshots k=1..8192 hold, worst relative margin " + fmt("%.3g", rep.worst_margin));
    }

    // Broken schedule: a penalty that decays like 1/k instead of growing.
    SolverOptions broken = make_options(tri.problem, DualVariant::kConstant, 10.0, 8192);
    broken.penalty_override = [](int k) { return 10.0 / k; };
    const auto bad = snapshots(broken, "triangle/decaying-penalty");
    const BoundReport neg = check_appendix_recursion(bad, tri.problem, tri.ref, bound_constants(tri.problem, broken.rule));
    if (neg.passed) o.fail("decaying-penalty control did not violate the bound");
    else o.add("decaying-penalty control fails as expected (" + neg.first_failure + ")");
    report(3, "augmented Lagrangian recursion", o, seconds_since(t0), failures);
  }

  // 4, 5, 10. Rates and dominance on the 47-vertex graph.
  Trace cgal_trace, hcgm_trace;
  RunConfig cgal_cfg, hcgm_cfg;
  {
    const auto t0 = Clock::now();
    Outcome o4, o5;
    const std::string graph = std::string(CGALOPT_DATA_DIR) + "/graph47.txt";
    InstanceConfig ic;
    ic.kind = InstanceKind::kMaxcut;
    ic.source = graph;
    const ProblemSpec p = build_instance(ic);
    ReferenceOptions ro;
    ro.max_dim = 64;
    const ReferenceSolution ref = dense_reference_solve(p, ro);
    std::string note_c, note_h;
    const double lc = tuned_lambda0(p, SolverKind::kCgalConst, 100000, ref.f_star, note_c);
    const double lh = tuned_lambda0(p, SolverKind::kHcgm, 100000, ref.f_star, note_h);

    const std::filesystem::path dir = std::filesystem::temp_directory_path();
    for (auto* cfg : {&cgal_cfg, &hcgm_cfg}) {
      cfg->instance = ic;
      cfg->iterations = 100000;
      cfg->wall_time = false;
    }
    cgal_cfg.solver = SolverKind::kCgalConst;
    cgal_cfg.lambda0 = lc;
    cgal_cfg.output = (dir / "cgalopt_acceptance_cgal_a.csv").string();
    hcgm_cfg.solver = SolverKind::kHcgm;
    hcgm_cfg.lambda0 = lh;
    hcgm_cfg.output = (dir / "cgalopt_acceptance_hcgm_a.csv").string();

    for (auto* cfg : {&cgal_cfg, &hcgm_cfg}) {
      const ProblemSpec& q = p;
      SolverOptions opts = make_solver_options(*cfg, q);
      g_checks.watch(opts, "graph47/" + to_string(cfg->solver));
      const ExperimentResult res = run_experiment(*cfg, &opts);
      g_checks.final_iterate(res.problem, res.run.state.x, "graph47/" + to_string(cfg->solver));
      (cfg == &cgal_cfg ? cgal_trace : hcgm_trace) = res.run.trace;
    }
    const double sc = loglog_slope(cgal_trace, 1e2, 1e5);
    const double sh = loglog_slope(hcgm_trace, 1e2, 1e5);
    const double secs = seconds_since(t0);
    const std::string line = "f*=" + fmt("%.10g", ref.f_star) + "; " + note_c + " slope " + fmt("%.3f", sc) + "; " +
                             note_h + " slope " + fmt("%.3f", sh);
    if (sh < -0.65 || sh > -0.35 || sc > -0.85 || secs >= 600.0) o4.fail(line + fmt(" (%.0fs)", secs));
    else o4.add(line);
    report(4, "empirical rates", o4, secs, failures);

    const long kc = first_below(cgal_trace, 1e-3);
    const long kh = first_below(hcgm_trace, 1e-3);
    const std::string hl = kh < 0 ? "> " + std::to_string(hcgm_trace.back().k) : std::to_string(kh);
    const std::string l5 = "cgal reaches 1e-3 at k=" + std::to_string(kc) + ", hcgm at k " + hl;
    const bool hcgm_late = kh < 0 ? hcgm_trace.back().k >= 5 * kc : kh >= 5 * kc;
    if (kc < 0 || !hcgm_late) o5.fail(l5);
    else o5.add(l5 + (kh < 0 ? " (ratio > " : " (ratio ") +
                fmt("%.1f)", static_cast<double>(kh < 0 ? hcgm_trace.back().k : kh) / static_cast<double>(kc)));
    report(5, "CGAL dominance", o5, 0.0, failures);
  }

  // 6. LMO accuracy.
  {
    const auto t0 = Clock::now();
    Outcome o;
    double worst = 0.0;
    for (Index n : {10, 50, 100}) {
      for (std::uint64_t s = 0; s < 100; ++s) {
        const Matrix v = synth_matrix(SynthKind::kGaussian, n, 0.0, mix_seed(n, s));
        LanczosConfig cfg;
        cfg.max_iterations = static_cast<int>(n);
        cfg.tolerance = 1e-10 * v.norm();
        cfg.rng_seed = s;
        const double beta = 1.0 + static_cast<double>(s % 3);
        const double truth = beta * Eigen::SelfAdjointEigenSolver<Matrix>(v).eigenvalues()(0);
        const double got = lmo_spectrahedron(v, beta, TraceMode::kEquality, cfg).value(v);
        worst = std::max(worst, std::abs(got - truth) / std::abs(truth));
      }
    }
    if (worst > 1e-6) o.fail("worst relative error " + fmt("%.3g", worst));
    else o.add("300 matrices, worst relative error " + fmt("%.3g", worst));
    report(6, "LMO accuracy", o, seconds_since(t0), failures);
  }

  // 7. Smoothing: finite differences and the Moreau identity.
  {
    const auto t0 = Clock::now();
    Outcome o;
    Rng rng(77);
    const Matrix bmat = gaussian_matrix(6, 4, rng);
    auto bm = std::make_shared<const Matrix>(bmat);
    const LinearOperator b{PointShape::vector(4), 6, [bm](const Matrix& x) -> Vector { return *bm * x.col(0); },
                           [bm](const Vector& u) -> Matrix { return bm->transpose() * u; },
                           Eigen::JacobiSVD<Matrix>(bmat).singularValues()(0)};
    for (const NonsmoothTerm& g : {l1_term(b, 1.5), linf_term(b, 1.5), hinge_term(b, 1.5)}) {
      const SmoothedTerm term(g, 0.1, 0.1 * gaussian_vector(6, rng));
      double worst_fd = 0.0, worst_moreau = 0.0;
      for (int t = 0; t < 50; ++t) {
        const Matrix x = gaussian_matrix(4, 1, rng);
        const Matrix grad = smoothed_grad(term, x);
        Matrix fd(4, 1);
        for (Index i = 0; i < 4; ++i) {
          Matrix e = Matrix::Zero(4, 1);
          e(i) = 1e-6;
          fd(i) = (smoothed_value(term, b.forward(x + e)) - smoothed_value(term, b.forward(x - e))) / 2e-6;
        }
        worst_fd = std::max(worst_fd, (fd - grad).norm() / std::max(1.0, grad.norm()));
        const Vector w = 2.0 * gaussian_vector(6, rng);
        const double step = 0.3;
        worst_moreau = std::max(
            worst_moreau, (g.prox(w, step) + step * prox_conjugate(g, w / step, 1.0 / step) - w).norm());
      }
      const std::string line = g.name + " fd " + fmt("%.2g", worst_fd) + " moreau " + fmt("%.2g", worst_moreau);
      if (worst_fd > 1e-5 || worst_moreau > 1e-10) o.fail(line);
      else o.add(line);
    }
    report(7, "smoothing correctness", o, seconds_since(t0), failures);
  }

  // 10. Determinism of criterion 4's configs.
  Outcome o10;
  double secs10 = 0.0;
  {
    const auto t0 = Clock::now();
    for (RunConfig cfg : {cgal_cfg, hcgm_cfg}) {
      const std::string first = read_file(cfg.output);
      cfg.output.replace(cfg.output.size() - 6, 6, "_b.csv");
      const ExperimentResult res = run_experiment(cfg);
      g_checks.final_iterate(res.problem, res.run.state.x, "graph47/rerun");
      const std::string second = read_file(cfg.output);
      const std::string line = to_string(cfg.solver) + " " + std::to_string(first.size()) + " bytes";
      if (first.empty() || first != second) o10.fail(line + " differ");
      else o10.add(line + " identical");
    }
    secs10 = seconds_since(t0);
  }

  // 8 and 9 cover every run above.
  {
    Outcome o;
    if (g_checks.dual_violations > 0 || g_checks.sigma_violations > 0)
      o.fail(std::to_string(g_checks.dual_violations) + " dual-norm and " + std::to_string(g_checks.sigma_violations) +
             " step-cap violations, first: " + g_checks.first_dual);
    else
      o.add(std::to_string(g_checks.iterations_checked) + " iterations checked");
    report(8, "dual safeguard", o, 0.0, failures);
  }
  {
    Outcome o;
    if (g_checks.domain_violations > 0)
      o.fail(std::to_string(g_checks.domain_violations) + " runs violate, first: " + g_checks.first_domain);
    else
      o.add(std::to_string(g_checks.runs) + " final iterates checked");
    report(9, "domain invariants", o, 0.0, failures);
  }
  report(10, "determinism", o10, secs10, failures);

  std::printf("%d of 10 criteria failed, total %.0fs\n", failures, seconds_since(t_all));
  return failures;
}
