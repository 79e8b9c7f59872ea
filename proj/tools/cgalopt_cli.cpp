#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>

#include "cgalopt/cgalopt.hpp"

using namespace cgalopt;

namespace {

enum ExitCode { kOk = 0, kOther = 1, kConfig = 2, kParse = 3, kNumeric = 4, kVerify = 5 };

// Settings shared by solve, tune and reference. Values given on the command
// line override the config file.
struct RunFlags {
  std::string config;
  std::map<std::string, std::string> overrides;
  std::vector<std::string> extra;

  void add_to(CLI::App* app) {
    app->add_option("--config", config, "flat key = value config file");
    auto opt = [&](const char* flag, const char* key, const char* help) {
      app->add_option_function<std::string>(flag, [this, key](const std::string& v) { overrides[key] = v; }, help);
    };
    opt("--instance", "instance", "maxcut | kmeans | geneig");
    opt("--input", "input", "edge list / matrix file or synthetic:... descriptor");
    opt("--alpha", "alpha", "cluster count (kmeans) or trace cap (geneig)");
    opt("--psi", "psi", "geneig constraint matrix: identity | gaussian | file");
    opt("--solver", "solver", "cgal-const | cgal-decr | hcgm");
    opt("--lambda0", "lambda0", "initial penalty");
    opt("--iters", "iters", "iteration budget");
    opt("--seed", "seed", "random seed");
    opt("--out", "out", "trace CSV path");
    app->add_option("--set", extra, "extra key=value settings");
  }

  RunConfig resolve() const {
    RunConfig cfg;
    if (!config.empty()) load_config_file(cfg, config);
    // Seed first so an explicit instance_seed in --set still wins.
    if (auto it = overrides.find("seed"); it != overrides.end()) apply_setting(cfg, "seed", it->second);
    for (const auto& [k, v] : overrides)
      if (k != "seed") apply_setting(cfg, k, v);
    for (const auto& kv : extra) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
      apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
  }
};

int cmd_solve(const RunFlags& flags) {
  const RunConfig cfg = flags.resolve();
  const ExperimentResult res = run_experiment(cfg);
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
  if (!res.run.trace.empty()) {
    const auto& last = res.run.trace.back();
    std::cout << std::setprecision(10) << to_string(cfg.solver) << " k=" << last.k << " objective=" << last.objective
              << " feasibility=" << last.feasibility << " dual_norm=" << last.dual_norm << '\n';
  }
  if (res.run.failure) {
    std::cerr << "error: " << *res.run.failure << '\n';
    return kNumeric;
  }
  return kOk;
}

int cmd_tune(const RunFlags& flags, const GridSpec& grid, std::optional<double> reference) {
  const RunConfig cfg = flags.resolve();
  const TuneResult t = tune_lambda0(cfg, grid, reference);
  std::cout << "lambda0,objective,feasibility,score,status\n" << std::setprecision(10);
  for (const auto& p : t.points)
    std::cout << p.lambda0 << ',' << p.objective << ',' << p.feasibility << ',' << p.score << ','
              << (p.failure ? "failed: " + *p.failure : "ok") << '\n';
  std::cout << "best lambda0 = " << t.best_lambda0 << (t.interior ? "" : " (boundary of grid)")
            << (t.widened ? " [grid widened]" : "") << " f_hat = " << t.f_hat << '\n';
  if (!cfg.output.empty()) {
    RunConfig best = cfg;
    best.lambda0 = t.best_lambda0;
    run_experiment(best);
  }
  return kOk;
}

double metadata_number(const ParsedTrace& t, const std::string& key) {
  const auto it = t.metadata.find(key);
  if (it == t.metadata.end()) throw ConfigError("trace is missing the '" + key + "' header entry");
  double v = 0.0;
  if (!detail::parse_double(it->second, v)) throw ParseError("trace header entry '" + key + "' is not a number");
  return v;
}

ReferenceSolution read_reference(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open reference " + path);
  nlohmann::json j;
  try {
    in >> j;
    ReferenceSolution ref;
    ref.f_star = j.at("f_star").get<double>();
    const auto y = j.at("y_star").get<std::vector<double>>();
    ref.y_star = Eigen::Map<const Vector>(y.data(), static_cast<Index>(y.size()));
    ref.primal_residual = j.value("primal_residual", 0.0);
    ref.dual_residual = j.value("dual_residual", 0.0);
    ref.kkt_gap = j.value("kkt_gap", 0.0);
    return ref;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

int cmd_verify(const std::string& trace_path, const std::string& ref_path) {
  const ParsedTrace t = parse_csv(trace_path);
  const ReferenceSolution ref = read_reference(ref_path);
  BoundConstants c;
  c.diameter = metadata_number(t, "diameter");
  c.norm_a = metadata_number(t, "norm_a");
  c.lipschitz_f = metadata_number(t, "lipschitz_f");
  c.lambda0 = metadata_number(t, "lambda0");
  const auto v = t.metadata.find("variant");
  if (v == t.metadata.end()) throw ConfigError("trace is missing the 'variant' header entry");
  if (v->second == "const") c.variant = DualVariant::kConstant;
  else if (v->second == "decr") c.variant = DualVariant::kDecreasing;
  else if (v->second == "off") c.variant = DualVariant::kOff;
  else throw ParseError("unknown variant '" + v->second + "' in trace header");
  const double dy = metadata_number(t, "dual_bound");
  c.dual_bound = [dy](int) { return dy; };

  const BoundReport rep = check_theorem1(t.records, ref, c);
  std::cout << "checked " << rep.checked << " inequalities over " << t.records.size() << " records, "
            << rep.violations << " violations\n";
  if (!rep.passed) throw VerificationError(rep.first_failure);
  std::cout << "all bounds hold\n";
  return kOk;
}

int cmd_reference(const RunFlags& flags, const ReferenceOptions& opts, const std::string& out) {
  const RunConfig cfg = flags.resolve();
  cfg.instance.validate();
  const ProblemSpec p = build_instance(cfg.instance, cfg.lmo);
  const ReferenceSolution ref = dense_reference_solve(p, opts);
  nlohmann::json j;
  j["f_star"] = ref.f_star;
  j["y_star"] = std::vector<double>(ref.y_star.data(), ref.y_star.data() + ref.y_star.size());
  j["primal_residual"] = ref.primal_residual;
  j["dual_residual"] = ref.dual_residual;
  j["kkt_gap"] = ref.kkt_gap;
  j["iterations"] = ref.iterations;
  std::cout << std::setprecision(12) << "f_star = " << ref.f_star << " after " << ref.iterations << " iterations\n";
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) throw Error("cannot write " + out);
    f << std::setw(2) << j << '\n';
  }
  return kOk;
}

int cmd_gen_graph(Index n, Index m, std::uint64_t seed, const std::string& out) {
  const Graph g = random_graph(n, m, seed);
  if (out.empty() || out == "-") {
    write_edge_list(g, std::cout);
    return kOk;
  }
  std::ofstream f(out);
  if (!f) throw Error("cannot write " + out);
  write_edge_list(g, f);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional-gradient augmented Lagrangian solver for SDP relaxations"};
  app.require_subcommand(1);

  RunFlags solve_flags, tune_flags, ref_flags;
  auto* solve = app.add_subcommand("solve", "run one solver and write a CSV trace");
  solve_flags.add_to(solve);

  auto* tune = app.add_subcommand("tune", "grid search for lambda0");
  tune_flags.add_to(tune);
  GridSpec grid;
  std::optional<double> reference_value;
  tune->add_option("--grid-center", grid.center, "grid center");
  tune->add_option("--grid-span", grid.span, "number of grid points (>= 3)");
  tune->add_option("--grid-factor", grid.factor, "grid ratio");
  tune->add_option("--reference-value", reference_value, "known optimal value");

  auto* verify = app.add_subcommand("verify", "check a trace against the convergence bounds");
  std::string trace_path, ref_path;
  verify->add_option("--trace", trace_path, "trace CSV written by solve")->required();
  verify->add_option("--reference", ref_path, "JSON written by the reference subcommand")->required();

  auto* reference = app.add_subcommand("reference", "dense reference solve of a small instance");
  ref_flags.add_to(reference);
  ReferenceOptions ref_opts;
  std::string ref_out;
  reference->add_option("--tol", ref_opts.tol, "residual tolerance");
  reference->add_option("--max-iter", ref_opts.max_iter, "iteration cap");
  reference->add_option("--max-dim", ref_opts.max_dim, "largest accepted matrix dimension");
  reference->add_option("--json", ref_out, "output JSON path");

  auto* gen = app.add_subcommand("gen-graph", "write a random simple graph in edge-list format");
  Index gen_n = 47, gen_m = 132;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--n", gen_n, "vertices");
  gen->add_option("--m", gen_m, "edges");
  gen->add_option("--seed", gen_seed, "random seed");
  gen->add_option("--out", gen_out, "output path (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*solve) return cmd_solve(solve_flags);
    if (*tune) return cmd_tune(tune_flags, grid, reference_value);
    if (*verify) return cmd_verify(trace_path, ref_path);
    if (*reference) return cmd_reference(ref_flags, ref_opts, ref_out);
    if (*gen) return cmd_gen_graph(gen_n, gen_m, gen_seed, gen_out);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfig;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const VerificationError& e) {
    std::cerr << "verification failed: " << e.what() << '\n';
    return kVerify;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOther;
  }
  return kOther;
}
