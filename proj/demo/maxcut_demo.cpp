// Max-cut relaxation of a graph with CGAL and the penalty baseline.
//   maxcut_demo [edge-list file] [iterations]
#include <cstdio>
#include <string>

#include "cgalopt/cgalopt.hpp"

using namespace cgalopt;

int main(int argc, char** argv) {
  const Graph g = argc > 1 ? parse_edge_list(argv[1]) : random_graph(47, 132, 97);
  const int iters = argc > 2 ? std::stoi(argv[2]) : 20000;
  const ProblemSpec p = build_maxcut(graph_laplacian(g));
  std::printf("graph: n=%ld, %zu edges\n", static_cast<long>(g.n), g.edges.size());

  for (DualVariant v : {DualVariant::kConstant, DualVariant::kOff}) {
    SolverOptions opts;
    opts.iterations = iters;
    opts.rule.variant = v;
    opts.rule.lambda0 = 1.0;
    opts.rule.dual_bound = StepRule::proportional_bound(1.0, p.domain.diameter, p.constraint_map.norm_bound, 1.0);
    opts.stride.kind = TraceStride::Kind::kGeometric;
    opts.stride.per_decade = 1;
    const SolverResult r = run_cgal(p, opts);
    std::printf("\n%s\n%10s %16s %14s\n", v == DualVariant::kOff ? "penalty (hcgm)" : "cgal (const)", "k",
                "cut value", "feasibility");
    for (const auto& rec : r.trace)
      std::printf("%10ld %16.8f %14.3e\n", rec.k, -rec.objective, rec.feasibility);
    if (!r.ok()) std::printf("stopped: %s\n", r.failure->c_str());
  }
  return 0;
}
