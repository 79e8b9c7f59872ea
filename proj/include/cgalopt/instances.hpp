#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cgalopt/cgal.hpp"
#include "cgalopt/oracles.hpp"
#include "cgalopt/problem.hpp"

namespace cgalopt {

struct Edge {
  Index i = 0;
  Index j = 0;
  double w = 1.0;
};

/// Undirected weighted graph with 0 <= i < j < n and no duplicate edges.
struct Graph {
  Index n = 0;
  std::vector<Edge> edges;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline bool skippable(const std::string& line) {
  const std::string t = trim(line);
  return t.empty() || t[0] == '%' || t[0] == '#';
}

inline std::vector<std::string> split_tokens(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

inline bool parse_long(const std::string& s, long long& out) {
  try {
    std::size_t pos = 0;
    out = std::stoll(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

inline bool parse_double(const std::string& s, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size() && std::isfinite(out);
  } catch (...) {
    return false;
  }
}

}  // namespace detail

/// Parses the G-set edge-list convention: a header "n m" followed by m lines
/// "i j [w]" with 1-based indices. Lines starting with '%' or '#' are ignored.
inline Graph parse_edge_list(std::istream& in, const std::string& source = "<stream>") {
  auto fail = [&](long line, const std::string& msg) {
    throw ParseError(source + ":" + std::to_string(line) + ": " + msg);
  };
  std::string line;
  long lineno = 0;
  long long n = -1, m = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::skippable(line)) continue;
    const auto tok = detail::split_tokens(line);
    if (tok.size() < 2 || !detail::parse_long(tok[0], n) || !detail::parse_long(tok[1], m) || n < 1 ||
        m < 0)
      fail(lineno, "expected header \"n m\"");
    break;
  }
  if (n < 0) throw ParseError(source + ": missing header");

  Graph g;
  g.n = static_cast<Index>(n);
  g.edges.reserve(static_cast<std::size_t>(m));
  std::set<std::pair<Index, Index>> seen;
  while (static_cast<long long>(g.edges.size()) < m && std::getline(in, line)) {
    ++lineno;
    if (detail::skippable(line)) continue;
    const auto tok = detail::split_tokens(line);
    long long a = 0, b = 0;
    double w = 1.0;
    if (tok.size() < 2 || tok.size() > 3 || !detail::parse_long(tok[0], a) || !detail::parse_long(tok[1], b) ||
        (tok.size() == 3 && !detail::parse_double(tok[2], w)))
      fail(lineno, "expected \"i j [w]\"");
    if (a < 1 || a > n || b < 1 || b > n) fail(lineno, "vertex index out of range 1.." + std::to_string(n));
    if (a == b) fail(lineno, "self-loop on vertex " + std::to_string(a));
    Index i = static_cast<Index>(std::min(a, b) - 1);
    Index j = static_cast<Index>(std::max(a, b) - 1);
    if (!seen.emplace(i, j).second) fail(lineno, "duplicate edge " + std::to_string(a) + " " + std::to_string(b));
    g.edges.push_back({i, j, w});
  }
  if (static_cast<long long>(g.edges.size()) != m)
    throw ParseError(source + ": expected " + std::to_string(m) + " edges, found " +
                     std::to_string(g.edges.size()));
  return g;
}

inline Graph parse_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open edge list " + path);
  return parse_edge_list(in, path);
}

inline void write_edge_list(const Graph& g, std::ostream& out) {
  out << g.n << ' ' << g.edges.size() << '\n';
  for (const auto& e : g.edges) out << (e.i + 1) << ' ' << (e.j + 1) << ' ' << e.w << '\n';
}

/// L = D - W.
inline Matrix graph_laplacian(const Graph& g) {
  Matrix L = Matrix::Zero(g.n, g.n);
  for (const auto& e : g.edges) {
    L(e.i, e.j) -= e.w;
    L(e.j, e.i) -= e.w;
    L(e.i, e.i) += e.w;
    L(e.j, e.j) += e.w;
  }
  return L;
}

inline Graph triangle_graph() { return Graph{3, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}}}; }

/// Uniformly random simple graph with m distinct edges and the given weight.
inline Graph random_graph(Index n, Index m, std::uint64_t seed, double weight = 1.0) {
  const Index max_edges = n * (n - 1) / 2;
  if (n < 2 || m < 0 || m > max_edges) throw ConfigError("random_graph: invalid n or m");
  Rng rng(seed);
  std::uniform_int_distribution<Index> pick(0, n - 1);
  std::set<std::pair<Index, Index>> chosen;
  Graph g;
  g.n = n;
  while (static_cast<Index>(g.edges.size()) < m) {
    Index a = pick(rng), b = pick(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (chosen.emplace(a, b).second) g.edges.push_back({a, b, weight});
  }
  return g;
}

// ---------------------------------------------------------------------------
// Problem builders.

/// Max-cut relaxation as a minimization: f(x) = -tr(Lx)/4 over
/// {x psd, tr x = n}, diag(x) = 1.
inline ProblemSpec build_maxcut(const Matrix& laplacian, LanczosSchedule schedule = {}) {
  const Index n = laplacian.rows();
  if (laplacian.cols() != n || (laplacian - laplacian.transpose()).norm() > 1e-12 * (1.0 + laplacian.norm()))
    throw ConfigError("build_maxcut: Laplacian must be symmetric");
  ProblemSpec p;
  p.name = "maxcut";
  p.objective = SmoothObjective::linear(-0.25 * laplacian);
  p.domain = make_spectrahedron(n, static_cast<double>(n), TraceMode::kEquality, schedule);
  p.constraint_map = LinearOperator::diag_extraction(n);
  p.constraint_set = singleton_set(Vector::Ones(n));
  return p;
}

/// k-means SDP: f(x) = tr(Dx) over {x psd, tr x = alpha}, A x = (x 1, x),
/// K = {1} x R_+^{n x n}, ||A|| = sqrt(n + 1).
inline ProblemSpec build_kmeans(const Matrix& distances, double alpha, LanczosSchedule schedule = {}) {
  const Index n = distances.rows();
  if (distances.cols() != n) throw ConfigError("build_kmeans: distance matrix must be square");
  if ((distances - distances.transpose()).norm() > 1e-12 * (1.0 + distances.norm()))
    throw ConfigError("build_kmeans: distance matrix must be symmetric");
  if (!(alpha > 0.0)) throw ConfigError("build_kmeans: alpha must be positive");
  ProblemSpec p;
  p.name = "kmeans";
  p.objective = SmoothObjective::linear(distances);
  p.domain = make_spectrahedron(n, alpha, TraceMode::kEquality, schedule);
  LinearOperator entries = LinearOperator::identity(PointShape::symmetric_matrix(n));
  p.constraint_map = LinearOperator::stack({LinearOperator::row_sum(n), std::move(entries)});
  p.constraint_map.norm_bound = std::sqrt(static_cast<double>(n) + 1.0);
  p.constraint_set = product_set({singleton_set(Vector::Ones(n)), nonneg_set(n * n)});
  return p;
}

/// Generalized eigenvector SDP: f(x) = -tr(phi x) over {x psd, tr x <= alpha},
/// tr(psi x) = 1, ||A|| = ||psi||_F.
inline ProblemSpec build_geneig(const Matrix& phi, const Matrix& psi, double alpha, LanczosSchedule schedule = {}) {
  const Index n = phi.rows();
  if (phi.cols() != n || psi.rows() != n || psi.cols() != n) throw ConfigError("build_geneig: shape mismatch");
  if (!(alpha > 0.0)) throw ConfigError("build_geneig: alpha must be positive");
  ProblemSpec p;
  p.name = "geneig";
  p.objective = SmoothObjective::linear(-phi);
  p.domain = make_spectrahedron(n, alpha, TraceMode::kAtMost, schedule);
  auto psi_ptr = std::make_shared<const Matrix>(psi);
  p.constraint_map = LinearOperator{PointShape::symmetric_matrix(n), 1,
                                    [psi_ptr](const Matrix& x) -> Vector {
                                      Vector out(1);
                                      out(0) = inner(*psi_ptr, x);
                                      return out;
                                    },
                                    [psi_ptr](const Vector& u) -> Matrix { return u(0) * *psi_ptr; },
                                    psi.norm()};
  p.constraint_set = singleton_set(Vector::Ones(1));
  return p;
}

// ---------------------------------------------------------------------------
// Synthetic data.

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// signs of diag(R) folded into Q.
inline Matrix random_orthogonal(Index n, std::uint64_t seed) {
  Rng rng(seed);
  const Matrix g = gaussian_matrix(n, n, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

enum class SynthKind { kGaussian, kPolyDecay, kExpDecay };

inline SynthKind parse_synth_kind(const std::string& s) {
  if (s == "gaussian") return SynthKind::kGaussian;
  if (s == "polydecay") return SynthKind::kPolyDecay;
  if (s == "expdecay") return SynthKind::kExpDecay;
  throw ConfigError("unknown synthetic matrix kind '" + s + "' (expected gaussian, polydecay, expdecay)");
}

/// Spectrum of the decaying generators: j^-p (polydecay) or 10^(-p j) (expdecay), j = 1..n.
inline Vector synth_spectrum(SynthKind kind, Index n, double param) {
  Vector d(n);
  for (Index j = 0; j < n; ++j) {
    const double idx = static_cast<double>(j + 1);
    d(j) = kind == SynthKind::kPolyDecay ? std::pow(idx, -param) : std::pow(10.0, -param * idx);
  }
  return d;
}

/// gaussian: symmetric part of an iid N(0,1) matrix. polydecay / expdecay:
/// Q^T diag(spectrum) Q with Q random orthogonal (or `rotation` if given).
inline Matrix synth_matrix(SynthKind kind, Index n, double param, std::uint64_t seed,
                           const std::optional<Matrix>& rotation = std::nullopt) {
  if (n < 1) throw ConfigError("synth_matrix: n must be >= 1");
  if (kind == SynthKind::kGaussian) {
    Rng rng(seed);
    const Matrix m = gaussian_matrix(n, n, rng);
    return symmetrize(m);
  }
  const Matrix q = rotation ? *rotation : random_orthogonal(n, seed);
  if (q.rows() != n || q.cols() != n) throw ConfigError("synth_matrix: rotation has the wrong shape");
  const Vector d = synth_spectrum(kind, n, param);
  return symmetrize(q.transpose() * d.asDiagonal() * q);
}

/// Squared Euclidean distance matrix of n random points in R^dim, drawn
/// around `clusters` well-separated centers.
inline Matrix random_distance_matrix(Index n, Index dim, std::uint64_t seed, Index clusters = 2) {
  Rng rng(seed);
  const Matrix centers = 4.0 * gaussian_matrix(dim, std::max<Index>(clusters, 1), rng);
  Matrix pts(dim, n);
  for (Index i = 0; i < n; ++i) pts.col(i) = centers.col(i % centers.cols()) + gaussian_vector(dim, rng);
  Matrix d(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) d(i, j) = (pts.col(i) - pts.col(j)).squaredNorm();
  return d;
}

// ---------------------------------------------------------------------------
// Dense matrix files.

enum class MatrixFormat { kCsv, kMatrixMarket };

inline MatrixFormat guess_matrix_format(const std::string& path) {
  const auto dot = path.rfind('.');
  const std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  return (ext == "mtx" || ext == "mm") ? MatrixFormat::kMatrixMarket : MatrixFormat::kCsv;
}

namespace detail {

inline Matrix read_csv(std::istream& in, const std::string& source) {
  std::vector<std::vector<double>> rows;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::skippable(line)) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) {
      double v = 0.0;
      if (!detail::parse_double(detail::trim(cell), v))
        throw ParseError(source + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError(source + ":" + std::to_string(lineno) + ": ragged row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(source + ": empty matrix");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  return m;
}

inline Matrix read_matrix_market(std::istream& in, const std::string& source) {
  std::string line;
  long lineno = 0;
  if (!std::getline(in, line)) throw ParseError(source + ": empty file");
  ++lineno;
  auto banner = detail::split_tokens(line);
  for (auto& t : banner) std::transform(t.begin(), t.end(), t.begin(), ::tolower);
  if (banner.size() < 5 || banner[0] != "%%matrixmarket" || banner[1] != "matrix")
    throw ParseError(source + ":1: missing %%MatrixMarket banner");
  const bool coordinate = banner[2] == "coordinate";
  if (!coordinate && banner[2] != "array") throw ParseError(source + ":1: unsupported layout " + banner[2]);
  const bool pattern = banner[3] == "pattern";
  if (!pattern && banner[3] != "real" && banner[3] != "integer")
    throw ParseError(source + ":1: unsupported field " + banner[3]);
  const bool symmetric = banner[4] == "symmetric";
  if (!symmetric && banner[4] != "general") throw ParseError(source + ":1: unsupported symmetry " + banner[4]);

  auto next_data_line = [&](std::vector<std::string>& tok) {
    while (std::getline(in, line)) {
      ++lineno;
      if (detail::skippable(line)) continue;
      tok = detail::split_tokens(line);
      return true;
    }
    return false;
  };
  std::vector<std::string> tok;
  if (!next_data_line(tok)) throw ParseError(source + ": missing size line");
  long long rows = 0, cols = 0, entries = 0;
  if (tok.size() < 2 || !detail::parse_long(tok[0], rows) || !detail::parse_long(tok[1], cols) || rows < 1 ||
      cols < 1 || (coordinate && (tok.size() < 3 || !detail::parse_long(tok[2], entries))))
    throw ParseError(source + ":" + std::to_string(lineno) + ": bad size line");
  Matrix m = Matrix::Zero(rows, cols);
  if (coordinate) {
    for (long long e = 0; e < entries; ++e) {
      if (!next_data_line(tok)) throw ParseError(source + ": expected " + std::to_string(entries) + " entries");
      long long i = 0, j = 0;
      double v = 1.0;
      if (tok.size() < 2 || !detail::parse_long(tok[0], i) || !detail::parse_long(tok[1], j) ||
          (!pattern && (tok.size() < 3 || !detail::parse_double(tok[2], v))))
        throw ParseError(source + ":" + std::to_string(lineno) + ": bad entry");
      if (i < 1 || i > rows || j < 1 || j > cols)
        throw ParseError(source + ":" + std::to_string(lineno) + ": index out of range");
      m(i - 1, j - 1) = v;
      if (symmetric) m(j - 1, i - 1) = v;
    }
  } else {
    for (long long j = 0; j < cols; ++j) {
      for (long long i = symmetric ? j : 0; i < rows; ++i) {
        double v = 0.0;
        if (!next_data_line(tok) || tok.empty() || !detail::parse_double(tok[0], v))
          throw ParseError(source + ":" + std::to_string(lineno) + ": bad array entry");
        m(i, j) = v;
        if (symmetric) m(j, i) = v;
      }
    }
  }
  return m;
}

}  // namespace detail

/// Loads a dense square matrix and enforces symmetry by (M + M^T)/2. When the
/// input asymmetry exceeds 1e-8 a message is stored in `warning`.
inline Matrix load_dense_matrix(const std::string& path, MatrixFormat format, std::string* warning = nullptr) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open matrix file " + path);
  Matrix m = format == MatrixFormat::kCsv ? detail::read_csv(in, path) : detail::read_matrix_market(in, path);
  if (m.rows() != m.cols()) throw ParseError(path + ": matrix is not square");
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8 && warning)
    *warning = path + ": input asymmetric (max |M - M^T| = " + std::to_string(asym) + "), symmetrized";
  return symmetrize(m);
}

inline Matrix load_dense_matrix(const std::string& path, std::string* warning = nullptr) {
  return load_dense_matrix(path, guess_matrix_format(path), warning);
}

/// Writes a symmetric matrix in Matrix Market coordinate symmetric form.
inline void write_matrix_market(const Matrix& m, std::ostream& out) {
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  long long nnz = 0;
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = j; i < m.rows(); ++i)
      if (m(i, j) != 0.0) ++nnz;
  out << m.rows() << ' ' << m.cols() << ' ' << nnz << '\n';
  out.precision(17);
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = j; i < m.rows(); ++i)
      if (m(i, j) != 0.0) out << (i + 1) << ' ' << (j + 1) << ' ' << m(i, j) << '\n';
}

// ---------------------------------------------------------------------------
// Instance configuration.

enum class InstanceKind { kMaxcut, kKmeans, kGeneig };

inline InstanceKind parse_instance_kind(const std::string& s) {
  if (s == "maxcut") return InstanceKind::kMaxcut;
  if (s == "kmeans") return InstanceKind::kKmeans;
  if (s == "geneig") return InstanceKind::kGeneig;
  throw ConfigError("unknown instance kind '" + s + "' (expected maxcut, kmeans, geneig)");
}

inline std::string to_string(InstanceKind k) {
  switch (k) {
    case InstanceKind::kMaxcut: return "maxcut";
    case InstanceKind::kKmeans: return "kmeans";
    case InstanceKind::kGeneig: return "geneig";
  }
  return "?";
}

/// `source` is a file path or a synthetic descriptor:
///   maxcut:  synthetic:triangle | synthetic:graph:<n>:<m>
///   kmeans:  synthetic:points:<n>:<dim>
///   geneig:  synthetic:<gaussian|polydecay|expdecay>:<n>[:<param>]
/// For geneig, `psi` is "identity", "gaussian" or a matrix file.
struct InstanceConfig {
  InstanceKind kind = InstanceKind::kMaxcut;
  std::optional<double> alpha;
  std::string source;
  std::string psi = "identity";
  std::uint64_t rng_seed = 0;

  void validate() const {
    const bool needs_alpha = kind != InstanceKind::kMaxcut;
    if (needs_alpha && !alpha) throw ConfigError(to_string(kind) + " instances require alpha");
    if (!needs_alpha && alpha) throw ConfigError("maxcut instances take no alpha");
    if (alpha && !(*alpha > 0.0)) throw ConfigError("alpha must be positive");
    if (source.empty()) throw ConfigError("instance source is empty");
  }
};

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string part; std::getline(ss, part, sep);) out.push_back(part);
  return out;
}

inline long long field_long(const std::vector<std::string>& f, std::size_t i, const std::string& desc) {
  long long v = 0;
  if (i >= f.size() || !parse_long(f[i], v) || v < 1) throw ConfigError("bad synthetic descriptor '" + desc + "'");
  return v;
}

}  // namespace detail

/// Input data of an instance before it is turned into a ProblemSpec.
struct InstanceData {
  std::optional<Graph> graph;
  Matrix cost;  // Laplacian, distance matrix or phi
  Matrix psi;
  std::vector<std::string> warnings;
};

inline InstanceData load_instance_data(const InstanceConfig& cfg) {
  cfg.validate();
  InstanceData data;
  const bool synthetic = cfg.source.rfind("synthetic:", 0) == 0;
  const auto fields = detail::split(cfg.source, ':');
  switch (cfg.kind) {
    case InstanceKind::kMaxcut: {
      if (synthetic) {
        if (fields.size() >= 2 && fields[1] == "triangle") data.graph = triangle_graph();
        else if (fields.size() >= 4 && fields[1] == "graph")
          data.graph = random_graph(detail::field_long(fields, 2, cfg.source), detail::field_long(fields, 3, cfg.source),
                                    cfg.rng_seed);
        else throw ConfigError("bad maxcut descriptor '" + cfg.source + "'");
      } else {
        data.graph = parse_edge_list(cfg.source);
      }
      data.cost = graph_laplacian(*data.graph);
      break;
    }
    case InstanceKind::kKmeans: {
      if (synthetic) {
        if (fields.size() < 4 || fields[1] != "points") throw ConfigError("bad kmeans descriptor '" + cfg.source + "'");
        data.cost = random_distance_matrix(detail::field_long(fields, 2, cfg.source),
                                           detail::field_long(fields, 3, cfg.source), cfg.rng_seed);
      } else {
        std::string warn;
        data.cost = load_dense_matrix(cfg.source, &warn);
        if (!warn.empty()) data.warnings.push_back(warn);
      }
      break;
    }
    case InstanceKind::kGeneig: {
      if (synthetic) {
        if (fields.size() < 3) throw ConfigError("bad geneig descriptor '" + cfg.source + "'");
        const SynthKind kind = parse_synth_kind(fields[1]);
        const Index n = detail::field_long(fields, 2, cfg.source);
        double param = kind == SynthKind::kPolyDecay ? 1.0 : 0.025;
        if (fields.size() >= 4 && !detail::parse_double(fields[3], param))
          throw ConfigError("bad geneig descriptor '" + cfg.source + "'");
        data.cost = synth_matrix(kind, n, param, cfg.rng_seed);
      } else {
        std::string warn;
        data.cost = load_dense_matrix(cfg.source, &warn);
        if (!warn.empty()) data.warnings.push_back(warn);
      }
      const Index n = data.cost.rows();
      if (cfg.psi == "identity") {
        data.psi = Matrix::Identity(n, n);
      } else if (cfg.psi == "gaussian") {
        data.psi = synth_matrix(SynthKind::kGaussian, n, 0.0, mix_seed(cfg.rng_seed, 0x951));
      } else {
        std::string warn;
        data.psi = load_dense_matrix(cfg.psi, &warn);
        if (!warn.empty()) data.warnings.push_back(warn);
      }
      break;
    }
  }
  return data;
}

inline ProblemSpec build_instance(const InstanceConfig& cfg, const InstanceData& data, LanczosSchedule schedule = {}) {
  switch (cfg.kind) {
    case InstanceKind::kMaxcut: return build_maxcut(data.cost, schedule);
    case InstanceKind::kKmeans: return build_kmeans(data.cost, *cfg.alpha, schedule);
    case InstanceKind::kGeneig: return build_geneig(data.cost, data.psi, *cfg.alpha, schedule);
  }
  throw ConfigError("unknown instance kind");
}

inline ProblemSpec build_instance(const InstanceConfig& cfg, LanczosSchedule schedule = {}) {
  return build_instance(cfg, load_instance_data(cfg), schedule);
}

/// Approximate max-cut SDP solution used as a structured phi for the
/// generalized eigenvector experiments: CGAL with the constant rule, stopped
/// once the feasibility gap drops below `feasibility_target`.
inline Matrix maxcut_solution_matrix(const Graph& g, double feasibility_target = 1e-3, int max_iterations = 100000,
                                     double lambda0 = 1.0, std::uint64_t seed = 0) {
  const ProblemSpec p = build_maxcut(graph_laplacian(g));
  SolverOptions opts;
  opts.rule.variant = DualVariant::kConstant;
  opts.rule.lambda0 = lambda0;
  opts.rule.dual_bound = StepRule::proportional_bound(1.0, p.domain.diameter, p.constraint_map.norm_bound, lambda0);
  opts.seed = seed;
  opts.stride.kind = TraceStride::Kind::kGeometric;
  Matrix best;
  struct Stop {};
  opts.iterations = max_iterations;
  opts.observer = [&](const SolverState& st, const TraceRecord& rec) {
    if (rec.feasibility <= feasibility_target) {
      best = st.x;
      throw Stop{};
    }
  };
  try {
    const SolverResult res = run_cgal(p, opts);
    if (!res.ok()) throw NumericError("maxcut_solution_matrix: " + *res.failure);
    return res.state.x;
  } catch (const Stop&) {
    return best;
  }
}

}  // namespace cgalopt
