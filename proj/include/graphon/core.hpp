#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "graphon/error.hpp"

namespace graphon {

using Vertex = std::uint32_t;

// Unordered pair stored with first < second.
struct Edge {
  Vertex u = 0;
  Vertex v = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Simple undirected graph on vertices 0..n-1. Immutable once built; the
// constructor rejects self-loops, duplicate pairs and out-of-range ids.
class LabeledGraph {
 public:
  LabeledGraph() = default;

  explicit LabeledGraph(std::size_t n) : n_(n), adj_(n) {}

  LabeledGraph(std::size_t n, std::vector<Edge> edges) : n_(n), adj_(n) {
    for (auto& e : edges) {
      if (e.u == e.v) throw InvalidParameter("self-loop at vertex " + std::to_string(e.u));
      if (e.u >= n || e.v >= n) {
        throw InvalidParameter("edge {" + std::to_string(e.u) + "," + std::to_string(e.v) +
                               "} out of range for n=" + std::to_string(n));
      }
      if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(edges.begin(), edges.end());
    if (auto dup = std::adjacent_find(edges.begin(), edges.end()); dup != edges.end()) {
      throw InvalidParameter("duplicate edge {" + std::to_string(dup->u) + "," +
                             std::to_string(dup->v) + "}");
    }
    for (const auto& e : edges) {
      adj_[e.u].push_back(e.v);
      adj_[e.v].push_back(e.u);
    }
    for (auto& row : adj_) std::sort(row.begin(), row.end());
    edges_ = std::move(edges);
  }

  std::size_t size() const { return n_; }
  std::size_t edge_count() const { return edges_.size(); }

  // Sorted lexicographically.
  std::span<const Edge> edges() const { return edges_; }
  std::span<const Vertex> neighbors(Vertex v) const { return adj_[v]; }
  std::size_t degree(Vertex v) const { return adj_[v].size(); }

  bool has_edge(Vertex a, Vertex b) const {
    if (a >= n_ || b >= n_ || a == b) return false;
    const auto& row = adj_[a];
    return std::binary_search(row.begin(), row.end(), b);
  }

  friend bool operator==(const LabeledGraph& a, const LabeledGraph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<Vertex>> adj_;
};

inline Eigen::MatrixXd adjacency_matrix(const LabeledGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : g.edges()) {
    a(e.u, e.v) = 1.0;
    a(e.v, e.u) = 1.0;
  }
  return a;
}

// Relabel: vertex v of g becomes perm[v].
inline LabeledGraph relabel(const LabeledGraph& g, std::span<const Vertex> perm) {
  detail::require(perm.size() == g.size(), "relabel: permutation size mismatch");
  std::vector<Edge> edges;
  edges.reserve(g.edge_count());
  for (const auto& e : g.edges()) edges.push_back({perm[e.u], perm[e.v]});
  return LabeledGraph(g.size(), std::move(edges));
}

// ---------------------------------------------------------------------------
// Graphon representations

// Piecewise-constant symmetric function on [0, scale]^2 with a k x k grid of
// equal cells. Symmetry must hold exactly; asymmetric input is rejected.
class StepGraphon {
 public:
  StepGraphon(Eigen::MatrixXd grid, double scale = 1.0) : grid_(std::move(grid)), scale_(scale) {
    detail::require(grid_.rows() >= 1 && grid_.rows() == grid_.cols(),
                    "step graphon grid must be square and non-empty");
    detail::require(std::isfinite(scale_) && scale_ > 0.0, "step graphon scale must be positive");
    for (Eigen::Index a = 0; a < grid_.rows(); ++a) {
      for (Eigen::Index b = 0; b < grid_.cols(); ++b) {
        const double v = grid_(a, b);
        detail::require(std::isfinite(v) && v >= 0.0,
                        "step graphon entries must be finite and nonnegative");
        detail::require(v == grid_(b, a), "step graphon grid is not symmetric");
      }
    }
  }

  static StepGraphon constant(double c, std::size_t k = 1) {
    const auto kk = static_cast<Eigen::Index>(k);
    return StepGraphon(Eigen::MatrixXd::Constant(kk, kk, c));
  }

  std::size_t k() const { return static_cast<std::size_t>(grid_.rows()); }
  double scale() const { return scale_; }
  double domain() const { return scale_; }
  const Eigen::MatrixXd& grid() const { return grid_; }

  std::size_t cell(double x) const {
    const auto kk = k();
    const auto c = static_cast<std::size_t>(std::floor(x * static_cast<double>(kk) / scale_));
    return std::min(c, kk - 1);
  }

  // Evaluate on the closed domain; x == scale maps to the last cell.
  double value(double x, double y) const {
    if (!(x >= 0.0 && x <= scale_ && y >= 0.0 && y <= scale_)) {
      throw InvalidParameter("step graphon evaluated outside [0, scale]^2");
    }
    return grid_(static_cast<Eigen::Index>(cell(x)), static_cast<Eigen::Index>(cell(y)));
  }

  double operator()(double x, double y) const { return value(x, y); }

  bool bounded_by_one() const { return grid_.maxCoeff() <= 1.0; }

  // Integral over the full domain [0, scale]^2.
  double integral() const {
    const double cell_side = scale_ / static_cast<double>(k());
    return grid_.sum() * cell_side * cell_side;
  }

 private:
  Eigen::MatrixXd grid_;
  double scale_ = 1.0;
};

enum class KernelBound { kByOne, kUnbounded };

// Symmetric kernel given by a function handle on [0, domain]^2.
class KernelGraphon {
 public:
  using Function = std::function<double(double, double)>;

  KernelGraphon(Function f, KernelBound bound, double domain = 1.0, std::string name = "kernel")
      : f_(std::move(f)), bound_(bound), domain_(domain), name_(std::move(name)) {
    detail::require(static_cast<bool>(f_), "kernel graphon needs a function");
    detail::require(std::isfinite(domain_) && domain_ > 0.0, "kernel domain must be positive");
  }

  double value(double x, double y) const {
    if (!(x >= 0.0 && x <= domain_ && y >= 0.0 && y <= domain_)) {
      throw InvalidParameter("kernel '" + name_ + "' evaluated outside its domain");
    }
    return f_(x, y);
  }

  double operator()(double x, double y) const { return value(x, y); }

  bool bounded_by_one() const { return bound_ == KernelBound::kByOne; }
  KernelBound bound() const { return bound_; }
  double domain() const { return domain_; }
  const std::string& name() const { return name_; }

 private:
  Function f_;
  KernelBound bound_;
  double domain_;
  std::string name_;
};

template <class W>
concept GraphonLike = requires(const W& w, double x) {
  { w.value(x, x) } -> std::convertible_to<double>;
  { w.bounded_by_one() } -> std::convertible_to<bool>;
  { w.domain() } -> std::convertible_to<double>;
};

template <GraphonLike W>
double eval_graphon(const W& w, double x, double y) {
  return w.value(x, y);
}

// ---------------------------------------------------------------------------
// Graph <-> graphon constructions

// Diagonal cells are 0: simple graphs carry no loops.
inline StepGraphon empirical_graphon(const LabeledGraph& g) {
  detail::require(g.size() >= 1, "empirical graphon needs at least one vertex");
  return StepGraphon(adjacency_matrix(g));
}

// Inverse of empirical_graphon for {0,1}-valued, zero-diagonal, unit-scale grids.
inline LabeledGraph graph_from_empirical(const StepGraphon& w) {
  const auto& grid = w.grid();
  std::vector<Edge> edges;
  for (Eigen::Index a = 0; a < grid.rows(); ++a) {
    detail::require(grid(a, a) == 0.0, "empirical graphon must have a zero diagonal");
    for (Eigen::Index b = a + 1; b < grid.cols(); ++b) {
      const double v = grid(a, b);
      detail::require(v == 0.0 || v == 1.0, "empirical graphon must be {0,1}-valued");
      if (v == 1.0) edges.push_back({static_cast<Vertex>(a), static_cast<Vertex>(b)});
    }
  }
  return LabeledGraph(w.k(), std::move(edges));
}

// Each vertex i becomes clones k*i .. k*i+k-1; an edge becomes a complete
// bipartite graph between the two clone groups.
inline LabeledGraph blow_up(const LabeledGraph& g, std::size_t k) {
  detail::require(k >= 1, "blow_up factor must be >= 1");
  std::vector<Edge> edges;
  edges.reserve(g.edge_count() * k * k);
  for (const auto& e : g.edges()) {
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) {
        edges.push_back({static_cast<Vertex>(k * e.u + a), static_cast<Vertex>(k * e.v + b)});
      }
    }
  }
  return LabeledGraph(g.size() * k, std::move(edges));
}

struct BlowupPair {
  LabeledGraph first;
  LabeledGraph second;
  std::size_t k1 = 1;
  std::size_t k2 = 1;
};

// Smallest k1, k2 with k1*n1 == k2*n2.
inline BlowupPair common_blowup_pair(const LabeledGraph& g1, const LabeledGraph& g2) {
  detail::require(g1.size() >= 1 && g2.size() >= 1, "common blow-up needs nonempty graphs");
  const std::size_t size = std::lcm(g1.size(), g2.size());
  const std::size_t k1 = size / g1.size();
  const std::size_t k2 = size / g2.size();
  return {blow_up(g1, k1), blow_up(g2, k2), k1, k2};
}

// 2|E| / n^2, the integral of the empirical graphon.
inline double edge_density(const LabeledGraph& g) {
  detail::require(g.size() >= 1, "edge density needs at least one vertex");
  const double n = static_cast<double>(g.size());
  return 2.0 * static_cast<double>(g.edge_count()) / (n * n);
}

inline StepGraphon rescale(const StepGraphon& w, double rho) {
  detail::require(std::isfinite(rho) && rho > 0.0, "rescale: rho must be positive");
  return StepGraphon(w.grid() / rho, w.scale());
}

// Keeps grid values and enlarges the domain to [0, 1/sqrt(rho)]^2, so the
// integral becomes (1/rho) times the original.
inline StepGraphon stretch(const StepGraphon& w, double rho) {
  detail::require(std::isfinite(rho) && rho > 0.0, "stretch: rho must be positive");
  detail::require(w.scale() == 1.0, "stretch expects a unit-scale graphon");
  return StepGraphon(w.grid(), 1.0 / std::sqrt(rho));
}

// Replicate each cell into a factor x factor block.
inline StepGraphon refine(const StepGraphon& w, std::size_t factor) {
  detail::require(factor >= 1, "refine factor must be >= 1");
  const auto k = static_cast<Eigen::Index>(w.k());
  const auto f = static_cast<Eigen::Index>(factor);
  Eigen::MatrixXd out(k * f, k * f);
  for (Eigen::Index a = 0; a < k * f; ++a) {
    for (Eigen::Index b = 0; b < k * f; ++b) out(a, b) = w.grid()(a / f, b / f);
  }
  return StepGraphon(std::move(out), w.scale());
}

// ---------------------------------------------------------------------------
// Small graph families

inline LabeledGraph complete_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) edges.push_back({Vertex(i), Vertex(j)});
  }
  return LabeledGraph(n, std::move(edges));
}

inline LabeledGraph path_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) edges.push_back({Vertex(i), Vertex(i + 1)});
  return LabeledGraph(n, std::move(edges));
}

inline LabeledGraph cycle_graph(std::size_t n) {
  detail::require(n >= 3, "cycle needs at least 3 vertices");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) edges.push_back({Vertex(i), Vertex((i + 1) % n)});
  return LabeledGraph(n, std::move(edges));
}

// Half-graph H_{2m}: bipartite on {0..m-1} and {m..2m-1} with edge {i, m+j}
// iff j <= i. Its empirical graphon is a staircase in the off-diagonal blocks.
inline LabeledGraph half_graph(std::size_t m) {
  detail::require(m >= 1, "half graph needs m >= 1");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j <= i; ++j) edges.push_back({Vertex(i), Vertex(m + j)});
  }
  return LabeledGraph(2 * m, std::move(edges));
}

}  // namespace graphon
