#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "graphon/core.hpp"
#include "graphon/rng.hpp"

namespace graphon {

// Largest matrix (or refined partition) the exact cut norm will enumerate.
inline constexpr std::size_t kExactCutLimit = 22;
// Largest common blown-up size for exact minimization over relabelings.
inline constexpr std::size_t kExactRelabelLimit = 8;

struct CutResult {
  double value = 0.0;
  std::vector<std::size_t> witness_s;  // sorted
  std::vector<std::size_t> witness_t;  // sorted
  bool exact = false;
};

namespace detail {

inline std::vector<std::size_t> mask_to_indices(const std::vector<char>& mask) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) out.push_back(i);
  }
  return out;
}

// |sum_{i in S, j in T} w_i w_j a(i, j)|
inline double weighted_cut_value(const Eigen::MatrixXd& a, std::span<const double> w,
                                 std::span<const std::size_t> s, std::span<const std::size_t> t) {
  long double acc = 0.0L;
  for (auto i : s) {
    long double row = 0.0L;
    for (auto j : t) row += static_cast<long double>(w[j]) * a(Eigen::Index(i), Eigen::Index(j));
    acc += static_cast<long double>(w[i]) * row;
  }
  return static_cast<double>(acc < 0 ? -acc : acc);
}

struct BestResponse {
  std::vector<char> mask;
  long double value = 0.0L;
};

// For a fixed row set, the column set maximizing |sum| is either all columns
// with positive partial sum or all with negative partial sum.
inline BestResponse best_columns(const Eigen::MatrixXd& a, std::span<const double> w,
                                 const std::vector<char>& rows) {
  const auto n = static_cast<std::size_t>(a.cols());
  std::vector<long double> sums(n, 0.0L);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i]) continue;
    const long double wi = w[i];
    for (std::size_t j = 0; j < n; ++j) sums[j] += wi * a(Eigen::Index(i), Eigen::Index(j));
  }
  long double pos = 0.0L, neg = 0.0L;
  for (std::size_t j = 0; j < n; ++j) {
    const long double c = sums[j] * static_cast<long double>(w[j]);
    if (c > 0) pos += c;
    if (c < 0) neg += c;
  }
  const bool positive = pos >= -neg;
  BestResponse out{std::vector<char>(n, 0), positive ? pos : -neg};
  for (std::size_t j = 0; j < n; ++j) {
    out.mask[j] = positive ? sums[j] > 0 : sums[j] < 0;
  }
  return out;
}

// Exact weighted cut norm by Gray-code enumeration of the row set with the
// column set solved in closed form.
inline CutResult cut_norm_exact_weighted(const Eigen::MatrixXd& a, std::span<const double> w) {
  const auto n = static_cast<std::size_t>(a.rows());
  require(a.rows() == a.cols(), "cut norm needs a square matrix");
  require(w.size() == n, "cut norm weight vector size mismatch");
  if (n > kExactCutLimit) {
    throw SizeLimitError("exact cut norm is limited to n <= " + std::to_string(kExactCutLimit) +
                         " (got " + std::to_string(n) + "); use the heuristic");
  }
  CutResult result;
  result.exact = true;
  if (n == 0) return result;

  std::vector<long double> scaled(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      scaled[i * n + j] = static_cast<long double>(w[i]) * a(Eigen::Index(i), Eigen::Index(j));
    }
  }
  std::vector<long double> colsum(n, 0.0L);
  std::uint32_t mask = 0;
  std::uint32_t best_mask = 0;
  long double best = 0.0L;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t g = 1; g < total; ++g) {
    const auto i = static_cast<std::size_t>(std::countr_zero(g));
    mask ^= (std::uint32_t{1} << i);
    const long double* row = &scaled[i * n];
    if (mask & (std::uint32_t{1} << i)) {
      for (std::size_t j = 0; j < n; ++j) colsum[j] += row[j];
    } else {
      for (std::size_t j = 0; j < n; ++j) colsum[j] -= row[j];
    }
    long double pos = 0.0L, neg = 0.0L;
    for (std::size_t j = 0; j < n; ++j) {
      const long double c = colsum[j] * static_cast<long double>(w[j]);
      if (c > 0) pos += c;
      if (c < 0) neg += c;
    }
    const long double val = pos >= -neg ? pos : -neg;
    if (val > best) {
      best = val;
      best_mask = mask;
    }
  }
  std::vector<char> rows(n, 0);
  for (std::size_t i = 0; i < n; ++i) rows[i] = (best_mask >> i) & 1U;
  const auto cols = best_columns(a, w, rows);
  result.witness_s = mask_to_indices(rows);
  result.witness_t = mask_to_indices(cols.mask);
  result.value = weighted_cut_value(a, w, result.witness_s, result.witness_t);
  return result;
}

// Alternating maximization from random starts. Always a lower bound.
inline CutResult cut_norm_heuristic_weighted(const Eigen::MatrixXd& a, std::span<const double> w,
                                             std::size_t restarts, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(a.rows());
  require(a.rows() == a.cols(), "cut norm needs a square matrix");
  require(w.size() == n, "cut norm weight vector size mismatch");
  require(restarts >= 1, "cut norm heuristic needs restarts >= 1");
  CutResult best;
  if (n == 0) return best;
  const Eigen::MatrixXd at = a.transpose();
  long double best_value = -1.0L;
  std::vector<char> best_rows, best_cols;

  for (std::size_t r = 0; r < restarts; ++r) {
    Rng rng(derive_seed(seed, r));
    std::vector<char> rows(n, 0);
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
      rows[i] = rng.bernoulli(0.5);
      any = any || rows[i];
    }
    if (!any) rows[rng.index(n)] = 1;

    auto cols = best_columns(a, w, rows);
    long double value = cols.value;
    std::vector<char> cur_cols = std::move(cols.mask);
    const auto improved = [](long double next, long double cur) {
      return next > cur + 1e-14L * std::max<long double>(1.0L, cur);
    };
    for (int iter = 0; iter < 10000; ++iter) {
      auto next_rows = best_columns(at, w, cur_cols);
      if (!improved(next_rows.value, value)) break;
      rows = std::move(next_rows.mask);
      value = next_rows.value;
      auto next_cols = best_columns(a, w, rows);
      if (!improved(next_cols.value, value)) break;
      cur_cols = std::move(next_cols.mask);
      value = next_cols.value;
    }
    if (value > best_value) {
      best_value = value;
      best_rows = rows;
      best_cols = cur_cols;
    }
  }
  best.witness_s = mask_to_indices(best_rows);
  best.witness_t = mask_to_indices(best_cols);
  best.value = weighted_cut_value(a, w, best.witness_s, best.witness_t);
  best.exact = false;
  return best;
}

inline std::vector<double> uniform_weights(std::size_t n) {
  return std::vector<double>(n, n == 0 ? 0.0 : 1.0 / static_cast<double>(n));
}

}  // namespace detail

// max over S, T of |sum_{S x T} a| / n^2, by full enumeration (n <= 22).
inline CutResult cut_norm_exact(const Eigen::MatrixXd& a) {
  const auto w = detail::uniform_weights(static_cast<std::size_t>(a.rows()));
  return detail::cut_norm_exact_weighted(a, w);
}

// Lower bound on the normalized cut norm; deterministic given seed. Restart r
// draws its start from derive_seed(seed, r); ties keep the lowest restart.
inline CutResult cut_norm_heuristic(const Eigen::MatrixXd& a, std::size_t restarts,
                                    std::uint64_t seed) {
  const auto w = detail::uniform_weights(static_cast<std::size_t>(a.rows()));
  return detail::cut_norm_heuristic_weighted(a, w, restarts, seed);
}

// ---------------------------------------------------------------------------
// Cut distance between labeled step graphons

struct LabeledCutOptions {
  std::size_t restarts = 50;
  std::uint64_t seed = 0;
};

// Cut norm of W1 - W2 after refining both to a common resolution lcm(k1, k2).
// Rows of the refined difference are constant on the common refinement of
// the two cell partitions (at most k1 + k2 - 1 intervals), so the norm is
// computed on that weighted partition: exact whenever it has <= 22 parts.
// Witness sets are reported as cell indices at resolution lcm(k1, k2).
inline CutResult cut_distance_labeled_report(const StepGraphon& w1, const StepGraphon& w2,
                                             const LabeledCutOptions& opt = {}) {
  if (w1.scale() != w2.scale()) {
    throw InvalidParameter("cut_distance_labeled: graphon scales differ");
  }
  const std::size_t k1 = w1.k(), k2 = w2.k();
  const std::size_t fine = std::lcm(k1, k2);
  const std::size_t f1 = fine / k1, f2 = fine / k2;

  std::vector<std::size_t> cuts;
  for (std::size_t a = 0; a <= k1; ++a) cuts.push_back(a * f1);
  for (std::size_t b = 0; b <= k2; ++b) cuts.push_back(b * f2);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const std::size_t parts = cuts.size() - 1;

  std::vector<double> weight(parts);
  std::vector<std::size_t> c1(parts), c2(parts);
  for (std::size_t p = 0; p < parts; ++p) {
    weight[p] = w1.scale() * static_cast<double>(cuts[p + 1] - cuts[p]) / static_cast<double>(fine);
    c1[p] = cuts[p] / f1;
    c2[p] = cuts[p] / f2;
  }
  Eigen::MatrixXd diff(parts, parts);
  for (std::size_t p = 0; p < parts; ++p) {
    for (std::size_t q = 0; q < parts; ++q) {
      diff(Eigen::Index(p), Eigen::Index(q)) = w1.grid()(Eigen::Index(c1[p]), Eigen::Index(c1[q])) -
                                               w2.grid()(Eigen::Index(c2[p]), Eigen::Index(c2[q]));
    }
  }
  CutResult on_parts = parts <= kExactCutLimit
                           ? detail::cut_norm_exact_weighted(diff, weight)
                           : detail::cut_norm_heuristic_weighted(diff, weight, opt.restarts, opt.seed);
  const auto expand = [&](const std::vector<std::size_t>& ps) {
    std::vector<std::size_t> cells;
    for (auto p : ps) {
      for (std::size_t c = cuts[p]; c < cuts[p + 1]; ++c) cells.push_back(c);
    }
    return cells;
  };
  CutResult out;
  out.value = on_parts.value;
  out.exact = on_parts.exact;
  out.witness_s = expand(on_parts.witness_s);
  out.witness_t = expand(on_parts.witness_t);
  return out;
}

inline double cut_distance_labeled(const StepGraphon& w1, const StepGraphon& w2,
                                   const LabeledCutOptions& opt = {}) {
  return cut_distance_labeled_report(w1, w2, opt).value;
}

// ---------------------------------------------------------------------------
// Cut metric: minimum over relabelings

enum class CutMode { kExact, kHeuristic };

struct RelabelOptions {
  std::size_t restarts = 2;            // alignment restarts (0 = refined degree order)
  std::size_t max_evaluations = 20000;  // cut-norm evaluations per restart
  std::size_t cut_restarts = 8;        // heuristic cut-norm restarts per evaluation
};

struct GraphDistance {
  double value = 0.0;
  bool exact = false;
  std::size_t size = 0;            // common blown-up vertex count
  std::vector<Vertex> alignment;   // vertex v of blown-up G2 is placed at alignment[v]
  CutResult cut;                   // cut of the aligned difference
};

namespace detail {

// a1 - a2 with a2's vertex v moved to slot place[v].
inline Eigen::MatrixXd aligned_difference(const Eigen::MatrixXd& a1, const Eigen::MatrixXd& a2,
                                          std::span<const Vertex> place) {
  const auto n = a1.rows();
  Eigen::MatrixXd d = a1;
  for (Eigen::Index u = 0; u < n; ++u) {
    for (Eigen::Index v = 0; v < n; ++v) d(place[u], place[v]) -= a2(u, v);
  }
  return d;
}

// Color refinement over the disjoint union of two graphs, seeded by degree.
// Colors are label-invariant and comparable across the two graphs.
inline std::vector<std::size_t> refined_colors(const LabeledGraph& g1, const LabeledGraph& g2) {
  const std::size_t n1 = g1.size();
  const std::size_t total = n1 + g2.size();
  std::vector<std::size_t> color(total);
  const auto neighbors_of = [&](std::size_t v) {
    return v < n1 ? g1.neighbors(Vertex(v)) : g2.neighbors(Vertex(v - n1));
  };
  const auto offset = [&](std::size_t v) { return v < n1 ? 0 : n1; };
  for (std::size_t v = 0; v < total; ++v) color[v] = neighbors_of(v).size();
  std::size_t classes = 0;
  for (std::size_t round = 0; round <= total; ++round) {
    std::map<std::vector<std::size_t>, std::size_t> ids;
    std::vector<std::vector<std::size_t>> sig(total);
    for (std::size_t v = 0; v < total; ++v) {
      sig[v].push_back(color[v]);
      std::vector<std::size_t> nb;
      for (auto u : neighbors_of(v)) nb.push_back(color[u + offset(v)]);
      std::sort(nb.begin(), nb.end());
      sig[v].insert(sig[v].end(), nb.begin(), nb.end());
      ids.emplace(sig[v], 0);
    }
    std::size_t next = 0;
    for (auto& [key, id] : ids) id = next++;
    for (std::size_t v = 0; v < total; ++v) color[v] = ids[sig[v]];
    if (ids.size() == classes) break;
    classes = ids.size();
  }
  return color;
}

}  // namespace detail

// Cut metric between two graphs of possibly different sizes: blow both up
// to the common size lcm(n1, n2), then minimize the cut norm of the
// difference over relabelings. Exact mode enumerates all N! relabelings
// (N <= 8). Heuristic mode starts from an alignment sorted by degree, refined
// by neighborhood colors, then runs pairwise-swap local search.
inline GraphDistance cut_distance_report(const LabeledGraph& g1, const LabeledGraph& g2,
                                         CutMode mode, std::uint64_t seed = 0,
                                         const RelabelOptions& opt = {}) {
  detail::require(g1.size() >= 1 && g2.size() >= 1, "cut distance needs nonempty graphs");
  const std::size_t size = std::lcm(g1.size(), g2.size());
  if (mode == CutMode::kExact && size > kExactRelabelLimit) {
    throw SizeLimitError("exact cut distance needs lcm(n1, n2) <= " +
                         std::to_string(kExactRelabelLimit) + " (got " + std::to_string(size) +
                         "); use heuristic mode");
  }
  const auto pair = common_blowup_pair(g1, g2);
  const Eigen::MatrixXd a1 = adjacency_matrix(pair.first);
  const Eigen::MatrixXd a2 = adjacency_matrix(pair.second);

  GraphDistance best;
  best.size = size;
  best.value = std::numeric_limits<double>::infinity();

  if (mode == CutMode::kExact) {
    best.exact = true;
    std::vector<Vertex> place(size);
    std::iota(place.begin(), place.end(), Vertex{0});
    do {
      auto cut = cut_norm_exact(detail::aligned_difference(a1, a2, place));
      if (cut.value < best.value) {
        best.value = cut.value;
        best.alignment = place;
        best.cut = std::move(cut);
        if (best.value == 0.0) break;
      }
    } while (std::next_permutation(place.begin(), place.end()));
    return best;
  }

  const std::uint64_t eval_seed = derive_seed(seed, 0xC07);
  const auto evaluate = [&](std::span<const Vertex> place) {
    const auto d = detail::aligned_difference(a1, a2, place);
    return size <= 12 ? cut_norm_exact(d) : cut_norm_heuristic(d, opt.cut_restarts, eval_seed);
  };

  const auto colors = detail::refined_colors(pair.first, pair.second);
  const auto order_of = [&](const LabeledGraph& g, std::size_t offset) {
    std::vector<Vertex> order(g.size());
    std::iota(order.begin(), order.end(), Vertex{0});
    std::stable_sort(order.begin(), order.end(), [&](Vertex x, Vertex y) {
      if (g.degree(x) != g.degree(y)) return g.degree(x) > g.degree(y);
      return colors[x + offset] < colors[y + offset];
    });
    return order;
  };
  const auto order1 = order_of(pair.first, 0);
  const auto order2 = order_of(pair.second, size);

  for (std::size_t r = 0; r < std::max<std::size_t>(1, opt.restarts); ++r) {
    std::vector<Vertex> sorted2 = order2;
    if (r > 0) {
      // shuffle within runs of equal (degree, color) keys
      Rng rng(derive_seed(seed, r));
      std::size_t lo = 0;
      while (lo < size) {
        std::size_t hi = lo + 1;
        while (hi < size && colors[sorted2[hi] + size] == colors[sorted2[lo] + size]) ++hi;
        for (std::size_t i = hi - 1; i > lo; --i) {
          std::swap(sorted2[i], sorted2[lo + rng.index(i - lo + 1)]);
        }
        lo = hi;
      }
    }
    std::vector<Vertex> place(size);
    for (std::size_t i = 0; i < size; ++i) place[sorted2[i]] = order1[i];

    CutResult cur = evaluate(place);
    std::size_t evaluations = 1;
    bool improved = cur.value > 0.0;
    while (improved && evaluations < opt.max_evaluations) {
      improved = false;
      for (std::size_t a = 0; a < size && !improved && evaluations < opt.max_evaluations; ++a) {
        for (std::size_t b = a + 1; b < size && evaluations < opt.max_evaluations; ++b) {
          std::swap(place[a], place[b]);
          auto cand = evaluate(place);
          ++evaluations;
          if (cand.value < cur.value - 1e-15) {
            cur = std::move(cand);
            improved = cur.value > 0.0;
            break;
          }
          std::swap(place[a], place[b]);
        }
      }
    }
    if (cur.value < best.value) {
      best.value = cur.value;
      best.alignment = place;
      best.cut = std::move(cur);
    }
    if (best.value == 0.0) break;
  }
  best.exact = false;
  return best;
}

inline double cut_distance(const LabeledGraph& g1, const LabeledGraph& g2, CutMode mode,
                           std::uint64_t seed = 0) {
  return cut_distance_report(g1, g2, mode, seed).value;
}

// ---------------------------------------------------------------------------
// Subgraph densities

inline constexpr std::size_t kMaxMotifVertices = 8;

// Small probe graph F with 1..8 vertices.
class Motif {
 public:
  explicit Motif(LabeledGraph g) : g_(std::move(g)) {
    detail::require(g_.size() >= 1 && g_.size() <= kMaxMotifVertices,
                    "motif must have between 1 and 8 vertices");
  }

  static Motif edge() { return Motif(complete_graph(2)); }
  static Motif triangle() { return Motif(complete_graph(3)); }
  static Motif clique(std::size_t n) { return Motif(complete_graph(n)); }
  static Motif path(std::size_t n) { return Motif(path_graph(n)); }
  static Motif cycle(std::size_t n) { return Motif(cycle_graph(n)); }
  static Motif star(std::size_t leaves) {
    std::vector<Edge> edges;
    for (std::size_t i = 1; i <= leaves; ++i) edges.push_back({0, Vertex(i)});
    return Motif(LabeledGraph(leaves + 1, std::move(edges)));
  }

  // edge | triangle | clique:<n> | path:<n> | cycle:<n> | star:<leaves>
  static Motif by_name(const std::string& name) {
    if (name == "edge") return edge();
    if (name == "triangle") return triangle();
    const auto colon = name.find(':');
    if (colon != std::string::npos) {
      const std::string kind = name.substr(0, colon);
      std::size_t count = 0;
      try {
        count = std::stoul(name.substr(colon + 1));
      } catch (const std::exception&) {
        throw InvalidParameter("bad motif size in '" + name + "'");
      }
      if (kind == "clique") return clique(count);
      if (kind == "path") return path(count);
      if (kind == "cycle") return cycle(count);
      if (kind == "star") return star(count);
    }
    throw InvalidParameter("unknown motif '" + name + "'");
  }

  const LabeledGraph& graph() const { return g_; }
  std::size_t vertex_count() const { return g_.size(); }
  bool is_edge() const { return g_.size() == 2 && g_.edge_count() == 1; }
  bool is_triangle() const { return g_.size() == 3 && g_.edge_count() == 3; }

 private:
  LabeledGraph g_;
};

// t(F, W) = k^{-|V(F)|} sum over maps phi of prod_{uv in E(F)} W[phi(u)][phi(v)],
// enumerated exactly with pruning on zero partial products.
inline double hom_density(const Motif& f, const StepGraphon& w) {
  detail::require(w.scale() == 1.0, "hom_density expects a unit-scale graphon");
  const std::size_t v = f.vertex_count();
  const std::size_t k = w.k();
  const double maps = std::pow(static_cast<double>(k), static_cast<double>(v));
  if (maps > 1e8) {
    throw SizeLimitError("hom_density: k^|V(F)| = " + std::to_string(maps) + " exceeds 1e8");
  }
  // back[t]: neighbors of vertex t with smaller index
  std::vector<std::vector<Vertex>> back(v);
  for (const auto& e : f.graph().edges()) back[e.v].push_back(e.u);

  const auto& grid = w.grid();
  std::vector<Eigen::Index> phi(v, 0);
  long double total = 0.0L;
  const auto recurse = [&](auto&& self, std::size_t t, long double partial) -> void {
    if (t == v) {
      total += partial;
      return;
    }
    for (std::size_t c = 0; c < k; ++c) {
      long double p = partial;
      for (auto u : back[t]) {
        p *= grid(phi[u], Eigen::Index(c));
        if (p == 0.0L) break;
      }
      if (p == 0.0L) continue;
      phi[t] = Eigen::Index(c);
      self(self, t + 1, p);
    }
  };
  recurse(recurse, 0, 1.0L);
  return static_cast<double>(total / static_cast<long double>(maps));
}

// Number of triangles in g.
inline std::uint64_t triangle_count(const LabeledGraph& g) {
  std::uint64_t count = 0;
  for (const auto& e : g.edges()) {
    const auto nu = g.neighbors(e.u);
    const auto nv = g.neighbors(e.v);
    auto iu = std::upper_bound(nu.begin(), nu.end(), e.v);
    auto iv = std::upper_bound(nv.begin(), nv.end(), e.v);
    while (iu != nu.end() && iv != nv.end()) {
      if (*iu < *iv) {
        ++iu;
      } else if (*iv < *iu) {
        ++iv;
      } else {
        ++count;
        ++iu;
        ++iv;
      }
    }
  }
  return count;
}

// Fraction of vertex triples spanning a triangle, T / C(n, 3). Unlike the
// homomorphism density of the empirical graphon it excludes degenerate maps,
// so it is unbiased for t(triangle, W) on W-random graphs.
inline double triangle_density_injective(const LabeledGraph& g) {
  const double n = static_cast<double>(g.size());
  if (g.size() < 3) return 0.0;
  return static_cast<double>(triangle_count(g)) / (n * (n - 1) * (n - 2) / 6.0);
}

// t(F, empirical_graphon(g)). Edge and triangle use exact counts; other
// motifs are estimated from `samples` uniform vertex maps (with replacement).
inline double subgraph_density_empirical(const LabeledGraph& g, const Motif& f,
                                         std::size_t samples, std::uint64_t seed) {
  detail::require(samples >= 1, "subgraph density needs samples >= 1");
  detail::require(f.vertex_count() <= g.size(), "motif larger than graph");
  const double n = static_cast<double>(g.size());
  if (f.is_edge()) return edge_density(g);
  if (f.is_triangle()) return 6.0 * static_cast<double>(triangle_count(g)) / (n * n * n);

  Rng rng(seed);
  std::vector<Vertex> phi(f.vertex_count());
  std::size_t hits = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    for (auto& x : phi) x = static_cast<Vertex>(rng.index(g.size()));
    bool all = true;
    for (const auto& e : f.graph().edges()) {
      if (!g.has_edge(phi[e.u], phi[e.v])) {
        all = false;
        break;
      }
    }
    hits += all ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(samples);
}

}  // namespace graphon
