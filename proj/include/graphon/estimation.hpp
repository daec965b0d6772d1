#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "graphon/core.hpp"
#include "graphon/rng.hpp"
#include "graphon/samplers.hpp"

namespace graphon {

struct EstimationReport {
  ProbMatrix p_hat;
  std::optional<StepGraphon> w_hat;
  std::string method;
  std::optional<double> mse;
  std::vector<std::size_t> labels;       // block of each vertex (histogram, blockmodel)
  std::vector<double> proportions;       // block sizes / n
  std::vector<double> objective_trace;   // blockmodel least-squares objective per iteration
};

// (2 / (n (n - 1))) sum_{i<j} (p_hat_ij - p_true_ij)^2
inline double mse_vs_truth(const ProbMatrix& p_hat, const ProbMatrix& p_true) {
  if (p_hat.size() != p_true.size()) {
    throw InvalidParameter("mse_vs_truth: dimension mismatch (" + std::to_string(p_hat.size()) +
                           " vs " + std::to_string(p_true.size()) + ")");
  }
  const std::size_t n = p_hat.size();
  if (n < 2) return 0.0;
  long double acc = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const long double d = p_hat(i, j) - p_true(i, j);
      acc += d * d;
    }
  }
  return static_cast<double>(2.0L * acc / (static_cast<long double>(n) * (n - 1)));
}

// Smallest integer b with b^3 >= n, i.e. ceil(n^(1/3)).
inline std::size_t default_bandwidth(std::size_t n) {
  std::size_t b = static_cast<std::size_t>(std::cbrt(static_cast<double>(n)));
  while (b * b * b < n) ++b;
  while (b > 1 && (b - 1) * (b - 1) * (b - 1) >= n) --b;
  return std::max<std::size_t>(b, 1);
}

namespace detail {

struct BlockFit {
  Eigen::MatrixXd means;               // least-squares block probabilities
  Eigen::MatrixXd edges;               // edge counts between blocks (each edge once)
  std::vector<std::size_t> sizes;
};

// Within-block means exclude the diagonal; blocks without pairs get 0.
inline BlockFit fit_blocks(const LabeledGraph& g, std::span<const std::size_t> labels,
                           std::size_t k) {
  const auto kk = static_cast<Eigen::Index>(k);
  BlockFit fit{Eigen::MatrixXd::Zero(kk, kk), Eigen::MatrixXd::Zero(kk, kk),
               std::vector<std::size_t>(k, 0)};
  for (auto s : labels) ++fit.sizes[s];
  for (const auto& e : g.edges()) {
    const auto a = Eigen::Index(labels[e.u]);
    const auto c = Eigen::Index(labels[e.v]);
    fit.edges(a, c) += 1.0;
    if (a != c) fit.edges(c, a) += 1.0;
  }
  for (Eigen::Index a = 0; a < kk; ++a) {
    for (Eigen::Index c = 0; c < kk; ++c) {
      const double na = static_cast<double>(fit.sizes[std::size_t(a)]);
      const double nc = static_cast<double>(fit.sizes[std::size_t(c)]);
      const double pairs = a == c ? na * (na - 1.0) / 2.0 : na * nc;
      fit.means(a, c) = pairs > 0.0 ? fit.edges(a, c) / pairs : 0.0;
    }
  }
  return fit;
}

// sum_{i<j} (A_ij - B[s_i][s_j])^2 from block edge counts.
inline double block_objective(const BlockFit& fit, const Eigen::MatrixXd& b) {
  long double total = 0.0L;
  const auto k = b.rows();
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index c = a; c < k; ++c) {
      const double na = static_cast<double>(fit.sizes[std::size_t(a)]);
      const double nc = static_cast<double>(fit.sizes[std::size_t(c)]);
      const double pairs = a == c ? na * (na - 1.0) / 2.0 : na * nc;
      const double e = fit.edges(a, c);
      const double p = b(a, c);
      total += e * (1.0 - p) * (1.0 - p) + (pairs - e) * p * p;
    }
  }
  return static_cast<double>(total);
}

inline ProbMatrix expand_blocks(std::span<const std::size_t> labels, const Eigen::MatrixXd& b) {
  const auto n = static_cast<Eigen::Index>(labels.size());
  Eigen::MatrixXd p(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      p(i, j) = i == j ? 0.0 : b(Eigen::Index(labels[std::size_t(i)]), Eigen::Index(labels[std::size_t(j)]));
    }
  }
  return ProbMatrix(std::move(p));
}

// Degree-descending order (ties by index) cut into b contiguous groups whose
// sizes differ by at most one.
inline std::vector<std::size_t> degree_groups(const LabeledGraph& g, std::size_t b) {
  const std::size_t n = g.size();
  std::vector<Vertex> order(n);
  std::iota(order.begin(), order.end(), Vertex{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Vertex x, Vertex y) { return g.degree(x) > g.degree(y); });
  std::vector<std::size_t> labels(n);
  const std::size_t base = n / b, extra = n % b;
  std::size_t pos = 0;
  for (std::size_t grp = 0; grp < b; ++grp) {
    const std::size_t len = base + (grp < extra ? 1 : 0);
    for (std::size_t t = 0; t < len; ++t) labels[order[pos++]] = grp;
  }
  return labels;
}

inline std::vector<double> proportions(std::span<const std::size_t> sizes, std::size_t n) {
  std::vector<double> out;
  for (auto s : sizes) out.push_back(static_cast<double>(s) / static_cast<double>(n));
  return out;
}

}  // namespace detail

// Degree-sorted network histogram with b groups.
inline EstimationReport estimate_histogram(const LabeledGraph& g, std::size_t b) {
  const std::size_t n = g.size();
  if (b < 1 || b > n) {
    throw InvalidParameter("histogram bandwidth b=" + std::to_string(b) + " outside [1, " +
                           std::to_string(n) + "]");
  }
  EstimationReport report;
  report.method = "histogram";
  report.labels = detail::degree_groups(g, b);
  const auto fit = detail::fit_blocks(g, report.labels, b);
  report.p_hat = detail::expand_blocks(report.labels, fit.means);
  report.w_hat = StepGraphon(fit.means);
  report.proportions = detail::proportions(fit.sizes, n);
  return report;
}

struct BlockmodelOptions {
  std::size_t iters = 50;
  std::size_t random_restarts = 0;  // extra fits from seeded random labels
};

namespace detail {

struct LabelFit {
  std::vector<std::size_t> labels;
  Eigen::MatrixXd b;
  std::vector<std::size_t> sizes;
  std::vector<double> trace;
};

// Alternating least squares: refit block means, then move each vertex (in
// index order) to the block minimizing its own squared error.
inline LabelFit alternate_blocks(const LabeledGraph& g, std::vector<std::size_t> labels,
                                 std::size_t k, std::size_t iters) {
  const std::size_t n = g.size();
  LabelFit out;
  for (std::size_t t = 0; t < iters; ++t) {
    const auto fit = fit_blocks(g, labels, k);
    out.trace.push_back(block_objective(fit, fit.means));

    std::vector<std::size_t> size = fit.sizes;
    std::vector<std::vector<double>> nbr(n, std::vector<double>(k, 0.0));
    for (const auto& e : g.edges()) {
      nbr[e.u][labels[e.v]] += 1.0;
      nbr[e.v][labels[e.u]] += 1.0;
    }
    const auto& bm = fit.means;
    bool moved = false;
    for (std::size_t i = 0; i < n; ++i) {
      const auto cost = [&](std::size_t c) {
        double total = 0.0;
        for (std::size_t blk = 0; blk < k; ++blk) {
          const double others = static_cast<double>(size[blk]) - (labels[i] == blk ? 1.0 : 0.0);
          const double ones = nbr[i][blk];
          const double p = bm(Eigen::Index(c), Eigen::Index(blk));
          total += ones * (1.0 - p) * (1.0 - p) + (others - ones) * p * p;
        }
        return total;
      };
      const std::size_t from = labels[i];
      double best_cost = cost(from);
      std::size_t best = from;
      for (std::size_t c = 0; c < k; ++c) {
        if (c == from) continue;
        const double cc = cost(c);
        if (cc < best_cost - 1e-12 * std::max(1.0, best_cost)) {
          best_cost = cc;
          best = c;
        }
      }
      if (best != from) {
        moved = true;
        labels[i] = best;
        --size[from];
        ++size[best];
        for (auto j : g.neighbors(Vertex(i))) {
          nbr[j][from] -= 1.0;
          nbr[j][best] += 1.0;
        }
      }
    }
    if (!moved) break;
  }
  const auto fit = fit_blocks(g, labels, k);
  out.trace.push_back(block_objective(fit, fit.means));
  out.labels = std::move(labels);
  out.b = fit.means;
  out.sizes = fit.sizes;
  return out;
}

}  // namespace detail

// Stochastic block model fit with k blocks, initialized from the degree
// histogram. The objective trace is non-increasing.
inline EstimationReport estimate_blockmodel(const LabeledGraph& g, std::size_t k, std::uint64_t seed,
                                            const BlockmodelOptions& opt = {}) {
  const std::size_t n = g.size();
  if (k < 1 || k > n) {
    throw InvalidParameter("blockmodel k=" + std::to_string(k) + " outside [1, " +
                           std::to_string(n) + "]");
  }
  detail::require(opt.iters >= 1, "blockmodel needs iters >= 1");
  auto best = detail::alternate_blocks(g, detail::degree_groups(g, k), k, opt.iters);
  for (std::size_t r = 0; r < opt.random_restarts; ++r) {
    Rng rng(derive_seed(seed, r));
    std::vector<std::size_t> labels(n);
    for (auto& l : labels) l = rng.index(k);
    auto fit = detail::alternate_blocks(g, std::move(labels), k, opt.iters);
    if (fit.trace.back() < best.trace.back()) best = std::move(fit);
  }
  EstimationReport report;
  report.method = "blockmodel";
  report.p_hat = detail::expand_blocks(best.labels, best.b);
  report.w_hat = StepGraphon(best.b);
  report.proportions = detail::proportions(best.sizes, n);
  report.labels = std::move(best.labels);
  report.objective_trace = std::move(best.trace);
  return report;
}

// Singular value thresholding of a zero-filled symmetric 0/1 matrix. Keeps
// singular values above (2 + eta) sqrt(n p), p = max(density of ones, 1/n),
// then divides the reconstruction by the fraction of entries actually
// observed, clips to [0, 1] and zeroes the diagonal.
inline ProbMatrix usvt_matrix(const Eigen::MatrixXd& y, double observed_fraction, double eta) {
  detail::require(eta > 0.0 && eta < 1.0, "usvt: eta must lie in (0, 1)");
  detail::require(y.rows() == y.cols(), "usvt: matrix must be square");
  const auto n = y.rows();
  if (n < 2 || observed_fraction <= 0.0) {
    return ProbMatrix(Eigen::MatrixXd::Zero(n, n));
  }
  const double nd = static_cast<double>(n);
  const double density = std::max(y.sum() / (nd * nd), 1.0 / nd);
  const double threshold = (2.0 + eta) * std::sqrt(nd * density);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(y);
  const auto& values = eig.eigenvalues();
  const auto& vectors = eig.eigenvectors();
  Eigen::MatrixXd recon = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    if (std::abs(values(c)) > threshold) {
      recon.noalias() += values(c) * vectors.col(c) * vectors.col(c).transpose();
    }
  }
  recon /= observed_fraction;
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      out(i, j) = out(j, i) = std::clamp(0.5 * (recon(i, j) + recon(j, i)), 0.0, 1.0);
    }
  }
  return ProbMatrix(std::move(out));
}

inline EstimationReport estimate_usvt(const LabeledGraph& g, double eta = 0.01) {
  detail::require(eta > 0.0 && eta < 1.0, "usvt: eta must lie in (0, 1)");
  const double n = static_cast<double>(g.size());
  EstimationReport report;
  report.method = "usvt";
  // the diagonal is structurally unobserved
  report.p_hat = usvt_matrix(adjacency_matrix(g), n >= 2 ? (n - 1.0) / n : 0.0, eta);
  return report;
}

// ---------------------------------------------------------------------------
// Consistency sweep

enum class Method { kHistogram, kBlockmodel, kUsvt };

inline Method parse_method(const std::string& tag) {
  if (tag == "histogram") return Method::kHistogram;
  if (tag == "blockmodel") return Method::kBlockmodel;
  if (tag == "usvt") return Method::kUsvt;
  throw InvalidParameter("unknown estimation method '" + tag + "'");
}

inline std::string method_name(Method m) {
  switch (m) {
    case Method::kHistogram: return "histogram";
    case Method::kBlockmodel: return "blockmodel";
    case Method::kUsvt: return "usvt";
  }
  return "unknown";
}

// Target density as a function of n.
struct DensityRule {
  enum class Kind { kConstant, kLogOverN };
  Kind kind = Kind::kConstant;
  double c = 1.0;

  // const:<c> -> c;  logn:<c> -> c log(n) / n, capped at 1
  static DensityRule parse(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw InvalidParameter("bad density rule '" + text + "'");
    DensityRule rule;
    const auto kind = text.substr(0, colon);
    try {
      rule.c = std::stod(text.substr(colon + 1));
    } catch (const std::exception&) {
      throw InvalidParameter("bad density rule constant in '" + text + "'");
    }
    if (kind == "const") {
      rule.kind = Kind::kConstant;
    } else if (kind == "logn") {
      rule.kind = Kind::kLogOverN;
    } else {
      throw InvalidParameter("unknown density rule '" + kind + "'");
    }
    detail::require(rule.c > 0.0, "density rule constant must be positive");
    return rule;
  }

  double operator()(std::size_t n) const {
    if (kind == Kind::kConstant) return c;
    const double nd = static_cast<double>(n);
    return std::min(1.0, c * std::log(nd) / nd);
  }
};

struct SweepRow {
  std::size_t n = 0;
  double rho = 0.0;
  std::size_t seed_count = 0;
  double mse_mean = 0.0;
  double mse_std = 0.0;
};

struct ConsistencyConfig {
  Method method = Method::kHistogram;
  std::size_t seeds = 10;
  std::uint64_t base_seed = 0;
  double eta = 0.01;
  BlockmodelOptions blockmodel{};
  // blocks for histogram / blockmodel; defaults to ceil(n^(1/3))
  std::function<std::size_t(std::size_t)> blocks = default_bandwidth;
};

namespace detail {

inline std::pair<double, double> mean_and_std(std::span<const double> xs) {
  const double m = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() < 2) return {m, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

}  // namespace detail

inline EstimationReport run_estimator(const LabeledGraph& g, const ConsistencyConfig& cfg,
                                      std::uint64_t seed) {
  const std::size_t blocks = std::clamp<std::size_t>(cfg.blocks(g.size()), 1, g.size());
  switch (cfg.method) {
    case Method::kHistogram: return estimate_histogram(g, blocks);
    case Method::kBlockmodel: return estimate_blockmodel(g, blocks, seed, cfg.blockmodel);
    case Method::kUsvt: return estimate_usvt(g, cfg.eta);
  }
  throw InvalidParameter("unknown method");
}

// For each n: sample_sparse(W, n, rho(n)), estimate, and score against the
// realized probability matrix; mean and sample std over seeds. Replicate s
// at size n uses seed derive_seed(base_seed, n, s).
template <GraphonLike W>
std::vector<SweepRow> consistency_sweep(const W& w, std::span<const std::size_t> n_list,
                                        const DensityRule& rho_rule, const ConsistencyConfig& cfg) {
  detail::require(!n_list.empty(), "consistency sweep needs at least one n");
  detail::require(std::is_sorted(n_list.begin(), n_list.end()) &&
                      std::adjacent_find(n_list.begin(), n_list.end()) == n_list.end(),
                  "consistency sweep n list must be strictly ascending");
  detail::require(cfg.seeds >= 1, "consistency sweep needs seeds >= 1");
  std::vector<SweepRow> rows;
  for (auto n : n_list) {
    detail::require(n >= 2, "consistency sweep needs n >= 2");
    const double rho = rho_rule(n);
    std::vector<double> errors;
    for (std::size_t s = 0; s < cfg.seeds; ++s) {
      const std::uint64_t seed = derive_seed(cfg.base_seed, n, s);
      const auto trace = sample_sparse(w, n, rho, seed);
      const auto report = run_estimator(trace.graph, cfg, derive_seed(seed, 1));
      errors.push_back(mse_vs_truth(report.p_hat, *trace.prob));
    }
    const auto [mean, sd] = detail::mean_and_std(errors);
    rows.push_back({n, rho, cfg.seeds, mean, sd});
  }
  return rows;
}

}  // namespace graphon
