#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "graphon/core.hpp"
#include "graphon/rng.hpp"

namespace graphon {

// Symmetric n x n edge-probability matrix with entries in [0, 1] and a zero
// diagonal.
class ProbMatrix {
 public:
  ProbMatrix() = default;

  explicit ProbMatrix(Eigen::MatrixXd p) : p_(std::move(p)) {
    detail::require(p_.rows() == p_.cols(), "probability matrix must be square");
    for (Eigen::Index i = 0; i < p_.rows(); ++i) {
      detail::require(p_(i, i) == 0.0, "probability matrix needs a zero diagonal");
      for (Eigen::Index j = i + 1; j < p_.cols(); ++j) {
        const double v = p_(i, j);
        detail::require(v >= 0.0 && v <= 1.0, "probability matrix entries must lie in [0, 1]");
        detail::require(v == p_(j, i), "probability matrix is not symmetric");
      }
    }
  }

  std::size_t size() const { return static_cast<std::size_t>(p_.rows()); }
  double operator()(std::size_t i, std::size_t j) const {
    return p_(Eigen::Index(i), Eigen::Index(j));
  }
  const Eigen::MatrixXd& matrix() const { return p_; }

  // Mean over off-diagonal pairs.
  double mean() const {
    const double n = static_cast<double>(size());
    return n < 2 ? 0.0 : p_.sum() / (n * (n - 1.0));
  }

 private:
  Eigen::MatrixXd p_;
};

// Species proportions plus symmetric connection probabilities.
class BlockModel {
 public:
  BlockModel(std::vector<double> pi, Eigen::MatrixXd b) : pi_(std::move(pi)), b_(std::move(b)) {
    const auto k = static_cast<Eigen::Index>(pi_.size());
    detail::require(k >= 1, "block model needs at least one species");
    detail::require(b_.rows() == k && b_.cols() == k, "block matrix must be k x k");
    double total = 0.0;
    for (double p : pi_) {
      detail::require(p >= 0.0, "species proportions must be nonnegative");
      total += p;
    }
    detail::require(std::abs(total - 1.0) <= 1e-12, "species proportions must sum to 1");
    for (Eigen::Index a = 0; a < k; ++a) {
      for (Eigen::Index c = 0; c < k; ++c) {
        detail::require(b_(a, c) >= 0.0 && b_(a, c) <= 1.0, "block probabilities must lie in [0, 1]");
        detail::require(b_(a, c) == b_(c, a), "block matrix is not symmetric");
      }
    }
  }

  std::size_t k() const { return pi_.size(); }
  const std::vector<double>& pi() const { return pi_; }
  const Eigen::MatrixXd& b() const { return b_; }

  // Species whose cumulative-proportion interval contains u in [0, 1).
  std::size_t species_at(double u) const {
    double cum = 0.0;
    for (std::size_t a = 0; a + 1 < pi_.size(); ++a) {
      cum += pi_[a];
      if (u < cum) return a;
    }
    return pi_.size() - 1;
  }

 private:
  std::vector<double> pi_;
  Eigen::MatrixXd b_;
};

// The graphon induced by a block model: species intervals laid out in order
// along [0, 1].
inline KernelGraphon block_kernel(const BlockModel& model) {
  return KernelGraphon(
      [model](double x, double y) {
        return model.b()(Eigen::Index(model.species_at(x)), Eigen::Index(model.species_at(y)));
      },
      KernelBound::kByOne, 1.0, "block");
}

struct SampleTrace {
  LabeledGraph graph;
  std::vector<double> latents;       // feature x_i per vertex
  std::vector<double> births;        // graphex only
  std::vector<std::size_t> species;  // block model only
  std::optional<ProbMatrix> prob;    // realized P_ij, unless disabled for size
};

struct SamplerOptions {
  // Dense P is skipped above this many vertices.
  std::size_t prob_matrix_limit = 20000;
};

namespace detail {

// Edge coins in lexicographic pair order; one uniform per pair.
template <class ProbFn>
SampleTrace realize(std::size_t n, Rng& rng, ProbFn&& prob, bool keep_prob) {
  SampleTrace trace;
  Eigen::MatrixXd p;
  if (keep_prob) p = Eigen::MatrixXd::Zero(Eigen::Index(n), Eigen::Index(n));
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double pij = prob(i, j);
      if (keep_prob) p(Eigen::Index(i), Eigen::Index(j)) = p(Eigen::Index(j), Eigen::Index(i)) = pij;
      if (rng.bernoulli(pij)) edges.push_back({Vertex(i), Vertex(j)});
    }
  }
  trace.graph = LabeledGraph(n, std::move(edges));
  if (keep_prob) trace.prob = ProbMatrix(std::move(p));
  return trace;
}

inline double clip_probability(double v) {
  if (std::isnan(v)) throw InvalidParameter("graphon returned NaN");
  return std::clamp(v, 0.0, 1.0);
}

}  // namespace detail

// Sparse W-random graph: features x_i uniform on the graphon's domain, pair
// {i, j} an edge with probability min(1, rho W(x_i, x_j)).
template <GraphonLike W>
SampleTrace sample_sparse(const W& w, std::size_t n, double rho, std::uint64_t seed,
                          const SamplerOptions& opt = {}) {
  detail::require(n >= 1, "sampler needs n >= 1");
  detail::require(std::isfinite(rho) && rho > 0.0, "sample_sparse: rho must be positive");
  Rng rng(seed);
  std::vector<double> x(n);
  for (auto& xi : x) xi = rng.uniform(0.0, w.domain());
  auto trace = detail::realize(
      n, rng,
      [&](std::size_t i, std::size_t j) {
        const double v = w.value(x[i], x[j]);
        detail::require(v >= 0.0, "graphon must be nonnegative");
        return detail::clip_probability(rho * v);
      },
      n <= opt.prob_matrix_limit);
  trace.latents = std::move(x);
  return trace;
}

// Dense W-random graph; W must be bounded by 1. Same draw sequence as
// sample_sparse with rho = 1.
template <GraphonLike W>
SampleTrace sample_dense(const W& w, std::size_t n, std::uint64_t seed,
                         const SamplerOptions& opt = {}) {
  if (!w.bounded_by_one()) {
    throw InvalidParameter("sample_dense needs a graphon bounded by 1; use sample_sparse");
  }
  return sample_sparse(w, n, 1.0, seed, opt);
}

// Stochastic block model: species i.i.d. from pi, edges with probability
// B[s_i][s_j]. Latents hold the species label.
inline SampleTrace sample_sbm(const BlockModel& model, std::size_t n, std::uint64_t seed,
                              const SamplerOptions& opt = {}) {
  detail::require(n >= 1, "sampler needs n >= 1");
  Rng rng(seed);
  std::vector<std::size_t> s(n);
  for (auto& si : s) si = model.species_at(rng.uniform());
  auto trace = detail::realize(
      n, rng,
      [&](std::size_t i, std::size_t j) {
        return model.b()(Eigen::Index(s[i]), Eigen::Index(s[j]));
      },
      n <= opt.prob_matrix_limit);
  trace.latents.assign(s.begin(), s.end());
  trace.species = std::move(s);
  return trace;
}

struct GraphexParams {
  double lambda = 1.0;  // intensity per unit time per unit feature
  double time = 1.0;    // snapshot time T
  double x_max = 1.0;   // feature-space truncation
};

// Graphex snapshot at time T: candidates form a Poisson process of intensity
// lambda on [0, T] x [0, x_max] (N ~ Poisson(lambda T x_max)), generated in
// birth order. Each candidate pair is an edge with probability W(x_i, x_j);
// degree-0 vertices are dropped and survivors relabeled in birth order.
template <GraphonLike W>
SampleTrace sample_graphex(const W& w, const GraphexParams& params, std::uint64_t seed,
                           const SamplerOptions& opt = {}) {
  detail::require(params.lambda > 0.0 && params.time > 0.0 && params.x_max > 0.0,
                  "graphex: lambda, T and x_max must be positive");
  detail::require(w.bounded_by_one(), "graphex needs a graphon bounded by 1");
  detail::require(w.domain() >= params.x_max, "graphex: kernel domain smaller than x_max");
  Rng rng(seed);
  // arrivals in time at rate lambda * x_max
  const double rate = params.lambda * params.x_max;
  std::vector<double> births;
  for (double t = rng.exponential() / rate; t <= params.time; t += rng.exponential() / rate) {
    births.push_back(t);
  }
  const std::size_t m = births.size();
  std::vector<double> features(m);
  for (auto& f : features) f = rng.uniform(0.0, params.x_max);

  std::vector<Edge> candidate_edges;
  std::vector<std::size_t> degree(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      if (rng.bernoulli(detail::clip_probability(w.value(features[i], features[j])))) {
        candidate_edges.push_back({Vertex(i), Vertex(j)});
        ++degree[i];
        ++degree[j];
      }
    }
  }
  std::vector<std::size_t> new_id(m, m);
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < m; ++i) {
    if (degree[i] > 0) {
      new_id[i] = kept.size();
      kept.push_back(i);
    }
  }
  std::vector<Edge> edges;
  edges.reserve(candidate_edges.size());
  for (const auto& e : candidate_edges) edges.push_back({Vertex(new_id[e.u]), Vertex(new_id[e.v])});

  SampleTrace trace;
  const std::size_t n = kept.size();
  trace.graph = LabeledGraph(n, std::move(edges));
  for (auto i : kept) {
    trace.births.push_back(births[i]);
    trace.latents.push_back(features[i]);
  }
  if (n <= opt.prob_matrix_limit) {
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(Eigen::Index(n), Eigen::Index(n));
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        p(Eigen::Index(a), Eigen::Index(b)) = p(Eigen::Index(b), Eigen::Index(a)) =
            detail::clip_probability(w.value(trace.latents[a], trace.latents[b]));
      }
    }
    trace.prob = ProbMatrix(std::move(p));
  }
  return trace;
}

}  // namespace graphon
