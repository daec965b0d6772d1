#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "graphon/core.hpp"
#include "graphon/estimation.hpp"
#include "graphon/rng.hpp"
#include "graphon/samplers.hpp"

namespace graphon {

using BoolMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct Observation {
  Vertex u = 0;
  Vertex v = 0;
  bool value = false;
};

struct Bipartition {
  std::size_t rows = 0;
  std::size_t cols = 0;
};

// Symmetric partially observed 0/1 matrix. Bipartite networks are embedded
// in (rows + cols) x (rows + cols) form: vertices 0..rows-1 are rows, the rest
// columns, and within-side pairs are never observed.
class ObservedNetwork {
 public:
  ObservedNetwork(std::size_t n, std::span<const Observation> obs,
                  std::optional<Bipartition> bipartite = std::nullopt)
      : n_(n),
        values_(Eigen::MatrixXd::Zero(Eigen::Index(n), Eigen::Index(n))),
        mask_(BoolMatrix::Constant(Eigen::Index(n), Eigen::Index(n), false)),
        bipartite_(bipartite) {
    if (bipartite_) {
      detail::require(bipartite_->rows + bipartite_->cols == n,
                      "bipartite split must satisfy rows + cols = n");
    }
    for (const auto& o : obs) {
      detail::require(o.u < n && o.v < n, "observation index out of range");
      detail::require(o.u != o.v, "diagonal pairs cannot be observed");
      detail::require(!mask_(o.u, o.v), "pair observed twice");
      if (bipartite_) {
        detail::require(side(o.u) != side(o.v), "bipartite observation within one side");
      }
      mask_(o.u, o.v) = mask_(o.v, o.u) = true;
      values_(o.u, o.v) = values_(o.v, o.u) = o.value ? 1.0 : 0.0;
      ++observed_;
    }
  }

  std::size_t size() const { return n_; }
  const Eigen::MatrixXd& values() const { return values_; }  // 0 where unobserved
  const BoolMatrix& mask() const { return mask_; }
  const std::optional<Bipartition>& bipartite() const { return bipartite_; }
  std::size_t observed_pairs() const { return observed_; }

  // Pairs that could be observed: C(n, 2), or rows * cols when bipartite.
  std::size_t possible_pairs() const {
    return bipartite_ ? bipartite_->rows * bipartite_->cols : n_ * (n_ - (n_ > 0 ? 1 : 0)) / 2;
  }

  double observed_density() const {
    const auto total = possible_pairs();
    return total == 0 ? 0.0 : static_cast<double>(observed_) / static_cast<double>(total);
  }

  // 0 for row vertices, 1 for column vertices; always 0 when not bipartite.
  int side(std::size_t v) const { return bipartite_ && v >= bipartite_->rows ? 1 : 0; }

  std::vector<Observation> observations() const {
    std::vector<Observation> out;
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i + 1; j < n_; ++j) {
        if (mask_(Eigen::Index(i), Eigen::Index(j))) {
          out.push_back({Vertex(i), Vertex(j), values_(Eigen::Index(i), Eigen::Index(j)) != 0.0});
        }
      }
    }
    return out;
  }

 private:
  std::size_t n_;
  Eigen::MatrixXd values_;
  BoolMatrix mask_;
  std::optional<Bipartition> bipartite_;
  std::size_t observed_ = 0;
};

// Each pair observed with probability p; an observed pair reads a
// Bernoulli(P_ij) value. Per pair, in lexicographic order: one coin for
// observation, then one for the value when observed.
inline ObservedNetwork observe(const ProbMatrix& p_true, double p, std::uint64_t seed) {
  if (!(p > 0.0 && p <= 1.0)) throw InvalidParameter("observe: p must lie in (0, 1]");
  const std::size_t n = p_true.size();
  Rng rng(seed);
  std::vector<Observation> obs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!rng.bernoulli(p)) continue;
      obs.push_back({Vertex(i), Vertex(j), rng.bernoulli(p_true(i, j))});
    }
  }
  return ObservedNetwork(n, obs);
}

namespace detail {

// M^r with M the zero-filled observed values; entries are path counts.
inline Eigen::MatrixXd path_count_power(const Eigen::MatrixXd& m, int r) {
  Eigen::MatrixXd out = m;
  for (int t = 1; t < r; ++t) out = (out * m).eval();
  return out;
}

inline int radius_cap(std::size_t n) {
  return std::max(1, static_cast<int>(std::ceil(std::log2(static_cast<double>(std::max<std::size_t>(n, 2))))));
}

// Row-wise nonzero patterns as bitsets.
class BitRows {
 public:
  explicit BitRows(const Eigen::MatrixXd& m)
      : n_(std::size_t(m.rows())), words_((std::size_t(m.cols()) + 63) / 64), bits_(n_ * words_, 0) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (m(i, j) != 0.0) bits_[std::size_t(i) * words_ + std::size_t(j) / 64] |= std::uint64_t{1} << (j % 64);
      }
    }
  }

  std::size_t overlap(std::size_t a, std::size_t b) const {
    std::size_t c = 0;
    for (std::size_t w = 0; w < words_; ++w) c += std::popcount(bits_[a * words_ + w] & bits_[b * words_ + w]);
    return c;
  }

  const std::uint64_t* row(std::size_t a) const { return &bits_[a * words_]; }
  std::size_t words() const { return words_; }
  bool test(std::size_t a, std::size_t j) const { return (row(a)[j / 64] >> (j % 64)) & 1U; }

 private:
  std::size_t n_, words_;
  std::vector<std::uint64_t> bits_;
};

}  // namespace detail

// N_r = M^r / p^r with p the observed density.
inline Eigen::MatrixXd expanded_path_counts(const ObservedNetwork& obs, int r) {
  if (r < 1) throw InvalidParameter("expanded_path_counts: r must be >= 1");
  const double p = obs.observed_density();
  if (p == 0.0) return Eigen::MatrixXd::Zero(Eigen::Index(obs.size()), Eigen::Index(obs.size()));
  return detail::path_count_power(obs.values(), r) / std::pow(p, r);
}

struct RadiusChoice {
  int radius = 1;
  bool warning = false;  // no radius up to the cap met the overlap target
};

// Smallest r <= ceil(log2 n) for which at least 99% of vertex pairs have
// rows of N_r sharing >= min_overlap nonzero columns. Bipartite networks
// consider even r and same-side pairs only.
inline RadiusChoice select_radius(const ObservedNetwork& obs, std::size_t min_overlap) {
  detail::require(min_overlap >= 1, "select_radius: min_overlap must be >= 1");
  if (obs.observed_pairs() == 0) throw NoDataError("select_radius: no observed pairs");
  const std::size_t n = obs.size();
  const bool bip = obs.bipartite().has_value();
  int cap = detail::radius_cap(n);
  if (bip && cap % 2 == 1) ++cap;
  const int step = bip ? 2 : 1;

  const Eigen::MatrixXd& m = obs.values();
  Eigen::MatrixXd power = bip ? (m * m).eval() : m;
  for (int r = step; r <= cap; r += step) {
    if (r > step) power = (bip ? (power * m * m).eval() : (power * m).eval());
    const detail::BitRows rows(power);
    std::size_t pairs = 0, good = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (obs.side(i) != obs.side(j)) continue;
        ++pairs;
        good += rows.overlap(i, j) >= min_overlap ? 1 : 0;
      }
    }
    if (pairs > 0 && static_cast<double>(good) >= 0.99 * static_cast<double>(pairs)) return {r, false};
  }
  return {cap, true};
}

// Assignment of every observed pair to half 1 (true) or half 2 (false).
using SampleSplit = BoolMatrix;

// One fair coin per observed pair, lexicographic order.
inline SampleSplit make_split(const ObservedNetwork& obs, std::uint64_t seed) {
  const auto n = Eigen::Index(obs.size());
  SampleSplit split = SampleSplit::Constant(n, n, false);
  Rng rng(seed);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (obs.mask()(i, j)) split(i, j) = split(j, i) = rng.bernoulli(0.5);
    }
  }
  return split;
}

// Sample-split distance between vertices:
//   d(u, v) = max(0, mean over anchors w of (N1[u][w] - N1[v][w]) (N2[u][w] - N2[v][w]))
// with N_h the expanded path counts of half h (each scaled by its own
// observed density). Anchors are w not in {u, v} reached, in each half, by
// an observed r-path from u or from v. The product estimates a squared
// distance, so negative noise is clamped to 0. No anchors gives +inf;
// d(u, u) = 0. Cross-side pairs of a bipartite network are +inf.
// At r = 1 each observed entry sits in one half only, the squared-norm terms
// vanish and the raw product is <= 0: every finite distance clamps to 0.
inline Eigen::MatrixXd pairwise_distance(const ObservedNetwork& obs, int r, const SampleSplit& split) {
  if (r < 1) throw InvalidParameter("pairwise_distance: r must be >= 1");
  const std::size_t n = obs.size();
  const auto nn = Eigen::Index(n);
  detail::require(split.rows() == nn && split.cols() == nn, "sample split size mismatch");

  Eigen::MatrixXd half1 = Eigen::MatrixXd::Zero(nn, nn), half2 = Eigen::MatrixXd::Zero(nn, nn);
  Eigen::MatrixXd mask1 = Eigen::MatrixXd::Zero(nn, nn), mask2 = Eigen::MatrixXd::Zero(nn, nn);
  std::size_t count1 = 0, count2 = 0;
  for (Eigen::Index i = 0; i < nn; ++i) {
    for (Eigen::Index j = 0; j < nn; ++j) {
      if (!obs.mask()(i, j)) continue;
      const bool first = split(i, j);
      (first ? half1 : half2)(i, j) = obs.values()(i, j);
      (first ? mask1 : mask2)(i, j) = 1.0;
      if (i < j) ++(first ? count1 : count2);
    }
  }
  const double possible = static_cast<double>(obs.possible_pairs());
  // raw path counts are integer valued; the density scaling is applied once
  // per pair at the end so sums stay exact for moderate counts
  const Eigen::MatrixXd c1 = detail::path_count_power(half1, r);
  const Eigen::MatrixXd c2 = detail::path_count_power(half2, r);
  const double p1 = static_cast<double>(count1) / possible;
  const double p2 = static_cast<double>(count2) / possible;
  const double scale = (p1 > 0.0 && p2 > 0.0) ? 1.0 / (std::pow(p1, r) * std::pow(p2, r)) : 0.0;
  const detail::BitRows nz1(detail::path_count_power(mask1, r)), nz2(detail::path_count_power(mask2, r));

  constexpr double inf = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(nn, nn, inf);
  for (std::size_t u = 0; u < n; ++u) {
    d(Eigen::Index(u), Eigen::Index(u)) = 0.0;
    for (std::size_t v = u + 1; v < n; ++v) {
      if (obs.side(u) != obs.side(v)) continue;
      std::size_t anchors = 0;
      for (std::size_t w = 0; w < nz1.words(); ++w) {
        anchors += std::popcount((nz1.row(u)[w] | nz1.row(v)[w]) & (nz2.row(u)[w] | nz2.row(v)[w]));
      }
      for (std::size_t x : {u, v}) {
        const bool any1 = nz1.test(u, x) || nz1.test(v, x);
        const bool any2 = nz2.test(u, x) || nz2.test(v, x);
        anchors -= (any1 && any2) ? 1 : 0;
      }
      if (anchors == 0 || scale == 0.0) continue;
      long double acc = 0.0L;
      for (std::size_t w = 0; w < n; ++w) {
        if (w == u || w == v) continue;
        const auto a = static_cast<long double>(c1(Eigen::Index(u), Eigen::Index(w))) - c1(Eigen::Index(v), Eigen::Index(w));
        const auto b = static_cast<long double>(c2(Eigen::Index(u), Eigen::Index(w))) - c2(Eigen::Index(v), Eigen::Index(w));
        acc += a * b;
      }
      const double value = std::max(0.0, static_cast<double>(acc / static_cast<long double>(anchors)) * scale);
      d(Eigen::Index(u), Eigen::Index(v)) = d(Eigen::Index(v), Eigen::Index(u)) = value;
    }
  }
  return d;
}

inline Eigen::MatrixXd pairwise_distance(const ObservedNetwork& obs, int r, std::uint64_t seed) {
  return pairwise_distance(obs, r, make_split(obs, seed));
}

struct CompletionConfig {
  std::optional<int> radius;  // empty = select_radius
  double quantile = 0.2;
  std::size_t min_overlap = 5;
  std::uint64_t seed = 0;
};

struct CompletionResult {
  ProbMatrix p_hat;
  int radius = 1;
  double threshold = 0.0;      // h
  double quantile = 0.2;
  std::size_t fallback_pairs = 0;
  bool warning = false;
};

// Expanded-neighborhood completion. With D the sample-split distance and h
// the q-quantile of its finite off-diagonal values, P_hat(i, j) averages the
// observed values on pairs {u, v} != {i, j} with d(i, u) <= h and d(j, v) <= h.
// Pairs with nothing to average take the global observed mean.
inline CompletionResult complete(const ObservedNetwork& obs, const CompletionConfig& cfg,
                                 const SampleSplit& split) {
  if (obs.observed_pairs() == 0) throw NoDataError("complete: no observed pairs");
  detail::require(cfg.quantile > 0.0 && cfg.quantile < 1.0, "complete: quantile must lie in (0, 1)");
  const bool bip = obs.bipartite().has_value();
  CompletionResult result;
  result.quantile = cfg.quantile;
  if (cfg.radius) {
    detail::require(*cfg.radius >= 1, "complete: radius must be >= 1");
    if (bip && *cfg.radius % 2 == 1) {
      throw InvalidParameter("complete: bipartite networks need an even radius (got " +
                             std::to_string(*cfg.radius) + ")");
    }
    result.radius = *cfg.radius;
  } else {
    const auto choice = select_radius(obs, cfg.min_overlap);
    result.radius = choice.radius;
    result.warning = choice.warning;
  }

  const std::size_t n = obs.size();
  const auto nn = Eigen::Index(n);
  const Eigen::MatrixXd d = pairwise_distance(obs, result.radius, split);

  std::vector<double> finite;
  for (Eigen::Index i = 0; i < nn; ++i) {
    for (Eigen::Index j = i + 1; j < nn; ++j) {
      if (std::isfinite(d(i, j))) finite.push_back(d(i, j));
    }
  }
  double h = 0.0;
  if (!finite.empty()) {
    std::sort(finite.begin(), finite.end());
    const auto rank = static_cast<std::size_t>(std::ceil(cfg.quantile * static_cast<double>(finite.size())));
    h = finite[std::max<std::size_t>(rank, 1) - 1];
  }
  result.threshold = h;

  Eigen::MatrixXd near = Eigen::MatrixXd::Zero(nn, nn);
  for (Eigen::Index i = 0; i < nn; ++i) {
    for (Eigen::Index u = 0; u < nn; ++u) near(i, u) = d(i, u) <= h ? 1.0 : 0.0;
  }
  const Eigen::MatrixXd observed = obs.mask().cast<double>().matrix();
  const Eigen::MatrixXd& values = obs.values();
  // integer-valued sums and counts over neighborhood pairs
  const Eigen::MatrixXd sums = near * values * near.transpose();
  const Eigen::MatrixXd counts = near * observed * near.transpose();

  const double global_mean = values.sum() / observed.sum();
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(nn, nn);
  for (Eigen::Index i = 0; i < nn; ++i) {
    for (Eigen::Index j = i + 1; j < nn; ++j) {
      if (bip && obs.side(std::size_t(i)) == obs.side(std::size_t(j))) continue;
      double s_ij = sums(i, j), c_ij = counts(i, j);
      double s_ji = sums(j, i), c_ji = counts(j, i);
      // leave out the target pair itself, in either orientation
      if (obs.mask()(i, j)) {
        const double v = values(i, j);
        const double ii = near(i, i), jj = near(j, j), ij = near(i, j), ji = near(j, i);
        s_ij -= v * (ii * jj + ij * ji);
        c_ij -= ii * jj + ij * ji;
        s_ji -= v * (jj * ii + ji * ij);
        c_ji -= jj * ii + ji * ij;
      }
      double estimate = 0.0;
      if (c_ij > 0.0 && c_ji > 0.0) {
        estimate = 0.5 * (s_ij / c_ij + s_ji / c_ji);
      } else {
        estimate = global_mean;
        ++result.fallback_pairs;
      }
      p(i, j) = p(j, i) = std::clamp(estimate, 0.0, 1.0);
    }
  }
  result.p_hat = ProbMatrix(std::move(p));
  return result;
}

inline CompletionResult complete(const ObservedNetwork& obs, const CompletionConfig& cfg) {
  if (obs.observed_pairs() == 0) throw NoDataError("complete: no observed pairs");
  return complete(obs, cfg, make_split(obs, cfg.seed));
}

// USVT on a partially observed network: unobserved entries as zero, the
// reconstruction rescaled by the observed fraction of all n^2 entries.
inline ProbMatrix usvt_observed(const ObservedNetwork& obs, double eta = 0.01) {
  const double n = static_cast<double>(obs.size());
  const double fraction = n > 0 ? 2.0 * static_cast<double>(obs.observed_pairs()) / (n * n) : 0.0;
  return usvt_matrix(obs.values(), fraction, eta);
}

struct CompletionRow {
  double p = 0.0;
  std::size_t seed_count = 0;
  double mse_complete = 0.0;
  double mse_usvt = 0.0;
};

// For each p: latents and P from sample_dense(W, n), observe at density p,
// complete and run the USVT baseline, score both against P. Replicate s uses
// the same latents for every p.
template <GraphonLike W>
std::vector<CompletionRow> completion_sweep(const W& w, std::size_t n, std::span<const double> p_list,
                                            const CompletionConfig& cfg, std::size_t seeds,
                                            std::uint64_t base_seed, double eta = 0.01) {
  detail::require(!p_list.empty(), "completion sweep needs at least one p");
  detail::require(seeds >= 1, "completion sweep needs seeds >= 1");
  for (std::size_t i = 0; i < p_list.size(); ++i) {
    detail::require(p_list[i] > 0.0 && p_list[i] <= 1.0, "completion sweep p must lie in (0, 1]");
    detail::require(i == 0 || p_list[i] > p_list[i - 1], "completion sweep p list must be ascending");
  }
  std::vector<ProbMatrix> truths;
  for (std::size_t s = 0; s < seeds; ++s) truths.push_back(*sample_dense(w, n, derive_seed(base_seed, s)).prob);

  std::vector<CompletionRow> rows;
  for (std::size_t pi = 0; pi < p_list.size(); ++pi) {
    double complete_total = 0.0, usvt_total = 0.0;
    for (std::size_t s = 0; s < seeds; ++s) {
      const auto obs = observe(truths[s], p_list[pi], derive_seed(base_seed, s, pi + 1));
      CompletionConfig run = cfg;
      run.seed = derive_seed(cfg.seed, s, pi + 1);
      complete_total += mse_vs_truth(complete(obs, run).p_hat, truths[s]);
      usvt_total += mse_vs_truth(usvt_observed(obs, eta), truths[s]);
    }
    const double k = static_cast<double>(seeds);
    rows.push_back({p_list[pi], seeds, complete_total / k, usvt_total / k});
  }
  return rows;
}

}  // namespace graphon
