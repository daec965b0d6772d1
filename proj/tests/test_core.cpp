#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "graphon/core.hpp"
#include "graphon/kernels.hpp"
#include "graphon/rng.hpp"

using namespace graphon;

namespace {

LabeledGraph random_graph(std::size_t n, double p, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rng.bernoulli(p)) edges.push_back({Vertex(i), Vertex(j)});
    }
  }
  return LabeledGraph(n, edges);
}

}  // namespace

TEST(LabeledGraph, RejectsSelfLoopsAndDuplicates) {
  EXPECT_THROW(LabeledGraph(3, {{1, 1}}), InvalidParameter);
  EXPECT_THROW(LabeledGraph(3, {{0, 1}, {1, 0}}), InvalidParameter);
  EXPECT_THROW(LabeledGraph(3, {{0, 3}}), InvalidParameter);
  const LabeledGraph g(3, {{2, 0}});
  EXPECT_TRUE(g.has_edge(0, 2));
  EXPECT_TRUE(g.has_edge(2, 0));
  EXPECT_EQ(g.edges()[0], (Edge{0, 2}));
}

TEST(EmpiricalGraphon, CompleteAndEmpty) {
  const auto k3 = empirical_graphon(complete_graph(3));
  EXPECT_EQ(k3.k(), 3u);
  EXPECT_EQ(k3.scale(), 1.0);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) EXPECT_EQ(k3.grid()(a, b), a == b ? 0.0 : 1.0);
  }
  const auto empty = empirical_graphon(LabeledGraph(4));
  EXPECT_EQ(empty.grid(), Eigen::MatrixXd::Zero(4, 4));
}

TEST(EmpiricalGraphon, HalfGraphStaircase) {
  // rows 0..3 against columns 4..7: row i is 1 on columns 4..4+i
  const auto w = empirical_graphon(half_graph(4));
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      EXPECT_EQ(w.grid()(i, 4 + j), j <= i ? 1.0 : 0.0) << i << "," << j;
      EXPECT_EQ(w.grid()(i, j), 0.0);
      EXPECT_EQ(w.grid()(4 + i, 4 + j), 0.0);
    }
  }
}

TEST(EmpiricalGraphon, RoundTripRecoversEdges) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = random_graph(3 + seed % 11, 0.4, seed);
    EXPECT_EQ(graph_from_empirical(empirical_graphon(g)), g);
  }
}

TEST(BlowUp, SmallCases) {
  const auto c4 = blow_up(complete_graph(2), 2);
  EXPECT_EQ(c4.size(), 4u);
  EXPECT_EQ(c4.edge_count(), 4u);
  EXPECT_TRUE(c4.has_edge(0, 2));
  EXPECT_TRUE(c4.has_edge(1, 3));
  EXPECT_FALSE(c4.has_edge(0, 1));
  EXPECT_FALSE(c4.has_edge(2, 3));

  const auto g = random_graph(6, 0.5, 3);
  EXPECT_EQ(blow_up(g, 1), g);

  // K_{2,2,2}: three clone-group pairs, four edges each
  const auto k222 = blow_up(complete_graph(3), 2);
  EXPECT_EQ(k222.size(), 6u);
  EXPECT_EQ(k222.edge_count(), 12u);
  for (Vertex v = 0; v < 6; ++v) EXPECT_EQ(k222.degree(v), 4u);

  EXPECT_THROW(blow_up(g, 0), InvalidParameter);
}

TEST(BlowUp, PreservesEdgeDensity) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto g = random_graph(5 + seed, 0.3, seed);
    for (std::size_t k = 1; k <= 4; ++k) {
      const auto b = blow_up(g, k);
      EXPECT_EQ(b.edge_count(), k * k * g.edge_count());
      EXPECT_DOUBLE_EQ(edge_density(b), edge_density(g));
    }
  }
}

TEST(CommonBlowup, LcmSizes) {
  auto p = common_blowup_pair(LabeledGraph(2), LabeledGraph(3));
  EXPECT_EQ(p.first.size(), 6u);
  EXPECT_EQ(p.second.size(), 6u);
  EXPECT_EQ(p.k1, 3u);
  EXPECT_EQ(p.k2, 2u);

  const auto g = random_graph(5, 0.5, 1), h = random_graph(5, 0.5, 2);
  p = common_blowup_pair(g, h);
  EXPECT_EQ(p.k1, 1u);
  EXPECT_EQ(p.first, g);
  EXPECT_EQ(p.second, h);

  p = common_blowup_pair(LabeledGraph(4), LabeledGraph(6));
  EXPECT_EQ(p.first.size(), 12u);
  EXPECT_EQ(p.second.size(), 12u);
}

TEST(EdgeDensity, Values) {
  EXPECT_DOUBLE_EQ(edge_density(complete_graph(4)), 0.75);
  EXPECT_DOUBLE_EQ(edge_density(LabeledGraph(5)), 0.0);
  EXPECT_EQ(half_graph(4).edge_count(), 10u);
  EXPECT_DOUBLE_EQ(edge_density(half_graph(4)), 0.3125);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto g = random_graph(9, 0.5, seed);
    EXPECT_NEAR(empirical_graphon(g).integral(), edge_density(g), 1e-15);
  }
}

TEST(Rescale, DividesByDensity) {
  const auto w = empirical_graphon(complete_graph(4));
  const auto r = rescale(w, 0.75);
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) EXPECT_DOUBLE_EQ(r.grid()(a, b), a == b ? 0.0 : 4.0 / 3.0);
  }
  EXPECT_NEAR(r.integral(), 1.0, 1e-15);
  EXPECT_EQ(rescale(w, 1.0).grid(), w.grid());
  EXPECT_THROW(rescale(w, 0.0), InvalidParameter);
  EXPECT_THROW(rescale(w, -1.0), InvalidParameter);
}

TEST(Rescale, MultiplyBackIsIdentity) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto g = random_graph(7, 0.4, seed);
    const auto w = empirical_graphon(g);
    const double rho = 0.05 + 0.9 * Rng(seed).uniform();
    const Eigen::MatrixXd back = rescale(w, rho).grid() * rho;
    EXPECT_LE((back - w.grid()).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Stretch, DomainAndIntegral) {
  const auto w = empirical_graphon(complete_graph(4));
  const auto s = stretch(w, 0.75);
  EXPECT_NEAR(s.scale(), 1.0 / std::sqrt(0.75), 1e-15);
  EXPECT_NEAR(s.scale(), 1.1547005383792517, 1e-12);
  EXPECT_EQ(s.grid(), w.grid());
  EXPECT_NEAR(s.integral(), 1.0, 1e-14);
  EXPECT_EQ(stretch(w, 1.0).scale(), 1.0);
  EXPECT_THROW(stretch(w, 0.0), InvalidParameter);
  EXPECT_THROW(stretch(s, 0.5), InvalidParameter);

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto g = random_graph(6, 0.5, seed + 100);
    const auto e = empirical_graphon(g);
    const double rho = 0.1 + 0.8 * Rng(seed).uniform();
    EXPECT_NEAR(stretch(e, rho).integral(), e.integral() / rho, 1e-14);
  }
}

TEST(StepGraphon, RejectsAsymmetric) {
  Eigen::MatrixXd m(2, 2);
  m << 0, 1, 0.5, 0;
  EXPECT_THROW(StepGraphon{m}, InvalidParameter);
  m << 0, -1, -1, 0;
  EXPECT_THROW(StepGraphon{m}, InvalidParameter);
}

TEST(EvalGraphon, Lookup) {
  const auto c = StepGraphon::constant(0.3, 5);
  EXPECT_EQ(eval_graphon(c, 0.0, 1.0), 0.3);
  EXPECT_EQ(eval_graphon(c, 0.77, 0.12), 0.3);

  Eigen::MatrixXd m(2, 2);
  m << 0, 1, 1, 0;
  const StepGraphon w(m);
  EXPECT_EQ(eval_graphon(w, 0.25, 0.75), 1.0);
  EXPECT_EQ(eval_graphon(w, 1.0, 1.0), 0.0);  // boundary maps to the last cell
  EXPECT_EQ(eval_graphon(w, 0.5, 0.49), 1.0);
  EXPECT_THROW(eval_graphon(w, 1.01, 0.5), InvalidParameter);
  EXPECT_THROW(eval_graphon(w, -0.1, 0.5), InvalidParameter);

  const auto s = stretch(w, 0.25);
  EXPECT_EQ(eval_graphon(s, 2.0, 0.0), 1.0);
}

TEST(EvalGraphon, SymmetricProbes) {
  const auto w = empirical_graphon(random_graph(9, 0.5, 4));
  const auto k = kernels::product();
  Rng rng(9);
  for (int t = 0; t < 200; ++t) {
    const double x = rng.uniform(), y = rng.uniform();
    EXPECT_EQ(eval_graphon(w, x, y), eval_graphon(w, y, x));
    EXPECT_EQ(eval_graphon(k, x, y), eval_graphon(k, y, x));
  }
  EXPECT_THROW(eval_graphon(k, 1.5, 0.2), InvalidParameter);
}

TEST(Kernels, NamesAndDiscretize) {
  EXPECT_EQ(kernels::by_name("const:0.5").value(0.1, 0.9), 0.5);
  EXPECT_TRUE(kernels::by_name("const:0.5").bounded_by_one());
  EXPECT_FALSE(kernels::by_name("invquarter").bounded_by_one());
  EXPECT_EQ(kernels::by_name("halfplane").value(0.6, 0.5), 1.0);
  EXPECT_EQ(kernels::by_name("halfplane").value(0.4, 0.5), 0.0);
  EXPECT_NEAR(kernels::by_name("exp", 5.0).value(5.0, 0.0), std::exp(-5.0), 1e-15);
  EXPECT_THROW(kernels::by_name("nope"), InvalidParameter);
  EXPECT_THROW(kernels::by_name("const:abc"), InvalidParameter);

  // product kernel cell averages are exact under the midpoint rule
  const auto d = kernels::discretize(kernels::product(), 4, 4);
  EXPECT_NEAR(d.grid()(0, 0), (0.125 * 0.125), 1e-15);
  EXPECT_NEAR(d.grid()(1, 3), (0.375 * 0.875), 1e-15);
  EXPECT_NEAR(d.integral(), 0.25, 1e-15);
}
