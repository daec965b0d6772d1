#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "graphon/graphon.hpp"

namespace fs = std::filesystem;
using namespace graphon;

namespace {

struct Result {
  int code = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("graphon_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override {
    if (!HasFailure()) fs::remove_all(dir_);
  }

  // Runs the tool with --out-dir pointing into the test directory.
  Result run(const std::string& args, const std::string& out_sub = "out") const {
    const auto out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    const std::string cmd = std::string("\"") + GRAPHON_TOOL + "\" --out-dir \"" + (dir_ / out_sub).string() + "\" " +
                            args + " > \"" + out.string() + "\" 2> \"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  fs::path path(const std::string& rel) const { return dir_ / rel; }
  std::string quoted(const std::string& rel) const { return "\"" + path(rel).string() + "\""; }

  void write(const std::string& rel, const std::string& text) const { std::ofstream(path(rel)) << text; }

  fs::path dir_;
};

io::json read_json(const fs::path& p) { return io::json::parse(slurp(p)); }

// Value after "key=" in a line of tool output.
double field(const std::string& text, const std::string& key) {
  const auto pos = text.find(key + "=");
  if (pos == std::string::npos) return std::nan("");
  return std::stod(text.substr(pos + key.size() + 1));
}

LabeledGraph two_cliques(std::size_t a, std::size_t b) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < a + b; ++i) {
    for (std::size_t j = i + 1; j < a + b; ++j) {
      if ((i < a) == (j < a)) edges.push_back({Vertex(i), Vertex(j)});
    }
  }
  return LabeledGraph(a + b, std::move(edges));
}

}  // namespace

TEST_F(Cli, SampleSbmTwoCliques) {
  const auto r = run("--seed 7 sample sbm --pi 0.5,0.5 --B 1,0,0,1 --n 100");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("n=100 edges=", 0), 0u);
  const auto g = io::read_edge_list(path("out/sample.tsv").string());
  const auto side = read_json(path("out/sample.latents.json"));
  const auto s = side.at("species").get<std::vector<std::size_t>>();
  ASSERT_EQ(s.size(), 100u);
  for (std::size_t i = 0; i < 100; ++i) {
    for (std::size_t j = i + 1; j < 100; ++j) EXPECT_EQ(g.has_edge(Vertex(i), Vertex(j)), s[i] == s[j]);
  }
  EXPECT_EQ(side.at("seed").get<std::uint64_t>(), 7u);
  const auto meta = read_json(path("out/sample.meta.json"));
  EXPECT_EQ(meta.at("seed").get<std::uint64_t>(), 7u);
  EXPECT_EQ(meta.at("args").at("n").get<std::size_t>(), 100u);
}

TEST_F(Cli, SampleSparseFromGridMatchesBinomial) {
  write("w.json", R"({"k":2,"grid":[[0.2,0.6],[0.6,1.0]]})");
  const auto r = run("--seed 1 sample sparse --grid " + quoted("w.json") + " --n 1000 --rho 0.01");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto g = io::read_edge_list(path("out/sample.tsv").string());
  const auto x = read_json(path("out/sample.latents.json")).at("latents").get<std::vector<double>>();
  // binomial oracle given the latents
  double mean = 0, var = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double p = 0.01 * ((x[i] < 0.5) ? (x[j] < 0.5 ? 0.2 : 0.6) : (x[j] < 0.5 ? 0.6 : 1.0));
      mean += p;
      var += p * (1 - p);
    }
  }
  EXPECT_NEAR(double(g.edge_count()), mean, 4 * std::sqrt(var));
  // and the overall density sits near 0.01 * mean(grid) = 0.006
  EXPECT_NEAR(double(g.edge_count()) / (1000.0 * 999.0 / 2.0), 0.006, 0.001);
}

TEST_F(Cli, SampleGraphexHasNoIsolatedVertices) {
  const auto r = run("--seed 3 sample graphex --kernel exp --lambda 5 --T 4 --xmax 5");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto g = io::read_edge_list(path("out/sample.tsv").string());
  EXPECT_GT(g.size(), 0u);
  for (Vertex v = 0; v < g.size(); ++v) EXPECT_GT(g.degree(v), 0u);
  const auto side = read_json(path("out/sample.latents.json"));
  EXPECT_EQ(side.at("births").size(), g.size());
}

TEST_F(Cli, DistanceExamples) {
  io::write_edge_list(path("k4.tsv").string(), complete_graph(4));
  io::write_edge_list(path("e4.tsv").string(), LabeledGraph(4));
  auto r = run("distance " + quoted("k4.tsv") + " " + quoted("e4.tsv") + " --mode exact");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_DOUBLE_EQ(field(r.out, "distance"), 0.75);
  EXPECT_NE(r.out.find("mode=exact"), std::string::npos);
  EXPECT_DOUBLE_EQ(read_json(path("out/distance.json")).at("value").get<double>(), 0.75);

  r = run("distance " + quoted("k4.tsv") + " " + quoted("k4.tsv"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(field(r.out, "distance"), 0.0);
  EXPECT_NE(r.out.find("mode=heuristic"), std::string::npos);
}

TEST_F(Cli, ExactDistanceOverSizeCapExitsFour) {
  io::write_edge_list(path("a.tsv").string(), complete_graph(9));
  io::write_edge_list(path("b.tsv").string(), LabeledGraph(4));
  const auto r = run("distance " + quoted("a.tsv") + " " + quoted("b.tsv") + " --mode exact");
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.err.find("heuristic"), std::string::npos);
}

TEST_F(Cli, LabeledDistanceShrinksWithSize) {
  write("half.json", R"({"k":1,"grid":[[0.5]]})");
  double sums[2] = {0, 0};
  const std::size_t sizes[2] = {32, 64};
  for (int s = 0; s < 5; ++s) {
    for (int i = 0; i < 2; ++i) {
      const auto g = sample_dense(kernels::constant(0.5), sizes[i], 100 + s).graph;
      io::write_edge_list(path("g.tsv").string(), g);
      const auto r = run("--seed 1 distance --labeled " + quoted("g.tsv") + " " + quoted("half.json"));
      ASSERT_EQ(r.code, 0) << r.err;
      sums[i] += field(r.out, "distance");
    }
  }
  EXPECT_LT(sums[1], sums[0]);
}

TEST_F(Cli, EstimateHistogramTwoCliques) {
  io::write_edge_list(path("g.tsv").string(), two_cliques(50, 50));
  const auto r = run("estimate " + quoted("g.tsv") + " --method histogram --b 4");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto w = io::read_grid(path("out/estimate.w_hat.json").string());
  ASSERT_EQ(w.k(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(w.grid()(i, j), (i < 2) == (j < 2) ? 1.0 : 0.0);
  }
  // the same graphon as the 2x2 block grid [[1,0],[0,1]]
  EXPECT_NEAR(cut_distance_labeled(w, StepGraphon(Eigen::Matrix2d::Identity())), 0.0, 1e-12);
}

TEST_F(Cli, EstimateUsvtCompleteGraph) {
  io::write_edge_list(path("g.tsv").string(), complete_graph(30));
  const auto r = run("estimate " + quoted("g.tsv") + " --method usvt");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto p = io::read_matrix_csv(path("out/estimate.p_hat.csv").string());
  ASSERT_EQ(p.rows(), 30);
  for (Eigen::Index i = 0; i < 30; ++i) {
    for (Eigen::Index j = 0; j < 30; ++j) {
      if (i != j) EXPECT_NEAR(p(i, j), 1.0, 1e-12);
    }
  }
}

TEST_F(Cli, EstimateBlockmodelWithTruth) {
  ASSERT_EQ(run("--seed 11 sample sbm --pi 0.5,0.5 --B 0.8,0.1,0.1,0.8 --n 300", "data").code, 0);
  const auto r = run("--seed 2 estimate " + quoted("data/sample.tsv") + " --method blockmodel --k 2 --truth " +
                     quoted("data/sample.latents.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_LT(field(r.out, "mse"), 0.01);

  // the same value recomputed here from the written files
  const auto side = read_json(path("data/sample.latents.json"));
  const auto s = side.at("species").get<std::vector<std::size_t>>();
  Eigen::MatrixXd truth = Eigen::MatrixXd::Zero(300, 300);
  for (std::size_t i = 0; i < 300; ++i) {
    for (std::size_t j = 0; j < 300; ++j) {
      if (i != j) truth(Eigen::Index(i), Eigen::Index(j)) = s[i] == s[j] ? 0.8 : 0.1;
    }
  }
  const auto p = io::read_matrix_csv(path("out/estimate.p_hat.csv").string());
  double sum = 0;
  for (Eigen::Index i = 0; i < 300; ++i) {
    for (Eigen::Index j = i + 1; j < 300; ++j) sum += (p(i, j) - truth(i, j)) * (p(i, j) - truth(i, j));
  }
  EXPECT_NEAR(sum / (300.0 * 299.0 / 2.0), field(r.out, "mse"), 1e-12);
}

TEST_F(Cli, CompleteExactTwoBlock) {
  std::ostringstream obs;
  obs << "n=20\n";
  for (int i = 0; i < 20; ++i) {
    for (int j = i + 1; j < 20; ++j) obs << i << '\t' << j << '\t' << (((i < 10) == (j < 10)) ? 1 : 0) << '\n';
  }
  write("obs.tsv", obs.str());
  // The blocks share no edges, so cross-block pairs never overlap and the
  // automatic radius runs to the cap with a warning; the output is exact
  // either way.
  for (const std::string radius : {"", " --radius 2"}) {
    const auto r = run("complete " + quoted("obs.tsv") + radius);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(field(r.out, "fallback_pairs"), 0.0);
    EXPECT_EQ(field(r.out, "h"), 0.0);
    const auto p = io::read_matrix_csv(path("out/complete.csv").string());
    for (Eigen::Index i = 0; i < 20; ++i) {
      for (Eigen::Index j = 0; j < 20; ++j) {
        if (i != j) EXPECT_NEAR(p(i, j), ((i < 10) == (j < 10)) ? 1.0 : 0.0, 1e-12);
      }
    }
    const auto meta = read_json(path("out/complete.meta.json"));
    for (const char* key : {"r", "h", "q", "fallback_pairs", "warning"}) EXPECT_TRUE(meta.contains(key)) << key;
    EXPECT_EQ(meta.at("warning").get<bool>(), radius.empty());
  }
}

TEST_F(Cli, CompleteSinglePairWarnsAndIsUniform) {
  write("obs.tsv", "n=10\n0\t1\t1\n");
  const auto r = run("complete " + quoted("obs.tsv"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  const auto p = io::read_matrix_csv(path("out/complete.csv").string());
  for (Eigen::Index i = 0; i < 10; ++i) {
    for (Eigen::Index j = 0; j < 10; ++j) {
      if (i != j) EXPECT_EQ(p(i, j), p(0, 1));
    }
  }
  EXPECT_TRUE(read_json(path("out/complete.meta.json")).at("warning").get<bool>());
}

TEST_F(Cli, CompleteRejectsBadInput) {
  write("bip.tsv", "n=4\nbipartite=2,2\n0\t0\t1\n0\t1\t1\n1\t0\t0\n");
  auto r = run("complete " + quoted("bip.tsv") + " --radius 3");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("even"), std::string::npos) << r.err;

  write("empty.tsv", "n=5\n");
  r = run("complete " + quoted("empty.tsv"));
  EXPECT_EQ(r.code, 3);
  EXPECT_FALSE(r.err.empty());
}

TEST_F(Cli, SweepSingletonAndUsvtConsistency) {
  auto r = run("sweep consistency --kernel const:0.5 --method usvt --n-list 60 --seeds 2");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("monotone-decreasing: yes"), std::string::npos);
  auto csv = slurp(path("out/sweep.csv"));
  EXPECT_EQ(csv.rfind("n,rho,seed_count,mse_mean,mse_std\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);

  r = run("sweep consistency --kernel const:0.5 --method usvt --n-list 100,400 --seeds 3");
  ASSERT_EQ(r.code, 0) << r.err;
  csv = slurp(path("out/sweep.csv"));
  const auto last = csv.substr(csv.rfind('\n', csv.size() - 2) + 1);
  // columns: n, rho, seed_count, mse_mean, ...
  std::stringstream ss(last);
  std::string cell;
  for (int c = 0; c < 4; ++c) std::getline(ss, cell, ',');
  EXPECT_LT(std::stod(cell), 0.01);

  r = run("sweep completion --kernel product --n 60 --p-list 0.5 --seeds 1");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(path("out/sweep.csv")).rfind("p,seed_count,mse_complete,mse_usvt\n", 0), 0u);
}

TEST_F(Cli, ExitCodes) {
  io::write_edge_list(path("g.tsv").string(), complete_graph(5));
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("sample dense --n 5").code, 2);                          // no graphon source
  EXPECT_EQ(run("sample dense --kernel nope --n 5").code, 2);            // unknown kernel
  EXPECT_EQ(run("--format xml sample dense --kernel product --n 5").code, 2);
  EXPECT_EQ(run("estimate " + quoted("g.tsv") + " --method magic").code, 2);
  EXPECT_EQ(run("sweep consistency --kernel product --n-list 10,x").code, 2);
  EXPECT_EQ(run("estimate " + quoted("missing.tsv")).code, 3);
  write("bad.tsv", "not a graph\n");
  const auto r = run("estimate " + quoted("bad.tsv"));
  EXPECT_EQ(r.code, 3);
  EXPECT_FALSE(r.err.empty());
}

TEST_F(Cli, JsonFormat) {
  io::write_edge_list(path("g.tsv").string(), complete_graph(6));
  const auto r = run("--format json estimate " + quoted("g.tsv") + " --method usvt");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = read_json(path("out/estimate.p_hat.json"));
  EXPECT_EQ(j.at("n").get<int>(), 6);
  EXPECT_NEAR(j.at("matrix").at(0).at(1).get<double>(), 1.0, 1e-12);
}

TEST_F(Cli, RerunsAreByteIdentical) {
  const std::vector<std::string> cmds = {
      "--seed 5 sample dense --kernel product --n 80",
      "--seed 5 sample graphex --kernel exp --lambda 2 --T 4 --xmax 5 --name gx",
  };
  for (const auto& sub : {"a", "b"}) {
    for (const auto& c : cmds) ASSERT_EQ(run(c, sub).code, 0);
    // identical argument vectors, so both runs read the same input file
    const auto g = path("a/sample.tsv").string();
    ASSERT_EQ(run("--seed 5 estimate \"" + g + "\" --method blockmodel --k 2", sub).code, 0);
    ASSERT_EQ(run("--seed 5 distance --labeled \"" + g + "\" \"" + g + "\"", sub).code, 0);
  }
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(path("a"))) {
    const auto other = path("b") / entry.path().filename();
    ASSERT_TRUE(fs::exists(other)) << other;
    EXPECT_EQ(slurp(entry.path()), slurp(other)) << entry.path().filename();
    ++compared;
  }
  EXPECT_GE(compared, 9u);
}
