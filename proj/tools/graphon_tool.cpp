// graphon_tool: sampling, cut distance, densities, estimation, completion and
// sweeps from the command line. Every run writes its outputs plus a
// <name>.meta.json record with the resolved arguments, so reruns with the same
// arguments reproduce all files byte for byte.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <variant>

#include "graphon/graphon.hpp"

namespace fs = std::filesystem;
using graphon::io::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitSize = 4;

struct Globals {
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::string format = "csv";
};

using AnyGraphon = std::variant<graphon::StepGraphon, graphon::KernelGraphon>;

// Where a graphon comes from: a named kernel or a grid file.
struct GraphonSource {
  std::string kernel;
  std::string grid;
  double domain = 1.0;

  void add_options(CLI::App* cmd) {
    cmd->add_option("--kernel", kernel, "named kernel: const:<c>, product, halfplane, halfgraph, expdecay, invquarter");
    cmd->add_option("--grid", grid, "step graphon JSON file");
  }

  bool given() const { return !kernel.empty() || !grid.empty(); }

  AnyGraphon load() const {
    if (!kernel.empty() && !grid.empty()) throw graphon::InvalidParameter("give either --kernel or --grid, not both");
    if (!grid.empty()) return graphon::io::read_grid(grid);
    if (!kernel.empty()) return graphon::kernels::by_name(kernel, domain);
    throw graphon::InvalidParameter("a graphon is required (--kernel or --grid)");
  }

  // Self-contained description: grids are embedded so the record does not
  // depend on the file staying around.
  json describe() const {
    if (!grid.empty()) return json{{"grid", graphon::io::grid_to_json(graphon::io::read_grid(grid))}};
    return json{{"kernel", kernel}, {"domain", domain}};
  }
};

AnyGraphon graphon_from_json(const json& j) {
  if (j.contains("grid")) return graphon::io::grid_from_json(j.at("grid"));
  return graphon::kernels::by_name(j.at("kernel").get<std::string>(), j.value("domain", 1.0));
}

std::string out_path(const Globals& g, const std::string& file) {
  fs::create_directories(g.out_dir);
  return (fs::path(g.out_dir) / file).string();
}

void write_meta(const Globals& g, const std::string& name, const std::string& command, json args,
                const std::vector<std::string>& outputs, json extra = json::object()) {
  json meta{{"command", command}, {"args", std::move(args)}, {"seed", g.seed}, {"format", g.format},
            {"outputs", outputs}};
  for (auto& [k, v] : extra.items()) meta[k] = v;
  graphon::io::write_json(out_path(g, name + ".meta.json"), meta);
}

// Tabular output in the selected format; returns the file name.
std::string write_matrix(const Globals& g, const std::string& stem, const Eigen::MatrixXd& m) {
  if (g.format == "json") {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
      rows.push_back(std::move(row));
    }
    graphon::io::write_json(out_path(g, stem + ".json"), json{{"n", m.rows()}, {"matrix", std::move(rows)}});
    return stem + ".json";
  }
  graphon::io::write_matrix_csv(out_path(g, stem + ".csv"), m);
  return stem + ".csv";
}

std::vector<double> parse_doubles(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw graphon::InvalidParameter("bad number '" + item + "' in " + what);
    }
    if (used != item.size()) throw graphon::InvalidParameter("bad number '" + item + "' in " + what);
    out.push_back(v);
  }
  if (out.empty()) throw graphon::InvalidParameter(what + " is empty");
  return out;
}

std::vector<std::size_t> parse_sizes(const std::string& text, const std::string& what) {
  std::vector<std::size_t> out;
  for (double v : parse_doubles(text, what)) {
    if (v < 1 || v != std::floor(v)) throw graphon::InvalidParameter(what + " needs positive integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

bool strictly_decreasing(const std::vector<double>& xs) {
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] < xs[i - 1])) return false;
  }
  return true;
}

// Edge list, or a grid when the file ends in .json.
bool is_grid_file(const std::string& path) { return fs::path(path).extension() == ".json"; }

// Probability matrix implied by a sample sidecar (model + latents).
graphon::ProbMatrix truth_from_sidecar(const json& side) {
  const auto& model = side.at("model");
  const auto kind = model.at("kind").get<std::string>();
  const auto x = side.at("latents").get<std::vector<double>>();
  const auto n = Eigen::Index(x.size());
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  if (kind == "sbm") {
    const auto s = side.at("species").get<std::vector<std::size_t>>();
    const auto b = model.at("B").get<std::vector<std::vector<double>>>();
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i != j) p(i, j) = b.at(s[std::size_t(i)]).at(s[std::size_t(j)]);
      }
    }
    return graphon::ProbMatrix(std::move(p));
  }
  const auto w = graphon_from_json(model.at("graphon"));
  const double rho = model.value("rho", 1.0);
  std::visit(
      [&](const auto& wv) {
        for (Eigen::Index i = 0; i < n; ++i) {
          for (Eigen::Index j = i + 1; j < n; ++j) {
            p(i, j) = p(j, i) = graphon::detail::clip_probability(rho * wv.value(x[std::size_t(i)], x[std::size_t(j)]));
          }
        }
      },
      w);
  return graphon::ProbMatrix(std::move(p));
}

// ---------------------------------------------------------------------------

struct SampleArgs {
  std::string model;
  GraphonSource source;
  std::size_t n = 0;
  double rho = 1.0;
  std::string pi, b;
  double lambda = 1.0, time = 1.0, x_max = 1.0;
  std::string name = "sample";
};

int run_sample(const Globals& g, SampleArgs& a) {
  graphon::SampleTrace trace;
  json model{{"kind", a.model}};
  json args{{"model", a.model}, {"name", a.name}};
  if (a.model == "sbm") {
    const auto pi = parse_doubles(a.pi, "--pi");
    const auto flat = parse_doubles(a.b, "--B");
    const auto k = pi.size();
    if (flat.size() != k * k) throw graphon::InvalidParameter("--B needs k*k entries for k = " + std::to_string(k));
    Eigen::MatrixXd bm(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    std::vector<std::vector<double>> rows(k, std::vector<double>(k));
    for (std::size_t r = 0; r < k; ++r) {
      for (std::size_t c = 0; c < k; ++c) bm(Eigen::Index(r), Eigen::Index(c)) = rows[r][c] = flat[r * k + c];
    }
    if (a.n < 1) throw graphon::InvalidParameter("--n must be >= 1");
    trace = graphon::sample_sbm(graphon::BlockModel(pi, bm), a.n, g.seed);
    model["pi"] = pi;
    model["B"] = rows;
    args["n"] = a.n;
  } else {
    if (a.model == "graphex") a.source.domain = a.x_max;
    const auto w = a.source.load();
    model["graphon"] = a.source.describe();
    std::visit(
        [&](const auto& wv) {
          if (a.model == "dense") {
            trace = graphon::sample_dense(wv, a.n, g.seed);
          } else if (a.model == "sparse") {
            trace = graphon::sample_sparse(wv, a.n, a.rho, g.seed);
            model["rho"] = a.rho;
          } else {
            trace = graphon::sample_graphex(wv, {a.lambda, a.time, a.x_max}, g.seed);
            model["lambda"] = a.lambda;
            model["T"] = a.time;
            model["x_max"] = a.x_max;
          }
        },
        w);
    if (a.model != "graphex") args["n"] = a.n;
  }
  args["graphon_model"] = model;

  const auto edges_file = a.name + ".tsv", latents_file = a.name + ".latents.json";
  graphon::io::write_edge_list(out_path(g, edges_file), trace.graph);
  graphon::io::write_json(out_path(g, latents_file), graphon::io::sample_sidecar(trace, g.seed, model));
  write_meta(g, a.name, "sample", args, {edges_file, latents_file});
  std::cout << "n=" << trace.graph.size() << " edges=" << trace.graph.edge_count()
            << " density=" << graphon::io::format_double(graphon::edge_density(trace.graph)) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------

struct DistanceArgs {
  std::vector<std::string> files;
  std::string mode = "heuristic";
  bool labeled = false;
  std::size_t restarts = 50;
  std::string name = "distance";
};

int run_distance(const Globals& g, const DistanceArgs& a) {
  const bool exact = a.mode == "exact";
  json report{{"mode", a.mode}, {"labeled", a.labeled}};
  const bool any_grid = is_grid_file(a.files[0]) || is_grid_file(a.files[1]);
  if (!a.labeled && any_grid) throw graphon::InvalidParameter("grid inputs need --labeled");

  if (a.labeled) {
    auto load = [](const std::string& f) {
      return is_grid_file(f) ? graphon::io::read_grid(f) : graphon::empirical_graphon(graphon::io::read_edge_list(f));
    };
    const auto w1 = load(a.files[0]), w2 = load(a.files[1]);
    const auto r = graphon::cut_distance_labeled_report(w1, w2, {a.restarts, g.seed});
    if (exact && !r.exact) {
      throw graphon::SizeLimitError("exact labeled distance needs a common refinement of at most " +
                                    std::to_string(graphon::kExactCutLimit) +
                                    " parts; rerun with --mode heuristic");
    }
    report["value"] = r.value;
    report["exact"] = r.exact;
    report["cut"] = graphon::io::cut_result_to_json(r);
    std::cout << "distance=" << graphon::io::format_double(r.value) << " mode=" << (r.exact ? "exact" : "heuristic")
              << " |S|=" << r.witness_s.size() << " |T|=" << r.witness_t.size() << '\n';
  } else {
    const auto g1 = graphon::io::read_edge_list(a.files[0]);
    const auto g2 = graphon::io::read_edge_list(a.files[1]);
    const auto r = graphon::cut_distance_report(g1, g2, exact ? graphon::CutMode::kExact : graphon::CutMode::kHeuristic,
                                                g.seed);
    report["value"] = r.value;
    report["exact"] = r.exact;
    report["size"] = r.size;
    report["alignment"] = r.alignment;
    report["cut"] = graphon::io::cut_result_to_json(r.cut);
    std::cout << "distance=" << graphon::io::format_double(r.value) << " mode=" << (r.exact ? "exact" : "heuristic")
              << " size=" << r.size << " |S|=" << r.cut.witness_s.size() << " |T|=" << r.cut.witness_t.size() << '\n';
  }
  const auto file = a.name + ".json";
  graphon::io::write_json(out_path(g, file), report);
  write_meta(g, a.name, "distance",
             json{{"files", a.files}, {"mode", a.mode}, {"labeled", a.labeled}, {"restarts", a.restarts}}, {file});
  return 0;
}

// ---------------------------------------------------------------------------

struct DensityArgs {
  std::string file;
  GraphonSource source;
  std::size_t k = 64;
  std::string motif = "triangle";
  std::size_t samples = 100000;
  std::string name = "density";
};

int run_density(const Globals& g, const DensityArgs& a) {
  const auto f = graphon::Motif::by_name(a.motif);
  json report{{"motif", a.motif}};
  if (!a.file.empty() && a.source.given()) throw graphon::InvalidParameter("give a file or a graphon, not both");
  if (!a.file.empty() && !is_grid_file(a.file)) {
    const auto graph = graphon::io::read_edge_list(a.file);
    const double t = graphon::subgraph_density_empirical(graph, f, a.samples, g.seed);
    report["source"] = "graph";
    report["hom_density"] = t;
    std::cout << "t(" << a.motif << ")=" << graphon::io::format_double(t);
    if (f.is_triangle()) {
      const double inj = graphon::triangle_density_injective(graph);
      report["injective_density"] = inj;
      std::cout << " injective=" << graphon::io::format_double(inj);
    }
    std::cout << '\n';
  } else {
    graphon::StepGraphon w = !a.file.empty() ? graphon::io::read_grid(a.file)
                                             : std::visit(
                                                   [&](const auto& wv) -> graphon::StepGraphon {
                                                     if constexpr (std::is_same_v<std::decay_t<decltype(wv)>, graphon::StepGraphon>) {
                                                       return wv;
                                                     } else {
                                                       return graphon::kernels::discretize(wv, a.k);
                                                     }
                                                   },
                                                   a.source.load());
    const double t = graphon::hom_density(f, w);
    report["source"] = "graphon";
    report["k"] = w.k();
    report["hom_density"] = t;
    std::cout << "t(" << a.motif << ")=" << graphon::io::format_double(t) << " k=" << w.k() << '\n';
  }
  const auto file = a.name + ".json";
  graphon::io::write_json(out_path(g, file), report);
  json args{{"motif", a.motif}, {"samples", a.samples}, {"k", a.k}};
  if (!a.file.empty()) args["file"] = a.file;
  if (a.source.given()) args["graphon"] = a.source.describe();
  write_meta(g, a.name, "density", args, {file});
  return 0;
}

// ---------------------------------------------------------------------------

struct EstimateArgs {
  std::string file;
  std::string method = "histogram";
  std::size_t b = 0;  // 0 = default bandwidth
  std::size_t k = 2;
  std::size_t iters = 50;
  std::size_t restarts = 0;
  double eta = 0.01;
  std::string truth;
  std::string name = "estimate";
};

int run_estimate(const Globals& g, const EstimateArgs& a) {
  const auto graph = graphon::io::read_edge_list(a.file);
  const auto method = graphon::parse_method(a.method);
  graphon::EstimationReport r;
  json args{{"file", a.file}, {"method", a.method}};
  switch (method) {
    case graphon::Method::kHistogram: {
      const auto b = a.b == 0 ? graphon::default_bandwidth(graph.size()) : a.b;
      r = graphon::estimate_histogram(graph, b);
      args["b"] = b;
      break;
    }
    case graphon::Method::kBlockmodel:
      r = graphon::estimate_blockmodel(graph, a.k, g.seed, {a.iters, a.restarts});
      args["k"] = a.k;
      args["iters"] = a.iters;
      args["restarts"] = a.restarts;
      break;
    case graphon::Method::kUsvt:
      r = graphon::estimate_usvt(graph, a.eta);
      args["eta"] = a.eta;
      break;
  }
  json extra{{"method", r.method}};
  if (!a.truth.empty()) {
    args["truth"] = a.truth;
    json side;
    auto in = graphon::io::open_input(a.truth);
    try {
      in >> side;
      r.mse = graphon::mse_vs_truth(r.p_hat, truth_from_sidecar(side));
    } catch (const json::exception& e) {
      throw graphon::LoadError("bad truth sidecar '" + a.truth + "': " + e.what());
    } catch (const graphon::InvalidParameter& e) {
      throw graphon::LoadError("truth sidecar does not match the graph: " + std::string(e.what()));
    }
    extra["mse"] = *r.mse;
  }
  std::vector<std::string> outputs{write_matrix(g, a.name + ".p_hat", r.p_hat.matrix())};
  if (r.w_hat) {
    outputs.push_back(a.name + ".w_hat.json");
    graphon::io::write_json(out_path(g, outputs.back()), graphon::io::grid_to_json(*r.w_hat));
    extra["proportions"] = r.proportions;
  }
  if (!r.objective_trace.empty()) extra["objective_trace"] = r.objective_trace;
  write_meta(g, a.name, "estimate", args, outputs, extra);

  std::cout << "method=" << r.method << " n=" << graph.size();
  if (r.w_hat) std::cout << " blocks=" << r.w_hat->k();
  std::cout << '\n';
  if (r.mse) std::cout << "mse=" << graphon::io::format_double(*r.mse) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------

struct CompleteArgs {
  std::string file;
  double q = 0.2;
  int radius = 0;  // 0 = automatic
  std::size_t min_overlap = 5;
  std::string name = "complete";
};

int run_complete(const Globals& g, const CompleteArgs& a) {
  const auto obs = graphon::io::read_observations(a.file);
  graphon::CompletionConfig cfg;
  if (a.radius > 0) cfg.radius = a.radius;
  cfg.quantile = a.q;
  cfg.min_overlap = a.min_overlap;
  cfg.seed = g.seed;
  const auto r = graphon::complete(obs, cfg);
  const auto matrix_file = write_matrix(g, a.name, r.p_hat.matrix());
  json args{{"file", a.file}, {"q", a.q}, {"radius", a.radius == 0 ? json("auto") : json(a.radius)},
            {"min_overlap", a.min_overlap}};
  write_meta(g, a.name, "complete", args, {matrix_file},
             json{{"r", r.radius}, {"h", r.threshold}, {"q", r.quantile}, {"fallback_pairs", r.fallback_pairs},
                  {"warning", r.warning}});
  std::cout << "r=" << r.radius << " h=" << graphon::io::format_double(r.threshold)
            << " fallback_pairs=" << r.fallback_pairs << '\n';
  if (r.warning) {
    std::cerr << "warning: no radius up to the cap reached the overlap target; "
                 "the observations are likely too sparse for reliable completion\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct SweepArgs {
  std::string kind;
  GraphonSource source;
  std::string n_list = "100,200,400,800";
  std::string rho_rule = "const:1";
  std::string method = "histogram";
  std::size_t b = 0;
  std::size_t k = 2;
  std::size_t n = 500;
  std::string p_list = "0.05,0.1,0.2,0.4";
  double q = 0.2;
  int radius = 0;
  std::size_t min_overlap = 5;
  double eta = 0.01;
  std::size_t seeds = 10;
  std::string name = "sweep";
};

int run_sweep(const Globals& g, const SweepArgs& a) {
  const auto w = a.source.load();
  json args{{"kind", a.kind}, {"graphon", a.source.describe()}, {"seeds", a.seeds}};
  std::vector<std::string> header;
  std::vector<std::vector<double>> table;
  std::vector<double> trend;

  if (a.kind == "consistency") {
    const auto ns = parse_sizes(a.n_list, "--n-list");
    graphon::ConsistencyConfig cfg;
    cfg.method = graphon::parse_method(a.method);
    cfg.seeds = a.seeds;
    cfg.base_seed = g.seed;
    cfg.eta = a.eta;
    if (cfg.method == graphon::Method::kBlockmodel) {
      const auto k = a.k;
      cfg.blocks = [k](std::size_t) { return k; };
    } else if (a.b > 0) {
      const auto b = a.b;
      cfg.blocks = [b](std::size_t) { return b; };
    }
    const auto rule = graphon::DensityRule::parse(a.rho_rule);
    const auto rows = std::visit([&](const auto& wv) { return graphon::consistency_sweep(wv, ns, rule, cfg); }, w);
    header = {"n", "rho", "seed_count", "mse_mean", "mse_std"};
    for (const auto& r : rows) {
      table.push_back({double(r.n), r.rho, double(r.seed_count), r.mse_mean, r.mse_std});
      trend.push_back(r.mse_mean);
    }
    args["n_list"] = ns;
    args["rho_rule"] = a.rho_rule;
    args["method"] = a.method;
    if (cfg.method == graphon::Method::kBlockmodel) args["k"] = a.k;
    if (cfg.method == graphon::Method::kHistogram) args["b"] = a.b == 0 ? json("default") : json(a.b);
    if (cfg.method == graphon::Method::kUsvt) args["eta"] = a.eta;
  } else {
    const auto ps = parse_doubles(a.p_list, "--p-list");
    graphon::CompletionConfig cfg;
    if (a.radius > 0) cfg.radius = a.radius;
    cfg.quantile = a.q;
    cfg.min_overlap = a.min_overlap;
    cfg.seed = g.seed;
    const auto rows = std::visit(
        [&](const auto& wv) { return graphon::completion_sweep(wv, a.n, ps, cfg, a.seeds, g.seed, a.eta); }, w);
    header = {"p", "seed_count", "mse_complete", "mse_usvt"};
    for (const auto& r : rows) {
      table.push_back({r.p, double(r.seed_count), r.mse_complete, r.mse_usvt});
      trend.push_back(r.mse_complete);
    }
    args["n"] = a.n;
    args["p_list"] = ps;
    args["q"] = a.q;
    args["radius"] = a.radius == 0 ? json("auto") : json(a.radius);
    args["min_overlap"] = a.min_overlap;
    args["eta"] = a.eta;
  }

  std::string file;
  if (g.format == "json") {
    json rows = json::array();
    for (const auto& row : table) {
      json obj;
      for (std::size_t c = 0; c < header.size(); ++c) obj[header[c]] = row[c];
      rows.push_back(std::move(obj));
    }
    file = a.name + ".json";
    graphon::io::write_json(out_path(g, file), json{{"rows", std::move(rows)}});
  } else {
    file = a.name + ".csv";
    auto out = graphon::io::open_output(out_path(g, file));
    for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    out << '\n';
    for (const auto& row : table) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        out << (c ? "," : "");
        // integer columns print as integers
        if (header[c] == "n" || header[c] == "seed_count") {
          out << static_cast<std::size_t>(row[c]);
        } else {
          out << graphon::io::format_double(row[c]);
        }
      }
      out << '\n';
    }
  }
  const bool decreasing = strictly_decreasing(trend);
  write_meta(g, a.name, "sweep", args, {file}, json{{"monotone_decreasing", decreasing}});

  for (std::size_t c = 0; c < header.size(); ++c) std::cout << (c ? "," : "") << header[c];
  std::cout << '\n';
  for (const auto& row : table) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::cout << (c ? "," : "");
      if (header[c] == "n" || header[c] == "seed_count") {
        std::cout << static_cast<std::size_t>(row[c]);
      } else {
        std::cout << graphon::io::format_double(row[c]);
      }
    }
    std::cout << '\n';
  }
  std::cout << "monotone-decreasing: " << (decreasing ? "yes" : "no") << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graphon toolkit: sampling, cut metric, estimation and completion"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "base random seed")->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "directory for output files")->capture_default_str();
  app.add_option("--format", g.format, "tabular output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  SampleArgs sa;
  auto* sample = app.add_subcommand("sample", "draw a random graph (dense, sparse, sbm, graphex)");
  sample->add_option("model", sa.model, "dense | sparse | sbm | graphex")
      ->required()
      ->check(CLI::IsMember({"dense", "sparse", "sbm", "graphex"}));
  sa.source.add_options(sample);
  sample->add_option("--n", sa.n, "number of vertices");
  sample->add_option("--rho", sa.rho, "target density scale (sparse)");
  sample->add_option("--pi", sa.pi, "species proportions, comma separated (sbm)");
  sample->add_option("--B", sa.b, "block matrix, row-major, comma separated (sbm)");
  sample->add_option("--lambda", sa.lambda, "Poisson intensity (graphex)");
  sample->add_option("--T", sa.time, "snapshot time (graphex)");
  sample->add_option("--xmax", sa.x_max, "feature truncation (graphex)");
  sample->add_option("--name", sa.name, "output file stem")->capture_default_str();

  DistanceArgs da;
  auto* distance = app.add_subcommand("distance", "cut distance between two graphs or grids");
  distance->add_option("files", da.files, "two edge lists or grid .json files")->required()->expected(2);
  distance->add_option("--mode", da.mode, "exact | heuristic")
      ->check(CLI::IsMember({"exact", "heuristic"}))
      ->capture_default_str();
  distance->add_flag("--labeled", da.labeled, "compare as labeled graphons (no relabeling)");
  distance->add_option("--restarts", da.restarts, "heuristic cut-norm restarts (labeled)")->capture_default_str();
  distance->add_option("--name", da.name, "output file stem")->capture_default_str();

  DensityArgs dd;
  auto* density = app.add_subcommand("density", "homomorphism density of a motif");
  density->add_option("file", dd.file, "edge list or grid .json file");
  dd.source.add_options(density);
  density->add_option("--k", dd.k, "discretization for named kernels")->capture_default_str();
  density->add_option("--motif", dd.motif, "edge | triangle | clique:n | path:n | cycle:n | star:n")->capture_default_str();
  density->add_option("--samples", dd.samples, "Monte Carlo samples for larger motifs on graphs")->capture_default_str();
  density->add_option("--name", dd.name, "output file stem")->capture_default_str();

  EstimateArgs ea;
  auto* estimate = app.add_subcommand("estimate", "estimate edge probabilities from one graph");
  estimate->add_option("file", ea.file, "edge list")->required();
  estimate->add_option("--method", ea.method, "histogram | blockmodel | usvt")->capture_default_str();
  estimate->add_option("--b", ea.b, "histogram groups (default ceil(n^(1/3)))");
  estimate->add_option("--k", ea.k, "blockmodel blocks")->capture_default_str();
  estimate->add_option("--iters", ea.iters, "blockmodel iterations")->capture_default_str();
  estimate->add_option("--restarts", ea.restarts, "blockmodel random restarts")->capture_default_str();
  estimate->add_option("--eta", ea.eta, "USVT threshold slack")->capture_default_str();
  estimate->add_option("--truth", ea.truth, "latents sidecar written by 'sample'");
  estimate->add_option("--name", ea.name, "output file stem")->capture_default_str();

  CompleteArgs ca;
  auto* comp = app.add_subcommand("complete", "complete a partially observed network");
  comp->add_option("file", ca.file, "observation triplet file")->required();
  comp->add_option("--q", ca.q, "neighborhood quantile")->capture_default_str();
  comp->add_option("--radius", ca.radius, "path radius (default: automatic)");
  comp->add_option("--min-overlap", ca.min_overlap, "overlap target for automatic radius")->capture_default_str();
  comp->add_option("--name", ca.name, "output file stem")->capture_default_str();

  SweepArgs wa;
  auto* sweep = app.add_subcommand("sweep", "consistency or completion error sweep");
  sweep->add_option("kind", wa.kind, "consistency | completion")
      ->required()
      ->check(CLI::IsMember({"consistency", "completion"}));
  wa.source.add_options(sweep);
  sweep->add_option("--n-list", wa.n_list, "sizes, ascending (consistency)")->capture_default_str();
  sweep->add_option("--rho-rule", wa.rho_rule, "const:<c> | logn:<c> (consistency)")->capture_default_str();
  sweep->add_option("--method", wa.method, "histogram | blockmodel | usvt (consistency)")->capture_default_str();
  sweep->add_option("--b", wa.b, "fixed histogram groups (default ceil(n^(1/3)))");
  sweep->add_option("--k", wa.k, "blockmodel blocks")->capture_default_str();
  sweep->add_option("--n", wa.n, "vertices (completion)")->capture_default_str();
  sweep->add_option("--p-list", wa.p_list, "observation densities, ascending (completion)")->capture_default_str();
  sweep->add_option("--q", wa.q, "neighborhood quantile (completion)")->capture_default_str();
  sweep->add_option("--radius", wa.radius, "path radius (completion, default automatic)");
  sweep->add_option("--min-overlap", wa.min_overlap, "overlap target (completion)")->capture_default_str();
  sweep->add_option("--eta", wa.eta, "USVT threshold slack")->capture_default_str();
  sweep->add_option("--seeds", wa.seeds, "replicates per row")->capture_default_str();
  sweep->add_option("--name", wa.name, "output file stem")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*sample) return run_sample(g, sa);
    if (*distance) return run_distance(g, da);
    if (*density) return run_density(g, dd);
    if (*estimate) return run_estimate(g, ea);
    if (*comp) return run_complete(g, ca);
    if (*sweep) return run_sweep(g, wa);
  } catch (const graphon::SizeLimitError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSize;
  } catch (const graphon::InvalidParameter& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const graphon::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
