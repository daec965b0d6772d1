#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "graphon/completion.hpp"
#include "graphon/core.hpp"
#include "graphon/cutmetric.hpp"
#include "graphon/samplers.hpp"

namespace graphon::io {

using json = nlohmann::json;

// Fixed 17-significant-digit rendering used by every CSV writer.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open '" + path + "'");
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write '" + path + "'");
  return out;
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::size_t parse_count(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    throw LoadError("bad " + what + " '" + text + "'");
  }
  if (used != text.size() || v < 0) throw LoadError("bad " + what + " '" + text + "'");
  return static_cast<std::size_t>(v);
}

// Splits on tabs or spaces.
inline std::vector<std::string> fields(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string f;
  while (ss >> f) out.push_back(f);
  return out;
}

// First non-blank line must be "n=<count>".
inline std::size_t read_header(std::istream& in, std::size_t& line_no) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    if (t.rfind("n=", 0) != 0) throw LoadError("line " + std::to_string(line_no) + ": expected 'n=<count>' header");
    return parse_count(t.substr(2), "vertex count");
  }
  throw LoadError("missing 'n=<count>' header");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Edge lists: "n=<count>" header, then one "u<TAB>v" line per edge.

inline LabeledGraph read_edge_list(std::istream& in) {
  std::size_t line_no = 0;
  const std::size_t n = detail::read_header(in, line_no);
  std::vector<Edge> edges;
  std::string line;
  std::vector<std::vector<char>> seen;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = detail::trim(line);
    if (t.empty()) continue;
    const auto f = detail::fields(t);
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (f.size() != 2) throw LoadError(where + "expected 'u<TAB>v'");
    const auto u = detail::parse_count(f[0], "vertex id");
    const auto v = detail::parse_count(f[1], "vertex id");
    if (u >= n || v >= n) throw LoadError(where + "vertex id out of range for n=" + std::to_string(n));
    if (u == v) throw LoadError(where + "self-loop");
    edges.push_back({Vertex(std::min(u, v)), Vertex(std::max(u, v))});
  }
  std::vector<Edge> sorted = edges;
  std::sort(sorted.begin(), sorted.end());
  if (auto dup = std::adjacent_find(sorted.begin(), sorted.end()); dup != sorted.end()) {
    throw LoadError("duplicate edge {" + std::to_string(dup->u) + "," + std::to_string(dup->v) + "}");
  }
  return LabeledGraph(n, std::move(edges));
}

inline LabeledGraph read_edge_list(const std::string& path) {
  auto in = open_input(path);
  return read_edge_list(in);
}

inline void write_edge_list(std::ostream& out, const LabeledGraph& g) {
  out << "n=" << g.size() << '\n';
  for (const auto& e : g.edges()) out << e.u << '\t' << e.v << '\n';
}

inline void write_edge_list(const std::string& path, const LabeledGraph& g) {
  auto out = open_output(path);
  write_edge_list(out, g);
}

// ---------------------------------------------------------------------------
// Graphon grids: {"k": int, "scale": float, "grid": [[...], ...]}

inline json grid_to_json(const StepGraphon& w) {
  json grid = json::array();
  for (Eigen::Index a = 0; a < w.grid().rows(); ++a) {
    json row = json::array();
    for (Eigen::Index b = 0; b < w.grid().cols(); ++b) row.push_back(w.grid()(a, b));
    grid.push_back(std::move(row));
  }
  return json{{"k", w.k()}, {"scale", w.scale()}, {"grid", std::move(grid)}};
}

// Symmetry is verified to 1e-12 and then made exact.
inline StepGraphon grid_from_json(const json& j) {
  try {
    const auto k = j.at("k").get<std::size_t>();
    const auto scale = j.contains("scale") ? j.at("scale").get<double>() : 1.0;
    const auto& rows = j.at("grid");
    if (k == 0 || rows.size() != k) throw LoadError("grid has " + std::to_string(rows.size()) + " rows, k=" + std::to_string(k));
    const auto kk = Eigen::Index(k);
    Eigen::MatrixXd m(kk, kk);
    for (Eigen::Index a = 0; a < kk; ++a) {
      const auto& row = rows.at(std::size_t(a));
      if (row.size() != k) throw LoadError("grid row " + std::to_string(a) + " has wrong length");
      for (Eigen::Index b = 0; b < kk; ++b) m(a, b) = row.at(std::size_t(b)).get<double>();
    }
    for (Eigen::Index a = 0; a < kk; ++a) {
      for (Eigen::Index b = a + 1; b < kk; ++b) {
        if (std::abs(m(a, b) - m(b, a)) > 1e-12) {
          throw LoadError("grid not symmetric at (" + std::to_string(a) + "," + std::to_string(b) + ")");
        }
        m(a, b) = m(b, a) = 0.5 * (m(a, b) + m(b, a));
      }
    }
    return StepGraphon(std::move(m), scale);
  } catch (const json::exception& e) {
    throw LoadError(std::string("malformed grid JSON: ") + e.what());
  } catch (const InvalidParameter& e) {
    throw LoadError(std::string("invalid grid: ") + e.what());
  }
}

inline StepGraphon read_grid(const std::string& path) {
  auto in = open_input(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw LoadError("'" + path + "' is not valid JSON: " + e.what());
  }
  return grid_from_json(j);
}

inline void write_json(const std::string& path, const json& j) {
  auto out = open_output(path);
  out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Dense matrices: header "n=<n>", then n comma-separated rows.

inline void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m) {
  out << "n=" << m.rows() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

inline void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
  auto out = open_output(path);
  write_matrix_csv(out, m);
}

inline Eigen::MatrixXd read_matrix_csv(std::istream& in) {
  std::size_t line_no = 0;
  const auto n = Eigen::Index(detail::read_header(in, line_no));
  Eigen::MatrixXd m(n, n);
  std::string line;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw LoadError("matrix CSV ends after " + std::to_string(i) + " rows");
    std::istringstream ss(line);
    std::string cell;
    Eigen::Index j = 0;
    while (std::getline(ss, cell, ',')) {
      if (j >= n) throw LoadError("matrix CSV row " + std::to_string(i) + " too long");
      try {
        m(i, j++) = std::stod(cell);
      } catch (const std::exception&) {
        throw LoadError("bad number '" + cell + "' in matrix CSV");
      }
    }
    if (j != n) throw LoadError("matrix CSV row " + std::to_string(i) + " too short");
  }
  return m;
}

inline Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  auto in = open_input(path);
  return read_matrix_csv(in);
}

// ---------------------------------------------------------------------------
// Observation triplets: "n=<n>", optional "bipartite=<rows>,<cols>", then
// "u<TAB>v<TAB>{0|1}". For bipartite files v is a column id in 0..cols-1.

inline ObservedNetwork read_observations(std::istream& in) {
  std::size_t line_no = 0;
  const std::size_t n = detail::read_header(in, line_no);
  std::optional<Bipartition> bip;
  std::vector<Observation> obs;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = detail::trim(line);
    if (t.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (first && t.rfind("bipartite=", 0) == 0) {
      const auto body = t.substr(10);
      const auto comma = body.find(',');
      if (comma == std::string::npos) throw LoadError(where + "expected 'bipartite=<rows>,<cols>'");
      bip = Bipartition{detail::parse_count(body.substr(0, comma), "row count"),
                        detail::parse_count(body.substr(comma + 1), "column count")};
      if (bip->rows + bip->cols != n) throw LoadError(where + "rows + cols must equal n");
      first = false;
      continue;
    }
    first = false;
    const auto f = detail::fields(t);
    if (f.size() != 3) throw LoadError(where + "expected 'u<TAB>v<TAB>{0|1}'");
    auto u = detail::parse_count(f[0], "vertex id");
    auto v = detail::parse_count(f[1], "vertex id");
    if (f[2] != "0" && f[2] != "1") throw LoadError(where + "value must be 0 or 1");
    if (bip) {
      if (u >= bip->rows || v >= bip->cols) throw LoadError(where + "row/column id out of range");
      v += bip->rows;
    }
    if (u >= n || v >= n) throw LoadError(where + "vertex id out of range");
    if (u == v) throw LoadError(where + "diagonal pair");
    obs.push_back({Vertex(u), Vertex(v), f[2] == "1"});
  }
  try {
    return ObservedNetwork(n, obs, bip);
  } catch (const InvalidParameter& e) {
    throw LoadError(e.what());
  }
}

inline ObservedNetwork read_observations(const std::string& path) {
  auto in = open_input(path);
  return read_observations(in);
}

inline void write_observations(std::ostream& out, const ObservedNetwork& obs) {
  out << "n=" << obs.size() << '\n';
  const auto& bip = obs.bipartite();
  if (bip) out << "bipartite=" << bip->rows << ',' << bip->cols << '\n';
  for (const auto& o : obs.observations()) {
    auto v = o.v;
    if (bip) v -= Vertex(bip->rows);
    out << o.u << '\t' << v << '\t' << (o.value ? 1 : 0) << '\n';
  }
}

inline void write_observations(const std::string& path, const ObservedNetwork& obs) {
  auto out = open_output(path);
  write_observations(out, obs);
}

// ---------------------------------------------------------------------------

inline json cut_result_to_json(const CutResult& r) {
  return json{{"value", r.value}, {"exact", r.exact}, {"witness_S", r.witness_s}, {"witness_T", r.witness_t}};
}

inline CutResult cut_result_from_json(const json& j) {
  CutResult r;
  r.value = j.at("value").get<double>();
  r.exact = j.at("exact").get<bool>();
  r.witness_s = j.at("witness_S").get<std::vector<std::size_t>>();
  r.witness_t = j.at("witness_T").get<std::vector<std::size_t>>();
  return r;
}

// Sidecar for a sampled graph: latents, optional births and species, seed
// and a model description sufficient to rebuild the probability matrix.
inline json sample_sidecar(const SampleTrace& t, std::uint64_t seed, json model) {
  json j{{"latents", t.latents}, {"seed", seed}, {"model", std::move(model)}};
  if (!t.births.empty()) j["births"] = t.births;
  if (!t.species.empty()) j["species"] = t.species;
  return j;
}

}  // namespace graphon::io
