#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "implicitreg/error.hpp"
#include "implicitreg/graph.hpp"

namespace implicitreg {

namespace {

constexpr const char* kModule = "graph-io";

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Graph load_edge_list(std::istream& in) {
  std::vector<Edge> edges;
  NodeId max_id = -1;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;

    std::istringstream fields{std::string(body)};
    long long u = 0, v = 0;
    double w = 1.0;
    auto fail = [&](const std::string& why) {
      return InvalidInput(kModule, "line " + std::to_string(line_no) + ": " + why);
    };
    if (!(fields >> u >> v)) throw fail("expected 'u v [w]'");
    std::string rest;
    if (fields >> rest) {
      const char* first = rest.data();
      const char* last = rest.data() + rest.size();
      const auto [ptr, ec] = std::from_chars(first, last, w);
      if (ec != std::errc() || ptr != last) throw fail("unparseable weight '" + rest + "'");
      if (fields >> rest) throw fail("trailing tokens");
    }
    if (u < 0 || v < 0 || u > INT32_MAX - 1 || v > INT32_MAX - 1) throw fail("node id out of range");
    if (u == v) throw fail("self-loop on node " + std::to_string(u));
    if (!(w > 0.0) || !std::isfinite(w)) throw fail("non-positive weight");
    edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v), w});
    max_id = std::max<NodeId>(max_id, static_cast<NodeId>(std::max(u, v)));
  }
  // Duplicates are detected by from_edges; self-loops and weights were
  // already reported with their line numbers above.
  return Graph::from_edges(max_id + 1, edges);
}

Graph load_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput(kModule, "cannot open " + path);
  return load_edge_list(in);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  const bool unit = g.has_unit_weights();
  for (const Edge& e : g.edges()) {
    out << e.u << ' ' << e.v;
    if (!unit) out << ' ' << format_real(e.weight);
    out << '\n';
  }
}

void write_id_map(std::ostream& out, std::span<const NodeId> old_id) {
  out << "old_id,new_id\n";
  for (std::size_t i = 0; i < old_id.size(); ++i) out << old_id[i] << ',' << i << '\n';
}

NodeVector read_vector(std::istream& in) {
  NodeVector out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), x);
    if (ec != std::errc() || ptr != body.data() + body.size() || !std::isfinite(x)) {
      throw InvalidInput(kModule, "vector line " + std::to_string(line_no) + ": not a finite real");
    }
    out.push_back(x);
  }
  return out;
}

NodeVector read_vector_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput(kModule, "cannot open " + path);
  return read_vector(in);
}

void write_vector(std::ostream& out, std::span<const double> x) {
  for (double v : x) out << format_real(v) << '\n';
}

}  // namespace implicitreg
