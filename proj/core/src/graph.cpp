#include "implicitreg/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <queue>

#include "implicitreg/error.hpp"

namespace implicitreg {

namespace {

constexpr const char* kModule = "graph";

}  // namespace

Graph Graph::from_edges(NodeId num_nodes, std::span<const Edge> edges) {
  if (num_nodes < 0) throw InvalidInput(kModule, "negative node count");
  struct Arc {
    NodeId from, to;
    double w;
  };
  std::vector<Arc> arcs;
  arcs.reserve(2 * edges.size());
  for (const Edge& e : edges) {
    if (e.u < 0 || e.v < 0 || e.u >= num_nodes || e.v >= num_nodes) {
      throw InvalidInput(kModule, "edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                                      ") references a node outside [0," + std::to_string(num_nodes) + ")");
    }
    if (e.u == e.v) {
      throw InvalidInput(kModule, "self-loop on node " + std::to_string(e.u));
    }
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      throw InvalidInput(kModule, "non-positive weight on edge (" + std::to_string(e.u) + "," +
                                      std::to_string(e.v) + ")");
    }
    arcs.push_back({e.u, e.v, e.weight});
    arcs.push_back({e.v, e.u, e.weight});
  }
  std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) {
    return a.from != b.from ? a.from < b.from : a.to < b.to;
  });
  for (std::size_t i = 1; i < arcs.size(); ++i) {
    if (arcs[i].from == arcs[i - 1].from && arcs[i].to == arcs[i - 1].to) {
      const NodeId a = std::min(arcs[i].from, arcs[i].to);
      const NodeId b = std::max(arcs[i].from, arcs[i].to);
      throw InvalidInput(kModule, "duplicate edge (" + std::to_string(a) + "," + std::to_string(b) + ")");
    }
  }

  Graph g;
  g.offsets_.assign(static_cast<std::size_t>(num_nodes) + 1, 0);
  g.targets_.resize(arcs.size());
  g.weights_.resize(arcs.size());
  g.degrees_.assign(num_nodes, 0.0);
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    ++g.offsets_[arcs[i].from + 1];
    g.targets_[i] = arcs[i].to;
    g.weights_[i] = arcs[i].w;
  }
  std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
  for (NodeId u = 0; u < num_nodes; ++u) {
    double d = 0.0;
    for (double w : g.weights(u)) d += w;
    g.degrees_[u] = d;
    g.total_volume_ += d;
  }
  return g;
}

double Graph::max_degree() const {
  return degrees_.empty() ? 0.0 : *std::max_element(degrees_.begin(), degrees_.end());
}

double Graph::edge_weight(NodeId u, NodeId v) const {
  const auto nbrs = neighbors(u);
  const auto it = std::lower_bound(nbrs.begin(), nbrs.end(), v);
  if (it == nbrs.end() || *it != v) return 0.0;
  return weights(u)[static_cast<std::size_t>(it - nbrs.begin())];
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (NodeId u = 0; u < num_nodes(); ++u) {
    const auto nbrs = neighbors(u);
    const auto ws = weights(u);
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      if (u < nbrs[i]) out.push_back({u, nbrs[i], ws[i]});
    }
  }
  return out;
}

bool Graph::is_connected() const {
  const NodeId n = num_nodes();
  if (n == 0) return false;
  std::vector<char> seen(n, 0);
  std::vector<NodeId> stack{0};
  seen[0] = 1;
  NodeId count = 1;
  while (!stack.empty()) {
    const NodeId u = stack.back();
    stack.pop_back();
    for (NodeId v : neighbors(u)) {
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count == n;
}

bool Graph::has_unit_weights() const {
  return std::all_of(weights_.begin(), weights_.end(), [](double w) { return w == 1.0; });
}

bool Graph::has_integral_weights() const {
  return std::all_of(weights_.begin(), weights_.end(),
                     [](double w) { return w == std::round(w) && w < 1e9; });
}

NodeVector Graph::sqrt_degrees() const {
  NodeVector out(degrees_.size());
  std::transform(degrees_.begin(), degrees_.end(), out.begin(), [](double d) { return std::sqrt(d); });
  return out;
}

std::string Graph::fingerprint() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  };
  const NodeId n = num_nodes();
  mix(&n, sizeof n);
  for (const Edge& e : edges()) {
    mix(&e.u, sizeof e.u);
    mix(&e.v, sizeof e.v);
    mix(&e.weight, sizeof e.weight);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SeedDistribution SeedDistribution::from_vector(NodeVector values) {
  double sum = 0.0;
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidInput(kModule, "seed distribution has a negative or non-finite entry");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw InvalidInput(kModule, "seed distribution does not sum to 1");
  }
  return SeedDistribution(std::move(values));
}

SeedDistribution SeedDistribution::uniform_over(NodeId num_nodes, std::span<const NodeId> nodes) {
  std::vector<NodeId> unique(nodes.begin(), nodes.end());
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  if (unique.empty()) throw InvalidInput(kModule, "empty seed set");
  NodeVector values(num_nodes, 0.0);
  for (NodeId u : unique) {
    if (u < 0 || u >= num_nodes) throw InvalidInput(kModule, "seed node out of range");
    values[u] = 1.0 / static_cast<double>(unique.size());
  }
  return SeedDistribution(std::move(values));
}

SeedDistribution SeedDistribution::indicator(NodeId num_nodes, NodeId node) {
  const NodeId nodes[] = {node};
  return uniform_over(num_nodes, nodes);
}

MatrixKind MatrixKind::lazy_walk(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidInput(kModule, "lazy walk holding probability must lie strictly inside (0,1)");
  }
  return {Type::LazyWalk, alpha};
}

bool MatrixKind::is_symmetric() const {
  switch (type) {
    case Type::Adjacency:
    case Type::DegreeDiag:
    case Type::CombinatorialLaplacian:
    case Type::NormalizedLaplacian:
      return true;
    case Type::RandomWalk:
    case Type::LazyWalk:
      return false;
  }
  return false;
}

std::string MatrixKind::name() const {
  switch (type) {
    case Type::Adjacency: return "adjacency";
    case Type::DegreeDiag: return "degree";
    case Type::CombinatorialLaplacian: return "laplacian";
    case Type::NormalizedLaplacian: return "normalized-laplacian";
    case Type::RandomWalk: return "random-walk";
    case Type::LazyWalk: return "lazy-walk";
  }
  return "unknown";
}

void apply_matrix(const Graph& g, MatrixKind kind, std::span<const double> x, std::span<double> out) {
  const NodeId n = g.num_nodes();
  if (x.size() != static_cast<std::size_t>(n) || out.size() != x.size()) {
    throw InvalidInput(kModule, "apply_matrix: vector length " + std::to_string(x.size()) +
                                    " does not match node count " + std::to_string(n));
  }
  const auto deg = g.degrees();
  using T = MatrixKind::Type;
  for (NodeId u = 0; u < n; ++u) {
    const auto nbrs = g.neighbors(u);
    const auto ws = g.weights(u);
    double acc = 0.0;
    switch (kind.type) {
      case T::Adjacency:
        for (std::size_t i = 0; i < nbrs.size(); ++i) acc += ws[i] * x[nbrs[i]];
        break;
      case T::DegreeDiag:
        acc = deg[u] * x[u];
        break;
      case T::CombinatorialLaplacian:
        for (std::size_t i = 0; i < nbrs.size(); ++i) acc -= ws[i] * x[nbrs[i]];
        acc += deg[u] * x[u];
        break;
      case T::NormalizedLaplacian:
        if (deg[u] > 0.0) {
          for (std::size_t i = 0; i < nbrs.size(); ++i) acc += ws[i] * x[nbrs[i]] / std::sqrt(deg[nbrs[i]]);
          acc = x[u] - acc / std::sqrt(deg[u]);
        } else {
          acc = x[u];
        }
        break;
      case T::RandomWalk:
        for (std::size_t i = 0; i < nbrs.size(); ++i) acc += ws[i] * x[nbrs[i]] / deg[nbrs[i]];
        break;
      case T::LazyWalk:
        for (std::size_t i = 0; i < nbrs.size(); ++i) acc += ws[i] * x[nbrs[i]] / deg[nbrs[i]];
        acc = kind.alpha * x[u] + (1.0 - kind.alpha) * acc;
        break;
    }
    out[u] = acc;
  }
}

NodeVector apply_matrix(const Graph& g, MatrixKind kind, std::span<const double> x) {
  NodeVector out(x.size());
  apply_matrix(g, kind, x, out);
  return out;
}

PreprocessResult preprocess(const Graph& g) {
  const NodeId n = g.num_nodes();
  if (n == 0) throw InvalidInput(kModule, "preprocess: empty graph");

  std::vector<NodeId> component(n, -1);
  NodeId best_root = -1;
  NodeId best_size = 0;
  for (NodeId root = 0; root < n; ++root) {
    if (component[root] >= 0) continue;
    NodeId size = 0;
    std::vector<NodeId> stack{root};
    component[root] = root;
    while (!stack.empty()) {
      const NodeId u = stack.back();
      stack.pop_back();
      ++size;
      for (NodeId v : g.neighbors(u)) {
        if (component[v] < 0) {
          component[v] = root;
          stack.push_back(v);
        }
      }
    }
    // Roots are visited in increasing id order, so a strict comparison keeps
    // the component of the smallest id on ties.
    if (size > best_size) {
      best_size = size;
      best_root = root;
    }
  }

  PreprocessResult result;
  std::vector<NodeId> new_id(n, -1);
  for (NodeId u = 0; u < n; ++u) {
    if (component[u] == best_root) {
      new_id[u] = static_cast<NodeId>(result.old_id.size());
      result.old_id.push_back(u);
    }
  }
  std::vector<Edge> edges;
  for (const Edge& e : g.edges()) {
    if (new_id[e.u] >= 0) edges.push_back({new_id[e.u], new_id[e.v], e.weight});
  }
  result.graph = Graph::from_edges(best_size, edges);
  return result;
}

Graph induced_subgraph(const Graph& g, std::span<const NodeId> nodes) {
  std::vector<NodeId> position(g.num_nodes(), -1);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i] < 0 || nodes[i] >= g.num_nodes()) throw InvalidInput(kModule, "node out of range");
    position[nodes[i]] = static_cast<NodeId>(i);
  }
  std::vector<Edge> edges;
  for (NodeId u : nodes) {
    const auto nbrs = g.neighbors(u);
    const auto ws = g.weights(u);
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      if (u < nbrs[i] && position[nbrs[i]] >= 0) edges.push_back({position[u], position[nbrs[i]], ws[i]});
    }
  }
  return Graph::from_edges(static_cast<NodeId>(nodes.size()), edges);
}

}  // namespace implicitreg
