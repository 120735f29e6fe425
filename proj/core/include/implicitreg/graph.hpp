#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace implicitreg {

using NodeId = std::int32_t;

// Dense per-node real vector, index-aligned with node ids.
using NodeVector = std::vector<double>;

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  double weight = 1.0;
};

// Immutable undirected weighted graph in compressed sparse row form.
//
// Every undirected edge {u,v} is stored twice (u->v and v->u) with the same
// weight. Rows are sorted by neighbor id. Weights are strictly positive, there
// are no self-loops and no parallel edges. Isolated nodes are allowed until
// preprocess() is applied.
class Graph {
 public:
  Graph() = default;

  // Builds a graph on nodes [0, num_nodes) from a list of undirected edges,
  // each given once. Throws InvalidInput on self-loops, duplicates,
  // out-of-range ids or non-positive / non-finite weights.
  static Graph from_edges(NodeId num_nodes, std::span<const Edge> edges);

  NodeId num_nodes() const { return static_cast<NodeId>(degrees_.size()); }
  std::size_t num_edges() const { return targets_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId u) const {
    return {targets_.data() + offsets_[u], targets_.data() + offsets_[u + 1]};
  }
  std::span<const double> weights(NodeId u) const {
    return {weights_.data() + offsets_[u], weights_.data() + offsets_[u + 1]};
  }
  std::size_t out_degree(NodeId u) const { return offsets_[u + 1] - offsets_[u]; }

  double degree(NodeId u) const { return degrees_[u]; }
  std::span<const double> degrees() const { return degrees_; }
  double total_volume() const { return total_volume_; }
  double max_degree() const;

  // Weight of edge {u,v}, 0 when absent.
  double edge_weight(NodeId u, NodeId v) const;

  // Each undirected edge once, with u < v, sorted lexicographically.
  std::vector<Edge> edges() const;

  bool is_connected() const;
  bool has_unit_weights() const;
  bool has_integral_weights() const;

  // The vector d^{1/2} (unnormalized).
  NodeVector sqrt_degrees() const;

  // FNV-1a over the canonical edge list, hex encoded. Identifies a graph in
  // manifests and reports.
  std::string fingerprint() const;

 private:
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> targets_;
  std::vector<double> weights_;
  std::vector<double> degrees_;
  double total_volume_ = 0.0;
};

// Validated probability vector over the nodes: entries >= 0, sum 1 +- 1e-12.
class SeedDistribution {
 public:
  static SeedDistribution from_vector(NodeVector values);
  // Uniform mass over `nodes` (duplicates ignored).
  static SeedDistribution uniform_over(NodeId num_nodes, std::span<const NodeId> nodes);
  static SeedDistribution indicator(NodeId num_nodes, NodeId node);

  const NodeVector& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

 private:
  explicit SeedDistribution(NodeVector values) : values_(std::move(values)) {}
  NodeVector values_;
};

// Sparse operators available through apply_matrix().
//   Adjacency              A
//   DegreeDiag             D
//   CombinatorialLaplacian L = D - A
//   NormalizedLaplacian    I - D^{-1/2} A D^{-1/2}
//   RandomWalk             M = A D^{-1}        (column stochastic)
//   LazyWalk               alpha I + (1 - alpha) M
struct MatrixKind {
  enum class Type {
    Adjacency,
    DegreeDiag,
    CombinatorialLaplacian,
    NormalizedLaplacian,
    RandomWalk,
    LazyWalk,
  };

  Type type = Type::Adjacency;
  double alpha = 0.0;  // LazyWalk only

  static MatrixKind adjacency() { return {Type::Adjacency}; }
  static MatrixKind degree_diag() { return {Type::DegreeDiag}; }
  static MatrixKind combinatorial_laplacian() { return {Type::CombinatorialLaplacian}; }
  static MatrixKind normalized_laplacian() { return {Type::NormalizedLaplacian}; }
  static MatrixKind random_walk() { return {Type::RandomWalk}; }
  // Throws InvalidInput unless 0 < alpha < 1.
  static MatrixKind lazy_walk(double alpha);

  bool is_symmetric() const;
  std::string name() const;
};

// out = K x for the selected operator, O(|E|). Nodes of degree zero contribute
// nothing through D^{-1} / D^{-1/2} factors.
NodeVector apply_matrix(const Graph& g, MatrixKind kind, std::span<const double> x);
void apply_matrix(const Graph& g, MatrixKind kind, std::span<const double> x, std::span<double> out);

struct PreprocessResult {
  Graph graph;
  // old_id[new_id]; ids that were dropped do not appear.
  std::vector<NodeId> old_id;
};

// Largest connected component, re-indexed densely in increasing old-id order.
// Ties between equally large components go to the one holding the smallest
// original id. Throws InvalidInput on an empty graph.
PreprocessResult preprocess(const Graph& g);

// Induced subgraph on `nodes` (sorted, unique), re-indexed by position.
Graph induced_subgraph(const Graph& g, std::span<const NodeId> nodes);

// Edge-list text: "u v [w]" per line, '#' comments, blank lines ignored.
Graph load_edge_list(std::istream& in);
Graph load_edge_list_file(const std::string& path);
void write_edge_list(std::ostream& out, const Graph& g);
void write_id_map(std::ostream& out, std::span<const NodeId> old_id);

// Vector files: one real per line, index implicit.
NodeVector read_vector(std::istream& in);
NodeVector read_vector_file(const std::string& path);
void write_vector(std::ostream& out, std::span<const double> x);

}  // namespace implicitreg
