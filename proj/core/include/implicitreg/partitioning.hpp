#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "implicitreg/graph.hpp"
#include "implicitreg/numerics.hpp"

namespace implicitreg {

// A proper, nonempty node set together with its cut statistics.
struct Cluster {
  std::vector<NodeId> members;  // sorted, unique
  double cut_weight = 0.0;
  double volume = 0.0;
  double conductance = 0.0;  // cut / min(vol, total - vol)

  std::size_t size() const { return members.size(); }
  bool contains(NodeId u) const;
};

// Throws InvalidInput for an empty set, the full node set or bad ids.
// Duplicates in `nodes` are ignored.
Cluster conductance(const Graph& g, std::span<const NodeId> nodes);

// cut / min(|S|, |S complement|).
double expansion(const Graph& g, std::span<const NodeId> nodes);

enum class SweepOrdering {
  Raw,         // x_i
  SqrtDegree,  // x_i / sqrt(d_i), for eigenvectors of the normalized Laplacian
  Degree,      // x_i / d_i, for probability mass vectors
};

struct SweepProfile {
  std::vector<NodeId> order;
  // prefix_conductance[k] is the conductance of the first k+1 nodes of order.
  std::vector<double> prefix_conductance;
  std::size_t best_prefix = 0;  // lowest index attaining the minimum
  Cluster best_cluster;
};

// Descending sweep; ties broken by smaller node id. Covers n-1 prefixes.
// Throws InvalidInput on size mismatch or non-finite entries.
SweepProfile sweep_cut(const Graph& g, std::span<const double> x, SweepOrdering ordering);

// Sweep over the given order, which may omit nodes. Prefixes of size n are
// skipped, so at most n-1 prefixes are reported.
SweepProfile sweep_order(const Graph& g, std::vector<NodeId> order);

struct EigenSolverChoice {
  enum class Kind { Dense, PowerMethod };
  Kind kind = Kind::Dense;
  int power_iterations = 10000;
  std::uint64_t power_seed = 0;

  static EigenSolverChoice dense() { return {}; }
  static EigenSolverChoice power(int iterations, std::uint64_t seed = 0) {
    return {Kind::PowerMethod, iterations, seed};
  }
};

struct SpectralPartition {
  SweepProfile profile;
  double lambda2 = 0.0;
  NodeVector v2;
};

// v2 of the normalized Laplacian followed by a sqrt-degree sweep.
// Throws InvalidInput on disconnected graphs.
SpectralPartition spectral_partition(const Graph& g, EigenSolverChoice solver = EigenSolverChoice::dense());

struct NicenessMetrics {
  double avg_internal_spl = 0.0;  // over connected ordered pairs of the induced subgraph
  bool connected = true;
  double ext_int_ratio = 0.0;  // phi(S) / internal phi; +inf when the induced subgraph is disconnected
};

// Internal conductance is the best sqrt-degree sweep over v2 of the induced
// subgraph; dense up to `dense_limit` members, power method above that.
// Throws InvalidInput for singleton clusters.
NicenessMetrics niceness_metrics(const Graph& g, const Cluster& cluster,
                                 std::size_t dense_limit = default_dense_limit());

struct MqiResult {
  Cluster cluster;
  // cut/vol of the side before the first round and after every improving round.
  std::vector<double> quotient_history;
  int iterations = 0;  // improving rounds
};

// Repeated max-flow quotient improvement inside `side`. Non-integral weights
// are scaled by kMqiWeightScale and rounded before building the networks.
inline constexpr double kMqiWeightScale = 1e6;
MqiResult mqi_refine(const Graph& g, std::span<const NodeId> side);

}  // namespace implicitreg
