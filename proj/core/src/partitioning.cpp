#include "implicitreg/partitioning.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "implicitreg/diffusion.hpp"
#include "implicitreg/error.hpp"

namespace implicitreg {

namespace {

constexpr const char* kModule = "partitioning";

std::vector<NodeId> normalized_set(const Graph& g, std::span<const NodeId> nodes) {
  std::vector<NodeId> s(nodes.begin(), nodes.end());
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  if (s.empty()) throw InvalidInput(kModule, "node set is empty");
  if (s.front() < 0 || s.back() >= g.num_nodes()) throw InvalidInput(kModule, "node id out of range");
  if (static_cast<NodeId>(s.size()) == g.num_nodes()) throw InvalidInput(kModule, "node set is the whole graph");
  return s;
}

double cut_of(const Graph& g, const std::vector<char>& in_set, std::span<const NodeId> members) {
  double cut = 0.0;
  for (NodeId u : members) {
    const auto nb = g.neighbors(u);
    const auto w = g.weights(u);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      if (!in_set[nb[k]]) cut += w[k];
    }
  }
  return cut;
}

double quotient(double cut, double volume, double total) {
  const double denom = std::min(volume, total - volume);
  if (denom > 0.0) return cut / denom;
  return cut > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

}  // namespace

bool Cluster::contains(NodeId u) const { return std::binary_search(members.begin(), members.end(), u); }

Cluster conductance(const Graph& g, std::span<const NodeId> nodes) {
  Cluster c;
  c.members = normalized_set(g, nodes);
  std::vector<char> in_set(static_cast<std::size_t>(g.num_nodes()), 0);
  for (NodeId u : c.members) {
    in_set[u] = 1;
    c.volume += g.degree(u);
  }
  c.cut_weight = cut_of(g, in_set, c.members);
  c.conductance = quotient(c.cut_weight, c.volume, g.total_volume());
  return c;
}

double expansion(const Graph& g, std::span<const NodeId> nodes) {
  const Cluster c = conductance(g, nodes);
  const double smaller = static_cast<double>(std::min(c.size(), g.num_nodes() - c.size()));
  return c.cut_weight / smaller;
}

SweepProfile sweep_order(const Graph& g, std::vector<NodeId> order) {
  const NodeId n = g.num_nodes();
  if (order.empty()) throw InvalidInput(kModule, "sweep order is empty");
  if (n < 2) throw InvalidInput(kModule, "sweep needs at least two nodes");
  std::vector<char> in_set(static_cast<std::size_t>(n), 0);
  for (NodeId u : order) {
    if (u < 0 || u >= n) throw InvalidInput(kModule, "sweep order has an out-of-range id");
    if (in_set[u]) throw InvalidInput(kModule, "sweep order repeats a node");
    in_set[u] = 1;
  }
  std::fill(in_set.begin(), in_set.end(), 0);

  SweepProfile prof;
  prof.order = std::move(order);
  const std::size_t prefixes = std::min(prof.order.size(), static_cast<std::size_t>(n - 1));
  prof.prefix_conductance.reserve(prefixes);
  double cut = 0.0;
  double volume = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < prefixes; ++k) {
    const NodeId u = prof.order[k];
    double inside = 0.0;
    const auto nb = g.neighbors(u);
    const auto w = g.weights(u);
    for (std::size_t j = 0; j < nb.size(); ++j) {
      if (in_set[nb[j]]) inside += w[j];
    }
    in_set[u] = 1;
    cut += g.degree(u) - 2.0 * inside;
    volume += g.degree(u);
    const double phi = quotient(cut, volume, g.total_volume());
    prof.prefix_conductance.push_back(phi);
    if (phi < best) {
      best = phi;
      prof.best_prefix = k;
    }
  }
  prof.best_cluster = conductance(
      g, std::span<const NodeId>(prof.order.data(), prof.best_prefix + 1));
  return prof;
}

SweepProfile sweep_cut(const Graph& g, std::span<const double> x, SweepOrdering ordering) {
  const NodeId n = g.num_nodes();
  if (x.size() != static_cast<std::size_t>(n)) throw InvalidInput(kModule, "sweep vector length mismatch");
  std::vector<double> key(x.size());
  for (NodeId u = 0; u < n; ++u) {
    if (!std::isfinite(x[u])) throw InvalidInput(kModule, "sweep vector has a non-finite entry");
    const double d = g.degree(u);
    switch (ordering) {
      case SweepOrdering::Raw: key[u] = x[u]; break;
      case SweepOrdering::SqrtDegree: key[u] = d > 0.0 ? x[u] / std::sqrt(d) : 0.0; break;
      case SweepOrdering::Degree: key[u] = d > 0.0 ? x[u] / d : 0.0; break;
    }
  }
  std::vector<NodeId> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return key[a] > key[b]; });
  return sweep_order(g, std::move(order));
}

SpectralPartition spectral_partition(const Graph& g, EigenSolverChoice solver) {
  if (g.num_nodes() < 2 || !g.is_connected()) {
    throw InvalidInput(kModule, "spectral partition needs a connected graph with at least two nodes");
  }
  SpectralPartition out;
  if (solver.kind == EigenSolverChoice::Kind::Dense) {
    const SpectralDecomposition eig = dense_eigendecompose(g, MatrixKind::normalized_laplacian());
    out.lambda2 = eig.eigenvalues[1];
    out.v2.assign(eig.eigenvectors.col(1).data(), eig.eigenvectors.col(1).data() + g.num_nodes());
  } else {
    const PowerMethodReport rep =
        power_method(g, PowerTarget::SecondOfNormalizedLaplacian, random_sign_vector(g.num_nodes(), solver.power_seed),
                     solver.power_iterations);
    out.lambda2 = rep.eigenvalue;
    out.v2 = rep.vector;
  }
  out.profile = sweep_cut(g, out.v2, SweepOrdering::SqrtDegree);
  return out;
}

NicenessMetrics niceness_metrics(const Graph& g, const Cluster& cluster, std::size_t dense_limit) {
  if (cluster.size() < 2) throw InvalidInput(kModule, "niceness metrics need at least two members");
  const Graph sub = induced_subgraph(g, cluster.members);
  const NodeId m = sub.num_nodes();

  NicenessMetrics out;
  std::vector<int> dist(static_cast<std::size_t>(m));
  std::queue<NodeId> q;
  double total = 0.0;
  std::size_t pairs = 0;
  for (NodeId src = 0; src < m; ++src) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[src] = 0;
    q.push(src);
    while (!q.empty()) {
      const NodeId u = q.front();
      q.pop();
      for (NodeId v : sub.neighbors(u)) {
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          total += dist[v];
          ++pairs;
          q.push(v);
        }
      }
    }
  }
  out.connected = pairs == static_cast<std::size_t>(m) * static_cast<std::size_t>(m - 1);
  out.avg_internal_spl = pairs > 0 ? total / static_cast<double>(pairs) : 0.0;

  if (!out.connected) {
    out.ext_int_ratio = std::numeric_limits<double>::infinity();
    return out;
  }
  const EigenSolverChoice solver = static_cast<std::size_t>(m) <= dense_limit ? EigenSolverChoice::dense()
                                                                                : EigenSolverChoice::power(20000);
  const double internal = spectral_partition(sub, solver).profile.best_cluster.conductance;
  out.ext_int_ratio = cluster.conductance / internal;
  return out;
}

}  // namespace implicitreg
