#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "implicitreg/error.hpp"
#include "implicitreg/max_flow.hpp"
#include "implicitreg/partitioning.hpp"

namespace implicitreg {

namespace {

constexpr const char* kModule = "mqi";

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw NumericalFailure(kModule, "integer capacity overflow; weights too large for exact flow arithmetic");
  }
  return out;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_add_overflow(a, b, &out)) {
    throw NumericalFailure(kModule, "integer capacity overflow; weights too large for exact flow arithmetic");
  }
  return out;
}

}  // namespace

MqiResult mqi_refine(const Graph& g, std::span<const NodeId> side) {
  Cluster current = conductance(g, side);
  const bool integral = g.has_integral_weights();
  auto scaled = [&](double w) {
    const double x = std::round(integral ? w : w * kMqiWeightScale);
    if (!(x < 0x1p63)) {
      throw NumericalFailure(kModule, "integer capacity overflow; weights too large for exact flow arithmetic");
    }
    return static_cast<std::int64_t>(x);
  };

  std::vector<int> local(static_cast<std::size_t>(g.num_nodes()), -1);
  MqiResult out;
  out.quotient_history.push_back(current.cut_weight / current.volume);

  while (current.size() > 1 && current.cut_weight > 0.0) {
    const auto& members = current.members;
    const int m = static_cast<int>(members.size());
    for (int i = 0; i < m; ++i) local[members[i]] = i;

    // Integer degrees, boundary weights and totals under the scaled weights.
    std::vector<std::int64_t> degree(m, 0);
    std::vector<std::int64_t> boundary(m, 0);
    std::int64_t cut = 0;
    std::int64_t vol = 0;
    for (int i = 0; i < m; ++i) {
      const auto nb = g.neighbors(members[i]);
      const auto w = g.weights(members[i]);
      for (std::size_t k = 0; k < nb.size(); ++k) {
        const std::int64_t sw = scaled(w[k]);
        degree[i] = checked_add(degree[i], sw);
        if (local[nb[k]] < 0) boundary[i] = checked_add(boundary[i], sw);
      }
      cut = checked_add(cut, boundary[i]);
      vol = checked_add(vol, degree[i]);
    }
    const std::int64_t common = std::gcd(cut, vol);
    const std::int64_t c = cut / common;
    const std::int64_t v = vol / common;

    // Nodes 0..m-1 are members, m is the source, m+1 the sink.
    FlowNetwork net;
    net.num_nodes = m + 2;
    net.source = m;
    net.sink = m + 1;
    for (int i = 0; i < m; ++i) {
      const auto nb = g.neighbors(members[i]);
      const auto w = g.weights(members[i]);
      for (std::size_t k = 0; k < nb.size(); ++k) {
        const int j = local[nb[k]];
        if (j >= 0) net.add_arc(i, j, checked_mul(v, scaled(w[k])));
      }
      if (boundary[i] > 0) net.add_arc(m, i, checked_mul(v, boundary[i]));
      net.add_arc(i, m + 1, checked_mul(c, degree[i]));
    }
    const MaxFlowResult flow = max_flow(net);
    for (int i = 0; i < m; ++i) local[members[i]] = -1;
    // Putting every member on the source side costs c * vol(S); anything
    // cheaper exposes a subset with a strictly smaller quotient.
    if (flow.value >= checked_mul(c, vol)) break;

    // The sink side of the minimum cut is the improving subset.
    std::vector<char> source_side(static_cast<std::size_t>(m), 0);
    for (int u : flow.source_side) {
      if (u < m) source_side[u] = 1;
    }
    std::vector<NodeId> next;
    for (int i = 0; i < m; ++i) {
      if (!source_side[i]) next.push_back(members[i]);
    }
    if (next.empty() || next.size() == members.size()) {
      throw NumericalFailure(kModule, "flow below c*vol(S) but the minimum cut does not shrink the side");
    }
    Cluster refined = conductance(g, next);
    const double q = refined.cut_weight / refined.volume;
    if (!(q < out.quotient_history.back())) {
      // Only reachable through rounding of non-integral weights.
      break;
    }
    out.quotient_history.push_back(q);
    ++out.iterations;
    current = std::move(refined);
  }
  out.cluster = std::move(current);
  return out;
}

}  // namespace implicitreg
