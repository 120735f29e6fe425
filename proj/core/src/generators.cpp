#include "implicitreg/generators.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "implicitreg/error.hpp"

namespace implicitreg {

namespace {

constexpr const char* kModule = "generate";
constexpr int kMaxRegularAttempts = 200;

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidInput(kModule, what);
}

void add_clique(std::vector<Edge>& edges, NodeId first, NodeId size) {
  for (NodeId i = 0; i < size; ++i)
    for (NodeId j = i + 1; j < size; ++j) edges.push_back({first + i, first + j, 1.0});
}

// One attempt at a simple d-regular pairing. Pairs are drawn one at a time
// among the remaining stubs, rejecting loops and repeated edges; the attempt
// is abandoned when no admissible pair is left.
bool try_random_regular(NodeId n, NodeId d, std::mt19937_64& rng, std::vector<Edge>& edges) {
  std::vector<NodeId> stubs;
  stubs.reserve(static_cast<std::size_t>(n) * d);
  for (NodeId u = 0; u < n; ++u)
    for (NodeId k = 0; k < d; ++k) stubs.push_back(u);
  std::set<std::pair<NodeId, NodeId>> present;
  edges.clear();

  auto admissible = [&](NodeId a, NodeId b) {
    return a != b && !present.count({std::min(a, b), std::max(a, b)});
  };
  while (!stubs.empty()) {
    bool paired = false;
    for (int tries = 0; tries < 64 && !paired; ++tries) {
      const std::size_t i = uniform_below(rng, stubs.size());
      const std::size_t j = uniform_below(rng, stubs.size());
      if (i == j || !admissible(stubs[i], stubs[j])) continue;
      const NodeId a = stubs[i], b = stubs[j];
      present.insert({std::min(a, b), std::max(a, b)});
      edges.push_back({std::min(a, b), std::max(a, b), 1.0});
      // Remove the higher index first so the lower one stays valid.
      for (std::size_t k : {std::max(i, j), std::min(i, j)}) {
        stubs[k] = stubs.back();
        stubs.pop_back();
      }
      paired = true;
    }
    if (paired) continue;
    // Random probing failed; scan for any admissible pair before giving up.
    bool any = false;
    for (std::size_t i = 0; i < stubs.size() && !any; ++i)
      for (std::size_t j = i + 1; j < stubs.size() && !any; ++j) any = admissible(stubs[i], stubs[j]);
    if (!any) return false;
  }
  return true;
}

Graph random_regular(NodeId n, NodeId d, std::mt19937_64& rng, bool need_connected) {
  require(n >= 1 && d >= 1, "random regular graph needs n >= 1 and d >= 1");
  require(d < n, "random regular graph needs d < n");
  require((static_cast<long long>(n) * d) % 2 == 0, "n*d must be even for a d-regular graph");
  std::vector<Edge> edges;
  for (int attempt = 0; attempt < kMaxRegularAttempts; ++attempt) {
    if (!try_random_regular(n, d, rng, edges)) continue;
    Graph g = Graph::from_edges(n, edges);
    if (!need_connected || g.is_connected()) return g;
  }
  throw NumericalFailure(kModule, "random regular construction failed after " +
                                      std::to_string(kMaxRegularAttempts) + " attempts");
}

}  // namespace

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == 0) throw InvalidInput(kModule, "uniform_below(0)");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Graph generate(const GraphFamily& family, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Edge> edges;
  return std::visit(
      [&](const auto& f) -> Graph {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, family::Path>) {
          require(f.n >= 1, "path needs n >= 1");
          for (NodeId i = 0; i + 1 < f.n; ++i) edges.push_back({i, i + 1, 1.0});
          return Graph::from_edges(f.n, edges);
        } else if constexpr (std::is_same_v<F, family::Cycle>) {
          require(f.n >= 3, "cycle needs n >= 3");
          for (NodeId i = 0; i < f.n; ++i) edges.push_back({i, (i + 1) % f.n, 1.0});
          return Graph::from_edges(f.n, edges);
        } else if constexpr (std::is_same_v<F, family::Complete>) {
          require(f.n >= 1, "complete graph needs n >= 1");
          add_clique(edges, 0, f.n);
          return Graph::from_edges(f.n, edges);
        } else if constexpr (std::is_same_v<F, family::Grid>) {
          require(f.rows >= 1 && f.cols >= 1, "grid needs positive dimensions");
          for (NodeId r = 0; r < f.rows; ++r) {
            for (NodeId c = 0; c < f.cols; ++c) {
              const NodeId u = r * f.cols + c;
              if (c + 1 < f.cols) edges.push_back({u, u + 1, 1.0});
              if (r + 1 < f.rows) edges.push_back({u, u + f.cols, 1.0});
            }
          }
          return Graph::from_edges(f.rows * f.cols, edges);
        } else if constexpr (std::is_same_v<F, family::Dumbbell>) {
          const NodeId k = f.clique_size;
          require(k >= 1, "dumbbell needs clique size >= 1");
          require(f.bridges >= 1 && f.bridges <= k, "dumbbell needs 1 <= bridges <= clique size");
          add_clique(edges, 0, k);
          add_clique(edges, k, k);
          for (NodeId i = 0; i < f.bridges; ++i) edges.push_back({k - 1 - i, k + i, 1.0});
          return Graph::from_edges(2 * k, edges);
        } else if constexpr (std::is_same_v<F, family::RingOfCliques>) {
          require(f.size >= 1 && f.count >= 2, "ring of cliques needs count >= 2 and size >= 1");
          require(f.count >= 3 || f.size >= 2, "ring of two single-node cliques is a multigraph");
          for (NodeId c = 0; c < f.count; ++c) {
            add_clique(edges, c * f.size, f.size);
            const NodeId next = ((c + 1) % f.count) * f.size;
            edges.push_back({c * f.size + f.size - 1, next, 1.0});
          }
          return Graph::from_edges(f.count * f.size, edges);
        } else if constexpr (std::is_same_v<F, family::WhiskeredExpander>) {
          require(f.degree >= 3, "whiskered expander needs core degree >= 3");
          require(f.whiskers >= 0 && f.whiskers <= f.core, "whisker count must lie in [0, core]");
          require(f.length >= 1 || f.whiskers == 0, "whisker length must be >= 1");
          const Graph core = random_regular(f.core, f.degree, rng, /*need_connected=*/true);
          edges = core.edges();
          std::vector<NodeId> anchors(f.core);
          std::iota(anchors.begin(), anchors.end(), 0);
          for (NodeId i = 0; i < f.whiskers; ++i) {
            const auto j = i + static_cast<NodeId>(uniform_below(rng, f.core - i));
            std::swap(anchors[i], anchors[j]);
          }
          NodeId next = f.core;
          for (NodeId i = 0; i < f.whiskers; ++i) {
            NodeId prev = anchors[i];
            for (NodeId j = 0; j < f.length; ++j, ++next) {
              edges.push_back({prev, next, 1.0});
              prev = next;
            }
          }
          return Graph::from_edges(next, edges);
        } else {
          static_assert(std::is_same_v<F, family::RandomRegular>);
          return random_regular(f.n, f.degree, rng, /*need_connected=*/false);
        }
      },
      family);
}

std::string describe(const GraphFamily& family) {
  return std::visit(
      [](const auto& f) -> std::string {
        using F = std::decay_t<decltype(f)>;
        auto s = [](auto x) { return std::to_string(x); };
        if constexpr (std::is_same_v<F, family::Path>) return "path(n=" + s(f.n) + ")";
        else if constexpr (std::is_same_v<F, family::Cycle>) return "cycle(n=" + s(f.n) + ")";
        else if constexpr (std::is_same_v<F, family::Complete>) return "complete(n=" + s(f.n) + ")";
        else if constexpr (std::is_same_v<F, family::Grid>) return "grid(r=" + s(f.rows) + ",c=" + s(f.cols) + ")";
        else if constexpr (std::is_same_v<F, family::Dumbbell>)
          return "dumbbell(k=" + s(f.clique_size) + ",b=" + s(f.bridges) + ")";
        else if constexpr (std::is_same_v<F, family::RingOfCliques>)
          return "ring-of-cliques(m=" + s(f.count) + ",k=" + s(f.size) + ")";
        else if constexpr (std::is_same_v<F, family::WhiskeredExpander>)
          return "whiskered-expander(n=" + s(f.core) + ",d=" + s(f.degree) + ",w=" + s(f.whiskers) +
                 ",l=" + s(f.length) + ")";
        else
          return "random-regular(n=" + s(f.n) + ",d=" + s(f.degree) + ")";
      },
      family);
}

}  // namespace implicitreg
