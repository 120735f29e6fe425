#include "implicitreg/max_flow.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <string>

#include "implicitreg/error.hpp"

namespace implicitreg {

namespace {

constexpr const char* kModule = "max_flow";

struct Residual {
  struct Edge {
    int to;
    std::int64_t cap;
  };
  std::vector<Edge> edges;  // edge i and i^1 are a forward/backward pair
  std::vector<std::vector<int>> out;

  explicit Residual(int n) : out(static_cast<std::size_t>(n)) {}

  void add(int u, int v, std::int64_t cap) {
    out[u].push_back(static_cast<int>(edges.size()));
    edges.push_back({v, cap});
    out[v].push_back(static_cast<int>(edges.size()));
    edges.push_back({u, 0});
  }
};

class Dinic {
 public:
  Dinic(Residual& r, int s, int t) : r_(r), s_(s), t_(t), level_(r.out.size()), next_(r.out.size()) {}

  std::int64_t run() {
    std::int64_t total = 0;
    while (bfs()) {
      std::fill(next_.begin(), next_.end(), 0);
      while (std::int64_t pushed = dfs(s_, std::numeric_limits<std::int64_t>::max())) total += pushed;
    }
    return total;
  }

  std::vector<int> reachable() {
    bfs();
    std::vector<int> side;
    for (std::size_t u = 0; u < level_.size(); ++u) {
      if (level_[u] >= 0) side.push_back(static_cast<int>(u));
    }
    return side;
  }

 private:
  bool bfs() {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<int> q;
    level_[s_] = 0;
    q.push(s_);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int id : r_.out[u]) {
        const auto& e = r_.edges[id];
        if (e.cap > 0 && level_[e.to] < 0) {
          level_[e.to] = level_[u] + 1;
          q.push(e.to);
        }
      }
    }
    return level_[t_] >= 0;
  }

  // Recursion depth is bounded by the BFS level of the sink.
  std::int64_t dfs(int u, std::int64_t limit) {
    if (u == t_) return limit;
    for (int& i = next_[u]; i < static_cast<int>(r_.out[u].size()); ++i) {
      const int id = r_.out[u][i];
      auto& e = r_.edges[id];
      if (e.cap <= 0 || level_[e.to] != level_[u] + 1) continue;
      const std::int64_t got = dfs(e.to, std::min(limit, e.cap));
      if (got > 0) {
        e.cap -= got;
        r_.edges[id ^ 1].cap += got;
        return got;
      }
    }
    return 0;
  }

  Residual& r_;
  int s_;
  int t_;
  std::vector<int> level_;
  std::vector<int> next_;
};

}  // namespace

void FlowNetwork::validate() const {
  if (num_nodes < 2) throw InvalidInput(kModule, "network needs at least two nodes");
  auto in_range = [&](int u) { return u >= 0 && u < num_nodes; };
  if (!in_range(source) || !in_range(sink)) throw InvalidInput(kModule, "source or sink out of range");
  if (source == sink) throw InvalidInput(kModule, "source equals sink");
  std::int64_t source_total = 0;
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    const FlowArc& a = arcs[i];
    const std::string where = "arc " + std::to_string(i) + " (" + std::to_string(a.from) + "->" +
                              std::to_string(a.to) + ")";
    if (!in_range(a.from) || !in_range(a.to)) throw InvalidInput(kModule, where + ": endpoint out of range");
    if (a.capacity < 0) throw InvalidInput(kModule, where + ": negative capacity");
    if (a.to == source) throw InvalidInput(kModule, where + ": arc into the source");
    if (a.from == sink) throw InvalidInput(kModule, where + ": arc out of the sink");
    if (a.from == source) {
      if (a.capacity > std::numeric_limits<std::int64_t>::max() - source_total) {
        throw InvalidInput(kModule, "total source capacity overflows int64");
      }
      source_total += a.capacity;
    }
  }
}

MaxFlowResult max_flow(const FlowNetwork& network) {
  network.validate();
  Residual r(network.num_nodes);
  for (const FlowArc& a : network.arcs) {
    if (a.from != a.to && a.capacity > 0) r.add(a.from, a.to, a.capacity);
  }
  Dinic dinic(r, network.source, network.sink);
  MaxFlowResult out;
  out.value = dinic.run();
  out.source_side = dinic.reachable();
  return out;
}

}  // namespace implicitreg
