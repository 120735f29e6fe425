#pragma once

#include <cstdint>
#include <vector>

namespace implicitreg {

struct FlowArc {
  int from = 0;
  int to = 0;
  std::int64_t capacity = 0;
};

struct FlowNetwork {
  int num_nodes = 0;
  int source = 0;
  int sink = 1;
  std::vector<FlowArc> arcs;

  void add_arc(int from, int to, std::int64_t capacity) { arcs.push_back({from, to, capacity}); }
  // Throws InvalidInput: ids out of range, source == sink, negative
  // capacities, arcs into the source or out of the sink, or a source
  // capacity total that does not fit in int64.
  void validate() const;
};

struct MaxFlowResult {
  std::int64_t value = 0;
  std::vector<int> source_side;  // sorted; nodes reachable from the source in the residual graph
};

// Dinic's algorithm.
MaxFlowResult max_flow(const FlowNetwork& network);

}  // namespace implicitreg
