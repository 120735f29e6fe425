#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "implicitreg/generators.hpp"
#include "implicitreg/graph.hpp"
#include "implicitreg/local_clustering.hpp"
#include "implicitreg/partitioning.hpp"
#include "implicitreg/regularization.hpp"

namespace implicitreg {

struct SuiteGraph {
  std::string id;  // describe(family) + "#seed"
  GraphFamily family;
  std::uint64_t seed = 0;
  Graph graph;
};

// `count` connected graphs with at most `max_nodes` nodes each, cycling
// through all generator families with sizes drawn from `seed`.
std::vector<SuiteGraph> generator_suite(std::size_t count, std::uint64_t seed, NodeId max_nodes);

// Independent stream for trial `index` of a run seeded with `master`.
std::mt19937_64 trial_rng(std::uint64_t master, std::uint64_t index);

// Runs `body(i)` for i in [0, count) on up to hardware_concurrency threads.
// Callers write results into slot i, so output order never depends on
// scheduling. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

// verify-reg grid ----------------------------------------------------------

struct VerifyRegGrid {
  std::vector<double> heat_times = {0.1, 1.0, 10.0};
  std::vector<double> pagerank_gammas = {0.1, 0.5, 0.9};
  double lazy_alpha = 0.5;
  std::vector<int> lazy_steps = {1, 2, 4};
  std::vector<double> p_grid = default_p_grid();
};

struct VerifyRegReport {
  std::vector<EquivalenceReport> rows;
  std::vector<PNormFit> fits;  // one per lazy step count
  double max_gap = 0.0;        // over heat and PageRank rows only
};

VerifyRegReport verify_reg(const Graph& g, const std::string& graph_id, const VerifyRegGrid& grid);
void write_equivalence_csv(std::ostream& out, const std::vector<EquivalenceReport>& rows);

// Cheeger suite ------------------------------------------------------------

struct CheegerRow {
  std::string graph_id;
  NodeId nodes = 0;
  std::size_t edges = 0;
  double lambda2 = 0.0;
  double sweep_conductance = 0.0;
  bool holds = false;  // lambda2/2 <= phi <= sqrt(2 lambda2)
};

inline constexpr const char* kCheegerCsvHeader =
    "graph_id,nodes,edges,lambda2,sweep_conductance,lower_bound,upper_bound,holds";

std::vector<CheegerRow> cheeger_suite(const std::vector<SuiteGraph>& suite);
void write_cheeger_csv(std::ostream& out, const std::vector<CheegerRow>& rows);

// Scatter ------------------------------------------------------------------

struct ScatterConfig {
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  std::vector<double> gammas = {0.001, 0.003, 0.01, 0.03, 0.1};
  double epsilon = 1e-5;
  bool spectral = true;
  bool flow = true;
  // Volume budgets are drawn log-uniformly from [min_budget_degrees * d(u), total/2].
  double min_budget_degrees = 4.0;
  // Flow clusters are MQI refinements of the spectral cluster found at the
  // sampled budget. When set, the reported spectral cluster is recomputed with
  // the flow cluster's volume as budget, so the two are compared at matched
  // sizes; otherwise it is the unrefined cluster itself.
  bool match_sizes = true;
};

// One row per (trial, method). Trials whose local profile finds nothing get
// a sentinel row with cluster_size 0 and NaN statistics.
struct ScatterRow {
  std::size_t trial = 0;
  std::string method;  // "spectral" or "flow"
  NodeId seed_node = 0;
  double param = 0.0;
  double budget = 0.0;
  std::optional<Cluster> cluster;
  std::optional<NicenessMetrics> niceness;  // absent for singletons and sentinels
};

struct ScatterSummary {
  std::string method;
  std::size_t clusters = 0;
  double median_conductance = 0.0;
  double median_avg_internal_spl = 0.0;
};

struct ScatterResult {
  std::vector<ScatterRow> rows;  // sorted by trial, spectral before flow
  std::vector<ScatterSummary> summary;
};

inline constexpr const char* kScatterCsvHeader =
    "method,seed_node,param,cluster_size,volume,cut,conductance,avg_internal_spl,connected,ext_int_ratio";

ScatterResult run_scatter(const Graph& g, const ScatterConfig& config);
std::vector<ScatterSummary> summarize_scatter(const std::vector<ScatterRow>& rows);
void write_scatter_csv(std::ostream& out, const std::vector<ScatterRow>& rows);

// Median of the finite entries; NaN when there are none.
double median(std::vector<double> values);

// %.17g, or "nan" / "inf" / "-inf".
std::string format_real(double x);

}  // namespace implicitreg
