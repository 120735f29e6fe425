#include "implicitreg/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "implicitreg/error.hpp"

namespace implicitreg {

namespace {

constexpr const char* kModule = "experiments";

NodeId draw(std::mt19937_64& rng, NodeId lo, NodeId hi) {
  if (hi < lo) hi = lo;
  return lo + static_cast<NodeId>(uniform_below(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

GraphFamily draw_family(std::size_t index, std::mt19937_64& rng, NodeId max_nodes) {
  const NodeId cap = std::max<NodeId>(max_nodes, 12);
  switch (index % 8) {
    case 0: return family::Path{draw(rng, 3, cap)};
    case 1: return family::Cycle{draw(rng, 3, cap)};
    case 2: return family::Complete{draw(rng, 3, std::min<NodeId>(cap, 12))};
    case 3: {
      const NodeId rows = draw(rng, 2, std::max<NodeId>(2, static_cast<NodeId>(std::sqrt(cap))));
      return family::Grid{rows, draw(rng, 2, std::max<NodeId>(2, cap / rows))};
    }
    case 4: {
      const NodeId k = draw(rng, 3, cap / 2);
      return family::Dumbbell{k, draw(rng, 1, std::min<NodeId>(3, k - 1))};
    }
    case 5: {
      const NodeId count = draw(rng, 3, 6);
      return family::RingOfCliques{count, draw(rng, 3, std::max<NodeId>(3, cap / count))};
    }
    case 6: {
      const NodeId whiskers = draw(rng, 1, 3);
      const NodeId length = draw(rng, 2, 5);
      const NodeId core = draw(rng, 8, std::max<NodeId>(8, cap - whiskers * length));
      const NodeId degree = core % 2 == 0 ? draw(rng, 3, 4) : 4;
      return family::WhiskeredExpander{core, degree, whiskers, length};
    }
    default: {
      const NodeId n = draw(rng, 8, cap);
      return family::RandomRegular{n, n % 2 == 0 ? draw(rng, 3, 4) : 4};
    }
  }
}

}  // namespace

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::mt19937_64 trial_rng(std::uint64_t master, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<SuiteGraph> generator_suite(std::size_t count, std::uint64_t seed, NodeId max_nodes) {
  if (max_nodes < 3) throw InvalidInput(kModule, "suite graphs need at least three nodes");
  std::vector<SuiteGraph> suite;
  std::mt19937_64 rng(seed);
  std::size_t index = 0;
  int failures = 0;
  while (suite.size() < count) {
    const GraphFamily fam = draw_family(index++, rng, max_nodes);
    const std::uint64_t graph_seed = rng();
    try {
      Graph g = generate(fam, graph_seed);
      if (g.num_nodes() > max_nodes || !g.is_connected()) continue;
      suite.push_back({describe(fam) + "#" + std::to_string(graph_seed % 100000), fam, graph_seed, std::move(g)});
    } catch (const Error&) {
      if (++failures > 1000) throw NumericalFailure(kModule, "generator suite keeps failing");
    }
  }
  return suite;
}

VerifyRegReport verify_reg(const Graph& g, const std::string& graph_id, const VerifyRegGrid& grid) {
  const LaplacianSpectrum spectrum = LaplacianSpectrum::of(g);
  VerifyRegReport out;
  for (double t : grid.heat_times) {
    out.rows.push_back(verify_equivalence(spectrum, g, DiffusionKind::heat_kernel(t),
                                          Regularizer::Type::GeneralizedEntropy, 2.0, graph_id));
    out.max_gap = std::max(out.max_gap, out.rows.back().frobenius_gap);
  }
  for (double gamma : grid.pagerank_gammas) {
    out.rows.push_back(
        verify_equivalence(spectrum, g, DiffusionKind::page_rank(gamma), Regularizer::Type::LogDet, 2.0, graph_id));
    out.max_gap = std::max(out.max_gap, out.rows.back().frobenius_gap);
  }
  for (int steps : grid.lazy_steps) {
    out.fits.push_back(fit_pnorm(spectrum, g, DiffusionKind::lazy_walk(grid.lazy_alpha, steps), grid.p_grid,
                                 graph_id));
    out.rows.push_back(out.fits.back().best_report);
  }
  return out;
}

void write_equivalence_csv(std::ostream& out, const std::vector<EquivalenceReport>& rows) {
  out << kEquivalenceCsvHeader << '\n';
  for (const auto& r : rows) out << to_csv_row(r) << '\n';
}

std::vector<CheegerRow> cheeger_suite(const std::vector<SuiteGraph>& suite) {
  std::vector<CheegerRow> rows(suite.size());
  parallel_for(suite.size(), [&](std::size_t i) {
    const Graph& g = suite[i].graph;
    const SpectralPartition sp = spectral_partition(g);
    CheegerRow& row = rows[i];
    row.graph_id = suite[i].id;
    row.nodes = g.num_nodes();
    row.edges = g.num_edges();
    row.lambda2 = sp.lambda2;
    row.sweep_conductance = sp.profile.best_cluster.conductance;
    // Equality is attained on complete graphs, so allow rounding slack.
    constexpr double slack = 1e-12;
    row.holds = row.lambda2 / 2.0 <= row.sweep_conductance + slack &&
                row.sweep_conductance <= std::sqrt(2.0 * row.lambda2) + slack;
  });
  return rows;
}

void write_cheeger_csv(std::ostream& out, const std::vector<CheegerRow>& rows) {
  out << kCheegerCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.graph_id << ',' << r.nodes << ',' << r.edges << ',' << format_real(r.lambda2) << ','
        << format_real(r.sweep_conductance) << ',' << format_real(r.lambda2 / 2.0) << ','
        << format_real(std::sqrt(2.0 * r.lambda2)) << ',' << (r.holds ? 1 : 0) << '\n';
  }
}

double median(std::vector<double> values) {
  std::erase_if(values, [](double x) { return !std::isfinite(x); });
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

ScatterResult run_scatter(const Graph& g, const ScatterConfig& config) {
  if (g.num_nodes() < 2 || !g.is_connected()) throw InvalidInput(kModule, "scatter needs a connected graph");
  if (config.gammas.empty()) throw InvalidInput(kModule, "scatter needs at least one gamma");
  const LocalMethod push = LocalMethod::push(config.gammas, config.epsilon);
  const std::size_t per_trial = (config.spectral ? 1 : 0) + (config.flow ? 1 : 0);
  std::vector<ScatterRow> rows(config.trials * per_trial);

  auto finish = [&](ScatterRow& row, std::optional<Cluster> cluster) {
    row.cluster = std::move(cluster);
    if (row.cluster && row.cluster->size() > 1) row.niceness = niceness_metrics(g, *row.cluster);
  };

  parallel_for(config.trials, [&](std::size_t trial) {
    std::mt19937_64 rng = trial_rng(config.seed, trial);
    const NodeId u = static_cast<NodeId>(uniform_below(rng, static_cast<std::uint64_t>(g.num_nodes())));
    const double hi = g.total_volume() / 2.0;
    const double lo = std::min(config.min_budget_degrees * g.degree(u), hi);
    const double budget = std::max(g.degree(u), lo * std::exp(uniform_unit(rng) * std::log(hi / lo)));

    const LocalResult base = local_profile(g, u, budget, push);
    std::optional<Cluster> flow;
    if (base.cluster) flow = mqi_refine(g, base.cluster->members).cluster;

    // Size matching: rebuild the spectral cluster with the flow cluster's
    // volume as the budget, so both methods are compared at the same scale.
    LocalResult spectral = base;
    if (config.match_sizes && flow) {
      spectral = flow->volume >= g.degree(u) ? local_profile(g, u, flow->volume, push) : LocalResult{};
    }

    std::size_t slot = trial * per_trial;
    auto param_of = [](const LocalResult& r) {
      return r.cluster ? r.param : std::numeric_limits<double>::quiet_NaN();
    };
    if (config.spectral) {
      ScatterRow& row = rows[slot++];
      row = {trial, "spectral", u, param_of(spectral), budget, {}, {}};
      finish(row, spectral.cluster);
    }
    if (config.flow) {
      ScatterRow& row = rows[slot++];
      row = {trial, "flow", u, param_of(base), budget, {}, {}};
      finish(row, flow);
    }
  });

  ScatterResult out;
  out.rows = std::move(rows);
  out.summary = summarize_scatter(out.rows);
  return out;
}

std::vector<ScatterSummary> summarize_scatter(const std::vector<ScatterRow>& rows) {
  std::vector<ScatterSummary> out;
  for (const char* method : {"spectral", "flow"}) {
    ScatterSummary s{method, 0, 0.0, 0.0};
    std::vector<double> phi;
    std::vector<double> spl;
    for (const auto& r : rows) {
      if (r.method != method || !r.cluster) continue;
      ++s.clusters;
      phi.push_back(r.cluster->conductance);
      if (r.niceness) spl.push_back(r.niceness->avg_internal_spl);
    }
    if (s.clusters == 0 && std::none_of(rows.begin(), rows.end(), [&](const auto& r) { return r.method == method; })) {
      continue;
    }
    s.median_conductance = median(phi);
    s.median_avg_internal_spl = median(spl);
    out.push_back(s);
  }
  return out;
}

void write_scatter_csv(std::ostream& out, const std::vector<ScatterRow>& rows) {
  const std::string nan = format_real(std::numeric_limits<double>::quiet_NaN());
  out << kScatterCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.method << ',' << r.seed_node << ',' << format_real(r.param) << ',';
    if (!r.cluster) {
      out << "0," << nan << ',' << nan << ',' << nan << ',' << nan << ",0," << nan << '\n';
      continue;
    }
    const Cluster& c = *r.cluster;
    out << c.size() << ',' << format_real(c.volume) << ',' << format_real(c.cut_weight) << ','
        << format_real(c.conductance) << ',';
    if (r.niceness) {
      out << format_real(r.niceness->avg_internal_spl) << ',' << (r.niceness->connected ? 1 : 0) << ','
          << format_real(r.niceness->ext_int_ratio) << '\n';
    } else {
      out << nan << ",1," << nan << '\n';
    }
  }
}

}  // namespace implicitreg
