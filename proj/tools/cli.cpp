#include "cli.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "implicitreg/diffusion.hpp"
#include "implicitreg/error.hpp"
#include "implicitreg/experiments.hpp"
#include "implicitreg/generators.hpp"
#include "implicitreg/graph.hpp"
#include "implicitreg/local_clustering.hpp"
#include "implicitreg/partitioning.hpp"
#include "implicitreg/regularization.hpp"

#ifndef IMPLICITREG_VERSION
#define IMPLICITREG_VERSION "unknown"
#endif

namespace implicitreg::cli {

namespace {

using Json = nlohmann::ordered_json;
constexpr const char* kModule = "cli";

struct Common {
  std::string graph;
  std::string out;
  std::uint64_t seed = 0;
  std::optional<double> tol;
};

struct GenParams {
  std::string family;
  long n = 0, k = 0, b = 0, rows = 0, cols = 0, count = 0, size = 0, core = 0, degree = 0, whiskers = 0, length = 0;
};

struct LoadedGraph {
  Graph graph;
  std::vector<NodeId> old_id;
  bool remapped = false;
};

NodeId as_node(long v, const char* name) {
  if (v <= 0 || v > std::numeric_limits<NodeId>::max()) {
    throw InvalidInput(kModule, std::string("generator parameter --") + name + " must be a positive integer");
  }
  return static_cast<NodeId>(v);
}

GraphFamily family_of(const GenParams& p) {
  const std::string& f = p.family;
  if (f == "path") return family::Path{as_node(p.n, "n")};
  if (f == "cycle") return family::Cycle{as_node(p.n, "n")};
  if (f == "complete") return family::Complete{as_node(p.n, "n")};
  if (f == "grid") return family::Grid{as_node(p.rows, "rows"), as_node(p.cols, "cols")};
  if (f == "dumbbell") return family::Dumbbell{as_node(p.k, "k"), as_node(p.b, "b")};
  if (f == "ring") return family::RingOfCliques{as_node(p.count, "count"), as_node(p.size, "size")};
  if (f == "whiskered") {
    return family::WhiskeredExpander{as_node(p.core, "core"), as_node(p.degree, "degree"),
                                     as_node(p.whiskers, "whiskers"), as_node(p.length, "length")};
  }
  if (f == "regular") return family::RandomRegular{as_node(p.n, "n"), as_node(p.degree, "degree")};
  throw InvalidInput(kModule, "unknown family '" + f +
                                  "' (path, cycle, complete, grid, dumbbell, ring, whiskered, regular)");
}

// "gen:<family>:key=value,key=value[:seed]" or an edge-list path.
LoadedGraph load_graph(const std::string& source) {
  if (source.empty()) throw InvalidInput(kModule, "--graph is required");
  if (source.rfind("gen:", 0) == 0) {
    std::stringstream ss(source.substr(4));
    std::string name, params, seed;
    std::getline(ss, name, ':');
    std::getline(ss, params, ':');
    std::getline(ss, seed);
    GenParams p;
    p.family = name;
    std::map<std::string, long*> slots{{"n", &p.n},         {"k", &p.k},         {"b", &p.b},
                                       {"rows", &p.rows},   {"cols", &p.cols},   {"count", &p.count},
                                       {"size", &p.size},   {"core", &p.core},   {"degree", &p.degree},
                                       {"whiskers", &p.whiskers}, {"length", &p.length}};
    std::stringstream ps(params);
    for (std::string kv; std::getline(ps, kv, ',');) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || !slots.count(kv.substr(0, eq))) {
        throw InvalidInput(kModule, "bad generator parameter '" + kv + "'");
      }
      try {
        *slots[kv.substr(0, eq)] = std::stol(kv.substr(eq + 1));
      } catch (const std::exception&) {
        throw InvalidInput(kModule, "bad generator parameter '" + kv + "'");
      }
    }
    const std::uint64_t s = seed.empty() ? 0 : std::stoull(seed);
    LoadedGraph out{generate(family_of(p), s), {}, false};
    out.old_id.resize(static_cast<std::size_t>(out.graph.num_nodes()));
    std::iota(out.old_id.begin(), out.old_id.end(), 0);
    return out;
  }
  const Graph raw = load_edge_list_file(source);
  PreprocessResult pre = preprocess(raw);
  LoadedGraph out{std::move(pre.graph), std::move(pre.old_id), false};
  out.remapped = out.graph.num_nodes() != raw.num_nodes();
  return out;
}

std::ofstream open_out(const std::string& path) {
  if (path.empty()) throw InvalidInput(kModule, "--out is required");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidInput(kModule, "cannot open '" + path + "' for writing");
  return f;
}

template <class Fn>
void write_file(const std::string& path, Fn&& fn) {
  std::ofstream f = open_out(path);
  fn(f);
  if (!f) throw InvalidInput(kModule, "failed writing '" + path + "'");
}

Json graph_json(const std::string& source, const Graph& g) {
  return Json{{"source", source}, {"fingerprint", g.fingerprint()}, {"nodes", g.num_nodes()},
              {"edges", g.num_edges()}};
}

// Manifest next to the primary output, plus the id map when ids changed.
void finish(const std::string& command, const Common& common, const LoadedGraph* lg, Json parameters,
            std::vector<std::string> outputs) {
  if (lg && lg->remapped) {
    const std::string map_path = common.out + ".idmap.csv";
    write_file(map_path, [&](std::ostream& f) { write_id_map(f, lg->old_id); });
    outputs.push_back(map_path);
  }
  Json m;
  m["artifact"] = "implicitreg";
  m["version"] = IMPLICITREG_VERSION;
  m["command"] = command;
  if (lg) m["graph"] = graph_json(common.graph, lg->graph);
  m["seed"] = common.seed;
  m["tol"] = common.tol ? Json(*common.tol) : Json(nullptr);
  m["dense_limit"] = default_dense_limit();
  m["parameters"] = std::move(parameters);
  m["outputs"] = outputs;
  write_file(common.out + ".manifest.json", [&](std::ostream& f) { f << m.dump(2) << '\n'; });
}

void add_common(CLI::App* sub, Common& c, bool needs_graph) {
  auto* g = sub->add_option("--graph", c.graph, "edge-list path or gen:<family>:<k=v,...>[:seed]");
  if (needs_graph) g->required();
  sub->add_option("--out", c.out, "output file")->required();
  sub->add_option("--seed", c.seed, "rng seed");
  sub->add_option("--tol", c.tol, "tolerance override");
}

SeedDistribution seed_from(const Graph& g, const std::vector<NodeId>& nodes, const std::string& vector_path) {
  if (!vector_path.empty()) return SeedDistribution::from_vector(read_vector_file(vector_path));
  if (nodes.empty()) throw InvalidInput(kModule, "give --seed-nodes or --seed-vector");
  for (NodeId u : nodes) {
    if (u < 0 || u >= g.num_nodes()) throw InvalidInput(kModule, "seed node out of range");
  }
  return SeedDistribution::uniform_over(g.num_nodes(), nodes);
}

std::vector<NodeId> read_node_list(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidInput(kModule, "cannot open '" + path + "'");
  std::vector<NodeId> nodes;
  for (long v; f >> v;) nodes.push_back(static_cast<NodeId>(v));
  if (!f.eof()) throw InvalidInput(kModule, "'" + path + "' is not a list of node ids");
  return nodes;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Implicit regularization in spectral graph algorithms", "implicitreg"};
  app.require_subcommand(1);
  app.set_version_flag("--version", IMPLICITREG_VERSION);

  Common common;

  // gen
  GenParams gp;
  auto* gen = app.add_subcommand("gen", "generate a synthetic graph as an edge list");
  add_common(gen, common, false);
  gen->add_option("--family", gp.family, "path|cycle|complete|grid|dumbbell|ring|whiskered|regular")->required();
  gen->add_option("--n", gp.n);
  gen->add_option("--k", gp.k, "clique size (dumbbell)");
  gen->add_option("--b", gp.b, "bridges (dumbbell)");
  gen->add_option("--rows", gp.rows);
  gen->add_option("--cols", gp.cols);
  gen->add_option("--count", gp.count, "cliques (ring)");
  gen->add_option("--size", gp.size, "clique size (ring)");
  gen->add_option("--core", gp.core, "core nodes (whiskered)");
  gen->add_option("--degree", gp.degree);
  gen->add_option("--whiskers", gp.whiskers);
  gen->add_option("--length", gp.length, "whisker length");

  // eigen
  std::string solver = "dense";
  int iters = 10000;
  std::string vector_out;
  auto* eigen = app.add_subcommand("eigen", "lambda_2 and v_2 of the normalized Laplacian");
  add_common(eigen, common, true);
  eigen->add_option("--solver", solver)->check(CLI::IsMember({"dense", "power"}));
  eigen->add_option("--iters", iters, "power-method iteration cap");
  eigen->add_option("--vector-out", vector_out, "write v_2 here");

  // diffuse
  std::string dynamics, mode = "exact", seed_vector;
  std::vector<NodeId> seed_nodes;
  double t = 1.0, gamma = 0.1, alpha = 0.5, epsilon = 1e-4;
  int steps = 10, terms = 60;
  auto* diffuse = app.add_subcommand("diffuse", "run a diffusion from a seed");
  add_common(diffuse, common, true);
  diffuse->add_option("--dynamics", dynamics)->required()->check(
      CLI::IsMember({"heat", "pagerank", "lazy", "push", "truncwalk"}));
  diffuse->add_option("--mode", mode, "heat: exact|series, pagerank: exact|richardson")
      ->check(CLI::IsMember({"exact", "series", "richardson"}));
  diffuse->add_option("--t", t);
  diffuse->add_option("--terms", terms, "series terms");
  diffuse->add_option("--gamma", gamma);
  diffuse->add_option("--alpha", alpha);
  diffuse->add_option("--steps", steps);
  diffuse->add_option("--epsilon", epsilon);
  diffuse->add_option("--seed-nodes", seed_nodes)->delimiter(',');
  diffuse->add_option("--seed-vector", seed_vector);

  // sweep
  std::string vector_in, ordering = "sqrt-degree";
  auto* sweep = app.add_subcommand("sweep", "sweep cut over a node vector");
  add_common(sweep, common, true);
  sweep->add_option("--vector", vector_in)->required();
  sweep->add_option("--ordering", ordering)->check(CLI::IsMember({"raw", "sqrt-degree", "degree"}));

  // local
  std::string local_method = "push";
  NodeId node = 0;
  double budget = 0.0;
  std::vector<double> gammas = LocalMethod::default_gamma_grid();
  std::vector<double> kappas = {0.1, 0.3, 0.5, 0.7, 0.9};
  std::vector<double> walk_steps = {2, 4, 8, 16};
  double local_epsilon = 0.0;
  auto* local = app.add_subcommand("local", "best local cluster around a node");
  add_common(local, common, true);
  local->add_option("--node", node)->required();
  local->add_option("--budget", budget, "volume budget k")->required();
  local->add_option("--method", local_method)->check(CLI::IsMember({"push", "mov", "truncwalk"}));
  local->add_option("--gammas", gammas)->delimiter(',');
  local->add_option("--kappas", kappas)->delimiter(',');
  local->add_option("--steps", walk_steps)->delimiter(',');
  local->add_option("--alpha", alpha);
  local->add_option("--epsilon", local_epsilon, "0 selects the method default");

  // mqi
  std::vector<NodeId> side_nodes;
  std::string side_file, history_out;
  auto* mqi = app.add_subcommand("mqi", "max-flow quotient refinement of a side");
  add_common(mqi, common, true);
  mqi->add_option("--nodes", side_nodes)->delimiter(',');
  mqi->add_option("--side", side_file, "file with node ids");
  mqi->add_option("--history", history_out, "write the quotient sequence here");

  // verify-reg
  VerifyRegGrid grid;
  auto* verify = app.add_subcommand("verify-reg", "diffusions against regularized SDP optima");
  add_common(verify, common, true);
  verify->add_option("--t", grid.heat_times)->delimiter(',');
  verify->add_option("--gamma", grid.pagerank_gammas)->delimiter(',');
  verify->add_option("--alpha", grid.lazy_alpha);
  verify->add_option("--steps", grid.lazy_steps)->delimiter(',');
  verify->add_option("--p-grid", grid.p_grid)->delimiter(',');

  // scatter
  ScatterConfig scatter_cfg;
  bool unmatched = false;
  auto* scatter = app.add_subcommand("scatter", "spectral vs flow local clusters");
  add_common(scatter, common, true);
  scatter->add_option("--trials", scatter_cfg.trials);
  scatter->add_option("--gammas", scatter_cfg.gammas)->delimiter(',');
  scatter->add_option("--epsilon", scatter_cfg.epsilon);
  scatter->add_flag("--unmatched", unmatched, "report the unrefined spectral cluster instead of a size-matched one");

  // cheeger-suite
  std::size_t suite_count = 50;
  NodeId max_nodes = 60;
  auto* cheeger = app.add_subcommand("cheeger-suite", "Cheeger bounds on a generated suite");
  add_common(cheeger, common, false);
  cheeger->add_option("--count", suite_count);
  cheeger->add_option("--max-nodes", max_nodes);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (gen->parsed()) {
      const GraphFamily fam = family_of(gp);
      const Graph g = generate(fam, common.seed);
      write_file(common.out, [&](std::ostream& f) { write_edge_list(f, g); });
      LoadedGraph lg{g, {}, false};
      common.graph = describe(fam);
      finish("gen", common, &lg, Json{{"family", describe(fam)}}, {common.out});
    } else if (eigen->parsed()) {
      const LoadedGraph lg = load_graph(common.graph);
      const Graph& g = lg.graph;
      double lambda2 = 0.0;
      NodeVector v2;
      int used = 0;
      bool converged = true;
      if (solver == "dense") {
        const SpectralDecomposition eig = dense_eigendecompose(g, MatrixKind::normalized_laplacian());
        if (g.num_nodes() < 2) throw InvalidInput(kModule, "graph has a single node");
        lambda2 = eig.eigenvalues[1];
        v2.assign(eig.eigenvectors.col(1).data(), eig.eigenvectors.col(1).data() + g.num_nodes());
      } else {
        const PowerMethodReport rep =
            power_method(g, PowerTarget::SecondOfNormalizedLaplacian, random_sign_vector(g.num_nodes(), common.seed),
                         iters, common.tol.value_or(kPowerMethodTol));
        lambda2 = rep.eigenvalue;
        v2 = rep.vector;
        used = rep.iterations;
        converged = rep.converged;
      }
      write_file(common.out, [&](std::ostream& f) {
        f << "solver,lambda2,iterations,converged\n"
          << solver << ',' << format_real(lambda2) << ',' << used << ',' << (converged ? 1 : 0) << '\n';
      });
      std::vector<std::string> outputs{common.out};
      if (!vector_out.empty()) {
        write_file(vector_out, [&](std::ostream& f) { write_vector(f, v2); });
        outputs.push_back(vector_out);
      }
      out << "lambda2=" << format_real(lambda2) << '\n';
      finish("eigen", common, &lg, Json{{"solver", solver}, {"iters", iters}}, outputs);
    } else if (diffuse->parsed()) {
      const LoadedGraph lg = load_graph(common.graph);
      const Graph& g = lg.graph;
      const SeedDistribution seed = seed_from(g, seed_nodes, seed_vector);
      NodeVector result;
      Json params{{"dynamics", dynamics}};
      if (dynamics == "heat") {
        if (mode == "richardson") throw InvalidInput(kModule, "heat supports --mode exact|series");
        result = mode == "series" ? heat_kernel_series(g, t, seed.values(), terms)
                                  : heat_kernel_exact(g, t, seed.values());
        params["mode"] = mode;
        params["t"] = t;
        if (mode == "series") params["terms"] = terms;
      } else if (dynamics == "pagerank") {
        if (mode == "series") throw InvalidInput(kModule, "pagerank supports --mode exact|richardson");
        result = mode == "richardson" ? pagerank_richardson(g, gamma, seed.values(), common.tol.value_or(kRichardsonTol))
                                      : pagerank_exact(g, gamma, seed.values());
        params["mode"] = mode;
        params["gamma"] = gamma;
      } else if (dynamics == "lazy") {
        result = lazy_walk(g, alpha, steps, seed.values());
        params["alpha"] = alpha;
        params["steps"] = steps;
      } else if (dynamics == "push") {
        const PushState s = push_ppr(g, seed, gamma, epsilon);
        result = s.p;
        params["gamma"] = gamma;
        params["epsilon"] = epsilon;
        out << "pushes=" << s.pushes << " touched=" << s.touched_count << '\n';
      } else {
        const TruncatedWalk w = truncated_walk(g, seed, alpha, steps, epsilon);
        result = w.q;
        params["alpha"] = alpha;
        params["steps"] = steps;
        params["epsilon"] = epsilon;
        out << "lost_mass=" << format_real(w.lost_mass) << '\n';
      }
      params["seed_nodes"] = seed_nodes;
      params["seed_vector"] = seed_vector;
      write_file(common.out, [&](std::ostream& f) { write_vector(f, result); });
      finish("diffuse", common, &lg, params, {common.out});
    } else if (sweep->parsed()) {
      const LoadedGraph lg = load_graph(common.graph);
      const NodeVector x = read_vector_file(vector_in);
      const SweepOrdering ord = ordering == "raw"      ? SweepOrdering::Raw
                                : ordering == "degree" ? SweepOrdering::Degree
                                                       : SweepOrdering::SqrtDegree;
      const SweepProfile prof = sweep_cut(lg.graph, x, ord);
      write_file(common.out, [&](std::ostream& f) {
        f << "size,node,conductance\n";
        for (std::size_t k = 0; k < prof.prefix_conductance.size(); ++k) {
          f << k + 1 << ',' << prof.order[k] << ',' << format_real(prof.prefix_conductance[k]) << '\n';
        }
      });
      out << "best_size=" << prof.best_prefix + 1 << " conductance=" << format_real(prof.best_cluster.conductance)
          << '\n';
      finish("sweep", common, &lg, Json{{"vector", vector_in}, {"ordering", ordering}}, {common.out});
    } else if (local->parsed()) {
      const LoadedGraph lg = load_graph(common.graph);
      const Graph& g = lg.graph;
      LocalMethod method = local_method == "push" ? LocalMethod::push(gammas, local_epsilon)
                           : local_method == "mov" ? LocalMethod::mov(kappas)
                                                   : LocalMethod::truncated_walk(alpha, walk_steps, local_epsilon);
      const LocalResult res = local_profile(g, node, budget, method);
      ScatterRow row{0, local_method, node, res.cluster ? res.param : std::numeric_limits<double>::quiet_NaN(),
                     budget, res.cluster, std::nullopt};
      if (res.cluster && res.cluster->size() > 1) row.niceness = niceness_metrics(g, *res.cluster);
      write_file(common.out, [&](std::ostream& f) { write_scatter_csv(f, {row}); });
      if (res.cluster) {
        out << "conductance=" << format_real(res.cluster->conductance) << " size=" << res.cluster->size() << '\n';
      } else {
        out << "no cluster containing node " << node << " within the budget\n";
      }
      finish("local", common, &lg,
             Json{{"node", node}, {"budget", budget}, {"method", local_method}, {"grid", method.grid},
                  {"epsilon", method.epsilon}, {"alpha", method.alpha}},
             {common.out});
    } else if (mqi->parsed()) {
      const LoadedGraph lg = load_graph(common.graph);
      std::vector<NodeId> side = side_file.empty() ? side_nodes : read_node_list(side_file);
      const MqiResult res = mqi_refine(lg.graph, side);
      ScatterRow row{0, "mqi", -1, std::numeric_limits<double>::quiet_NaN(), 0.0, res.cluster, std::nullopt};
      if (res.cluster.size() > 1) row.niceness = niceness_metrics(lg.graph, res.cluster);
      write_file(common.out, [&](std::ostream& f) { write_scatter_csv(f, {row}); });
      std::vector<std::string> outputs{common.out};
      if (!history_out.empty()) {
        write_file(history_out, [&](std::ostream& f) {
          f << "iteration,quotient\n";
          for (std::size_t i = 0; i < res.quotient_history.size(); ++i) {
            f << i << ',' << format_real(res.quotient_history[i]) << '\n';
          }
        });
        outputs.push_back(history_out);
      }
      out << "conductance=" << format_real(res.cluster.conductance) << " iterations=" << res.iterations << '\n';
      finish("mqi", common, &lg, Json{{"side", side}}, outputs);
    } else if (verify->parsed()) {
      const LoadedGraph lg = load_graph(common.graph);
      const double threshold = common.tol.value_or(kEquivalencePassGap);
      const VerifyRegReport rep = verify_reg(lg.graph, lg.graph.fingerprint(), grid);
      write_file(common.out, [&](std::ostream& f) { write_equivalence_csv(f, rep.rows); });
      out << "max_gap=" << format_real(rep.max_gap) << " threshold=" << format_real(threshold)
          << " status=" << (rep.max_gap <= threshold ? "pass" : "fail") << '\n';
      for (const PNormFit& fit : rep.fits) {
        out << fit.best_report.diffusion.label() << " best_fit_p=" << format_real(fit.p_grid[fit.best])
            << " gap=" << format_real(fit.gaps[fit.best]) << (fit.unimodal() ? "" : " (not unimodal)") << '\n';
      }
      finish("verify-reg", common, &lg,
             Json{{"t", grid.heat_times}, {"gamma", grid.pagerank_gammas}, {"alpha", grid.lazy_alpha},
                  {"steps", grid.lazy_steps}, {"p_grid", grid.p_grid}, {"threshold", threshold}},
             {common.out});
    } else if (scatter->parsed()) {
      const LoadedGraph lg = load_graph(common.graph);
      scatter_cfg.seed = common.seed;
      scatter_cfg.match_sizes = !unmatched;
      const ScatterResult res = run_scatter(lg.graph, scatter_cfg);
      write_file(common.out, [&](std::ostream& f) { write_scatter_csv(f, res.rows); });
      Json summary = Json::array();
      for (const ScatterSummary& s : res.summary) {
        out << s.method << ": clusters=" << s.clusters << " median_conductance=" << format_real(s.median_conductance)
            << " median_avg_internal_spl=" << format_real(s.median_avg_internal_spl) << '\n';
        summary.push_back(Json{{"method", s.method}, {"clusters", s.clusters},
                               {"median_conductance", format_real(s.median_conductance)},
                               {"median_avg_internal_spl", format_real(s.median_avg_internal_spl)}});
      }
      finish("scatter", common, &lg,
             Json{{"trials", scatter_cfg.trials}, {"gammas", scatter_cfg.gammas}, {"epsilon", scatter_cfg.epsilon},
                  {"match_sizes", scatter_cfg.match_sizes}, {"min_budget_degrees", scatter_cfg.min_budget_degrees},
                  {"summary", summary}},
             {common.out});
    } else if (cheeger->parsed()) {
      const auto suite = generator_suite(suite_count, common.seed, max_nodes);
      const auto rows = cheeger_suite(suite);
      write_file(common.out, [&](std::ostream& f) { write_cheeger_csv(f, rows); });
      const auto violations = std::count_if(rows.begin(), rows.end(), [](const CheegerRow& r) { return !r.holds; });
      out << "graphs=" << rows.size() << " violations=" << violations << '\n';
      finish("cheeger-suite", common, nullptr, Json{{"count", suite_count}, {"max_nodes", max_nodes}}, {common.out});
    }
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace implicitreg::cli
