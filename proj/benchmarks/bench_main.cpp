#include <benchmark/benchmark.h>

#include <vector>

#include "implicitreg/diffusion.hpp"
#include "implicitreg/generators.hpp"
#include "implicitreg/local_clustering.hpp"
#include "implicitreg/max_flow.hpp"
#include "implicitreg/partitioning.hpp"
#include "implicitreg/regularization.hpp"

namespace ir = implicitreg;

namespace {

ir::Graph expander(ir::NodeId n) { return ir::generate(ir::family::RandomRegular{n, 4}, 1); }

void BM_ApplyNormalizedLaplacian(benchmark::State& state) {
  const ir::Graph g = expander(static_cast<ir::NodeId>(state.range(0)));
  const ir::NodeVector x = ir::random_sign_vector(g.num_nodes(), 3);
  ir::NodeVector out(x.size());
  for (auto _ : state) {
    ir::apply_matrix(g, ir::MatrixKind::normalized_laplacian(), x, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.num_edges()));
}
BENCHMARK(BM_ApplyNormalizedLaplacian)->RangeMultiplier(8)->Range(1 << 10, 1 << 19);

void BM_PushPpr(benchmark::State& state) {
  const ir::Graph g = ir::generate(ir::family::WhiskeredExpander{5000, 3, 100, 10}, 5);
  const auto seed = ir::SeedDistribution::indicator(g.num_nodes(), g.num_nodes() - 1);
  const double eps = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) {
    auto st = ir::push_ppr(g, seed, 0.1, eps);
    benchmark::DoNotOptimize(st.pushes);
  }
}
BENCHMARK(BM_PushPpr)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_PagerankRichardson(benchmark::State& state) {
  const ir::Graph g = expander(static_cast<ir::NodeId>(state.range(0)));
  const auto seed = ir::SeedDistribution::indicator(g.num_nodes(), 0);
  for (auto _ : state) {
    auto x = ir::pagerank_richardson(g, 0.15, seed.values());
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK(BM_PagerankRichardson)->Arg(1 << 12)->Arg(1 << 15);

void BM_MqiOnSweepCluster(benchmark::State& state) {
  const ir::Graph g = ir::generate(ir::family::WhiskeredExpander{static_cast<ir::NodeId>(state.range(0)), 3, 20, 5}, 7);
  const auto part = ir::spectral_partition(g);
  for (auto _ : state) {
    auto r = ir::mqi_refine(g, part.profile.best_cluster.members);
    benchmark::DoNotOptimize(r.iterations);
  }
}
BENCHMARK(BM_MqiOnSweepCluster)->Arg(200)->Arg(1000);

void BM_MaxFlowLayered(benchmark::State& state) {
  // Layered random network: source -> layers of width w -> sink.
  const int width = static_cast<int>(state.range(0));
  const int layers = 20;
  ir::FlowNetwork net;
  net.num_nodes = width * layers + 2;
  net.source = width * layers;
  net.sink = net.source + 1;
  std::uint64_t x = 88172645463325252ULL;
  auto next = [&] {
    x ^= x << 13;
    x ^= x >> 7;
    x ^= x << 17;
    return x;
  };
  for (int i = 0; i < width; ++i) {
    net.add_arc(net.source, i, 1000);
    net.add_arc((layers - 1) * width + i, net.sink, 1000);
  }
  for (int l = 0; l + 1 < layers; ++l) {
    for (int i = 0; i < width; ++i) {
      for (int k = 0; k < 4; ++k) {
        net.add_arc(l * width + i, (l + 1) * width + static_cast<int>(next() % width),
                    1 + static_cast<std::int64_t>(next() % 100));
      }
    }
  }
  for (auto _ : state) {
    auto r = ir::max_flow(net);
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(BM_MaxFlowLayered)->Arg(50)->Arg(500);

void BM_ClosedFormEntropy(benchmark::State& state) {
  const ir::Graph g = expander(static_cast<ir::NodeId>(state.range(0)));
  const auto spectrum = ir::LaplacianSpectrum::of(g);
  for (auto _ : state) {
    auto s = ir::solve_regularized_sdp(spectrum, ir::Regularizer::entropy(1.0));
    benchmark::DoNotOptimize(s.objective);
  }
}
BENCHMARK(BM_ClosedFormEntropy)->Arg(40)->Arg(200);

}  // namespace

BENCHMARK_MAIN();
