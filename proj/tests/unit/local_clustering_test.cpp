#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "../support/oracles.hpp"
#include "implicitreg/diffusion.hpp"
#include "implicitreg/error.hpp"
#include "implicitreg/generators.hpp"
#include "implicitreg/local_clustering.hpp"

namespace ir = implicitreg;
using ir::Graph;
using ir::NodeId;
using ir::SeedDistribution;

namespace {

Graph single_edge() {
  const std::vector<ir::Edge> e{{0, 1, 1.0}};
  return Graph::from_edges(2, e);
}

Eigen::VectorXd seed_direction(const Graph& g, const SeedDistribution& s) {
  Eigen::VectorXd w(g.num_nodes());
  for (NodeId i = 0; i < g.num_nodes(); ++i) w[i] = std::sqrt(g.degree(i)) * s[i];
  const Eigen::VectorXd u = oracle::degrees(g).cwiseSqrt().normalized();
  w -= u.dot(w) * u;
  return w.normalized();
}

}  // namespace

TEST(Push, IneligibleSeedDoesNothing) {
  const Graph g = ir::generate(ir::family::Dumbbell{3, 1});
  const auto s = ir::push_ppr(g, SeedDistribution::indicator(6, 0), 0.1, 2.0);
  EXPECT_EQ(s.pushes, 0u);
  for (double v : s.p) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(s.r, SeedDistribution::indicator(6, 0).values());
}

TEST(Push, SingleEdgeConvergesToPageRank) {
  const auto s = ir::push_ppr(single_edge(), SeedDistribution::indicator(2, 0), 0.5, 1e-12);
  EXPECT_NEAR(s.p[0], 2.0 / 3.0, 1e-9);
  EXPECT_NEAR(s.p[1], 1.0 / 3.0, 1e-9);
}

TEST(Push, ConservationAtEveryPush) {
  const Graph g = ir::generate(ir::family::Dumbbell{3, 1});
  const auto seed = SeedDistribution::indicator(6, 0);
  const double gamma = 0.15;
  const Eigen::VectorXd target = oracle::pagerank(g, gamma, oracle::to_eigen(seed.values()));
  double worst = 0.0;
  std::size_t calls = 0;
  const auto final_state = ir::push_ppr(g, seed, gamma, 1e-7, [&](const ir::PushState& st, NodeId) {
    const Eigen::VectorXd lhs = oracle::to_eigen(st.p) + oracle::pagerank(g, gamma, oracle::to_eigen(st.r));
    worst = std::max(worst, (lhs - target).cwiseAbs().maxCoeff());
    for (double v : st.p) EXPECT_GE(v, 0.0);
    for (double v : st.r) EXPECT_GE(v, 0.0);
    ++calls;
  });
  EXPECT_EQ(calls, final_state.pushes);
  EXPECT_LE(worst, 1e-10);
}

TEST(Push, AccuracyWorkBoundAndTermination) {
  const std::vector<Graph> graphs{ir::generate(ir::family::RingOfCliques{6, 5}),
                                  ir::generate(ir::family::WhiskeredExpander{40, 3, 8, 5}, 4),
                                  ir::generate(ir::family::Grid{8, 9})};
  for (const Graph& g : graphs) {
    const auto seed = SeedDistribution::indicator(g.num_nodes(), 1);
    for (double gamma : {0.05, 0.2}) {
      const Eigen::VectorXd exact = oracle::pagerank(g, gamma, oracle::to_eigen(seed.values()));
      for (double eps : {1e-3, 1e-5}) {
        const auto st = ir::push_ppr(g, seed, gamma, eps);
        EXPECT_LE(static_cast<double>(st.pushes), std::ceil(1.0 / (gamma * eps)));
        for (NodeId v = 0; v < g.num_nodes(); ++v) {
          EXPECT_LE(std::abs(exact[v] - st.p[v]) / g.degree(v), eps);
          EXPECT_LT(st.r[v] / g.degree(v), eps);
        }
      }
    }
  }
}

TEST(Push, TouchedSetIsConsistent) {
  const Graph g = ir::generate(ir::family::WhiskeredExpander{100, 3, 10, 10}, 1);
  const auto st = ir::push_ppr(g, SeedDistribution::indicator(g.num_nodes(), 150), 0.1, 1e-3);
  std::size_t count = 0;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (st.touched[v]) ++count;
    if (st.p[v] != 0.0 || st.r[v] != 0.0) {
      EXPECT_TRUE(st.touched[v]);
    }
  }
  EXPECT_EQ(count, st.touched_count);
  EXPECT_LE(static_cast<double>(st.touched_count), 1.0 / (0.1 * 1e-3));
}

TEST(Push, Validation) {
  const Graph g = single_edge();
  const auto s = SeedDistribution::indicator(2, 0);
  EXPECT_THROW(ir::push_ppr(g, s, 0.0, 1e-3), ir::InvalidInput);
  EXPECT_THROW(ir::push_ppr(g, s, 1.0, 1e-3), ir::InvalidInput);
  EXPECT_THROW(ir::push_ppr(g, s, 0.5, 0.0), ir::InvalidInput);
}

TEST(TruncatedWalk, ZeroEpsilonIsBitIdenticalToLazyWalk) {
  const Graph g = ir::generate(ir::family::WhiskeredExpander{30, 3, 5, 6}, 9);
  const auto seed = SeedDistribution::indicator(g.num_nodes(), 40);
  for (int steps : {0, 1, 5, 40}) {
    const auto t = ir::truncated_walk(g, seed, 0.4, steps, 0.0);
    EXPECT_EQ(t.q, ir::lazy_walk(g, 0.4, steps, seed.values()));
  }
}

TEST(TruncatedWalk, HugeEpsilonLosesEverything) {
  const Graph g = ir::generate(ir::family::Dumbbell{3, 1});
  const auto t = ir::truncated_walk(g, SeedDistribution::indicator(6, 0), 0.5, 1, 10.0);
  for (double v : t.q) EXPECT_EQ(v, 0.0);
  EXPECT_DOUBLE_EQ(t.lost_mass, 1.0);
}

TEST(TruncatedWalk, DumbbellSupportStaysLocal) {
  const Graph g = ir::generate(ir::family::Dumbbell{3, 1});
  const auto seed = SeedDistribution::indicator(6, 0);
  // Oracle: the untruncated walk puts less than 0.01 d(v) beyond the bridge.
  const auto exact = ir::lazy_walk(g, 0.5, 3, seed.values());
  for (NodeId v : {4, 5}) ASSERT_LT(exact[v], 0.01 * g.degree(v));
  const auto t = ir::truncated_walk(g, seed, 0.5, 3, 0.01);
  EXPECT_EQ(t.q[4], 0.0);
  EXPECT_EQ(t.q[5], 0.0);
  EXPECT_GT(t.lost_mass, 0.0);
}

TEST(LocalSweep, Examples) {
  const Graph g = ir::generate(ir::family::Dumbbell{3, 1});
  const auto tri = ir::local_sweep(g, std::vector<double>{1, 1, 1, 0, 0, 0});
  EXPECT_EQ(tri.best_cluster.members, (std::vector<NodeId>{0, 1, 2}));
  EXPECT_NEAR(tri.best_cluster.conductance, 1.0 / 7.0, 1e-15);

  const auto st = ir::push_ppr(g, SeedDistribution::indicator(6, 0), 0.1, 1e-6);
  const auto prof = ir::local_sweep(g, st.p);
  EXPECT_EQ(prof.best_cluster.members, (std::vector<NodeId>{0, 1, 2}));

  const auto one = ir::local_sweep(g, std::vector<double>{0, 0, 0, 0, 0.5, 0});
  EXPECT_EQ(one.best_cluster.members, (std::vector<NodeId>{4}));
  EXPECT_DOUBLE_EQ(one.best_cluster.conductance, 1.0);

  EXPECT_THROW(ir::local_sweep(g, std::vector<double>(6, 0.0)), ir::InvalidInput);
  EXPECT_THROW(ir::local_sweep(g, std::vector<double>{1, -1, 0, 0, 0, 0}), ir::InvalidInput);
}

TEST(Mov, KappaZeroIsV2) {
  const Graph g = ir::generate(ir::family::Dumbbell{3, 1});
  const auto eig = ir::dense_eigendecompose(g, ir::MatrixKind::normalized_laplacian());
  const auto r = ir::mov_solve(g, SeedDistribution::indicator(6, 0), 0.0);
  EXPECT_FALSE(r.gamma_star.has_value());
  EXPECT_GE(std::abs(oracle::to_eigen(r.x).dot(eig.eigenvectors.col(1))), 1.0 - 1e-8);
}

TEST(Mov, KappaOneIsTheSeedDirection) {
  const Graph g = ir::generate(ir::family::Grid{3, 3});
  const auto seed = SeedDistribution::uniform_over(9, std::vector<NodeId>{0, 1});
  const auto r = ir::mov_solve(g, seed, 1.0);
  EXPECT_NEAR(oracle::to_eigen(r.x).dot(seed_direction(g, seed)), 1.0, 1e-8);
}

TEST(Mov, BindingConstraintBeatsRandomFeasiblePoints) {
  const Graph g = ir::generate(ir::family::Dumbbell{3, 1});
  const auto seed = SeedDistribution::indicator(6, 0);
  const auto r = ir::mov_solve(g, seed, 0.5);
  ASSERT_TRUE(r.gamma_star.has_value());
  const Eigen::VectorXd w = seed_direction(g, seed);
  const Eigen::VectorXd x = oracle::to_eigen(r.x);
  EXPECT_NEAR(std::pow(x.dot(w), 2), 0.5, 1e-8);
  EXPECT_LE(r.kkt_residual, 1e-8);
  const Eigen::MatrixXd l = oracle::normalized_laplacian(g);
  EXPECT_NEAR(x.dot(l * x), r.rayleigh, 1e-12);

  const Eigen::VectorXd u = oracle::degrees(g).cwiseSqrt().normalized();
  std::mt19937_64 rng(99);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 10000; ++trial) {
    Eigen::VectorXd z(6);
    for (int i = 0; i < 6; ++i) z[i] = normal(rng);
    z -= u.dot(z) * u;
    z -= w.dot(z) * w;
    z.normalize();
    const double c = std::sqrt(0.5 + 0.5 * unit(rng));
    const Eigen::VectorXd y = c * w + std::sqrt(1.0 - c * c) * z;
    EXPECT_GE(y.dot(l * y), r.rayleigh - 1e-12);
  }
}

TEST(Mov, ContinuousAlongKappaGrid) {
  const Graph g = ir::generate(ir::family::RingOfCliques{5, 4});
  const auto seed = SeedDistribution::indicator(20, 7);
  const Eigen::VectorXd w = seed_direction(g, seed);
  Eigen::VectorXd prev;
  for (int i = 0; i <= 20; ++i) {
    const double kappa = 0.05 * i;
    const auto r = ir::mov_solve(g, seed, kappa);
    const Eigen::VectorXd x = oracle::to_eigen(r.x);
    EXPECT_NEAR(x.norm(), 1.0, 1e-12);
    EXPECT_GE(x.dot(w), -1e-12);
    if (r.gamma_star) {
      EXPECT_NEAR(std::pow(x.dot(w), 2), kappa, 1e-8);
    }
    if (prev.size()) {
      EXPECT_GE(prev.dot(x), 0.0);
    }
    prev = x;
  }
}

TEST(Mov, Validation) {
  const Graph g = ir::generate(ir::family::Cycle{5});
  EXPECT_THROW(ir::mov_solve(g, SeedDistribution::indicator(5, 0), 1.5), ir::InvalidInput);
  EXPECT_THROW(ir::mov_solve(g, SeedDistribution::indicator(5, 0), -0.1), ir::InvalidInput);
}

TEST(LocalProfile, DumbbellSeedTriangle) {
  const Graph g = ir::generate(ir::family::Dumbbell{3, 1});
  const auto r = ir::local_profile(g, 0, 7.0, ir::LocalMethod::push());
  ASSERT_TRUE(r.cluster.has_value());
  EXPECT_EQ(r.cluster->members, (std::vector<NodeId>{0, 1, 2}));
  // Oracle: best conductance over sets containing 0 with volume <= 7.
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 1; mask < 63; ++mask) {
    if (!(mask & 1U) || oracle::volume(g, mask) > 7.0) continue;
    const double v = oracle::volume(g, mask);
    best = std::min(best, oracle::cut(g, mask) / std::min(v, g.total_volume() - v));
  }
  EXPECT_NEAR(r.cluster->conductance, best, 1e-15);
  EXPECT_EQ(r.grid_points, ir::LocalMethod::default_gamma_grid().size());
}

TEST(LocalProfile, RingOfCliquesFindsTheClique) {
  const Graph g = ir::generate(ir::family::RingOfCliques{8, 5});
  const NodeId u = 3 * 5 + 2;
  const auto clique = ir::conductance(g, std::vector<NodeId>{15, 16, 17, 18, 19});
  for (const auto& method : {ir::LocalMethod::push(), ir::LocalMethod::mov({0.1, 0.3, 0.5, 0.7, 0.9})}) {
    const auto r = ir::local_profile(g, u, clique.volume, method);
    ASSERT_TRUE(r.cluster.has_value()) << method.name();
    EXPECT_EQ(r.cluster->members, clique.members) << method.name();
  }
}

TEST(LocalProfile, EmptyResultIsDistinct) {
  // The seed is ineligible for every push, so no sweep ever starts.
  const Graph g = ir::generate(ir::family::Cycle{8});
  const auto r = ir::local_profile(g, 0, 4.0, ir::LocalMethod::push({0.1}, 10.0));
  EXPECT_FALSE(r.cluster.has_value());
}

TEST(LocalProfile, Validation) {
  const Graph g = ir::generate(ir::family::Dumbbell{3, 1});
  EXPECT_THROW(ir::local_profile(g, 2, 2.0, ir::LocalMethod::push()), ir::InvalidInput);
  EXPECT_THROW(ir::local_profile(g, 0, 100.0, ir::LocalMethod::push()), ir::InvalidInput);
  EXPECT_THROW(ir::local_profile(g, 9, 4.0, ir::LocalMethod::push()), ir::InvalidInput);
}

TEST(LocalMethod, DefaultGammaGrid) {
  const auto grid = ir::LocalMethod::default_gamma_grid();
  ASSERT_EQ(grid.size(), 20u);
  EXPECT_NEAR(grid.front(), 1e-4, 1e-18);
  EXPECT_NEAR(grid.back(), 0.5, 1e-15);
  for (std::size_t i = 2; i < grid.size(); ++i) EXPECT_NEAR(grid[i] / grid[i - 1], grid[1] / grid[0], 1e-12);
}
