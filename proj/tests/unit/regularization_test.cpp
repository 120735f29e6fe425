#include <gtest/gtest.h>

#include <cmath>

#include "../support/oracles.hpp"
#include "implicitreg/error.hpp"
#include "implicitreg/generators.hpp"
#include "implicitreg/regularization.hpp"

namespace ir = implicitreg;
using ir::DiffusionKind;
using ir::Graph;
using ir::Regularizer;

namespace {

Graph single_edge() {
  const std::vector<ir::Edge> e{{0, 1, 1.0}};
  return Graph::from_edges(2, e);
}

Eigen::MatrixXd complement_projector(const ir::LaplacianSpectrum& s) {
  const Eigen::Index n = s.size();
  return Eigen::MatrixXd::Identity(n, n) - s.trivial * s.trivial.transpose();
}

double entropy_of(const Eigen::VectorXd& w) {
  double h = 0.0;
  for (double x : w) {
    if (x > 0.0) h -= x * std::log(x);
  }
  return h;
}

}  // namespace

TEST(UnregularizedSdp, SingleEdge) {
  const auto sol = ir::solve_unregularized_sdp(single_edge());
  EXPECT_NEAR(sol.objective, 2.0, 1e-12);
  EXPECT_FALSE(sol.degenerate);
}

TEST(UnregularizedSdp, DumbbellIsRankOne) {
  const Graph g = ir::generate(ir::family::Dumbbell{3, 1});
  const auto sol = ir::solve_unregularized_sdp(g);
  EXPECT_NEAR(sol.objective, oracle::eigenvalues(oracle::normalized_laplacian(g))[1], 1e-12);
  EXPECT_EQ(sol.lambda2_multiplicity, 1);
  const auto rank_one = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sol.x.matrix()).eigenvalues();
  EXPECT_NEAR(rank_one[5], 1.0, 1e-12);
  EXPECT_NEAR(rank_one[4], 0.0, 1e-12);
}

TEST(UnregularizedSdp, CycleIsDegenerate) {
  const auto spectrum = ir::LaplacianSpectrum::of(ir::generate(ir::family::Cycle{4}));
  const auto sol = ir::solve_unregularized_sdp(spectrum);
  EXPECT_TRUE(sol.degenerate);
  EXPECT_EQ(sol.lambda2_multiplicity, 2);
  EXPECT_NEAR(sol.objective, 1.0, 1e-12);
  EXPECT_NEAR(sol.x.matrix().trace(), 1.0, 1e-12);
}

TEST(RegularizedSdp, SingleEdgeAnyRegularizer) {
  const auto spectrum = ir::LaplacianSpectrum::of(single_edge());
  for (const auto& reg : {Regularizer::entropy(0.3), Regularizer::log_det(4.0), Regularizer::p_norm(3.0, 2.0)}) {
    const auto sol = ir::solve_regularized_sdp(spectrum, reg);
    EXPECT_LE((sol.x.matrix() - complement_projector(spectrum)).norm(), 1e-12);
  }
}

TEST(RegularizedSdp, EntropyAtSmallEtaIsUniform) {
  const Graph g = ir::generate(ir::family::Grid{3, 3});
  const auto spectrum = ir::LaplacianSpectrum::of(g);
  const auto sol = ir::solve_regularized_sdp(spectrum, Regularizer::entropy(1e-6));
  const Eigen::MatrixXd uniform = complement_projector(spectrum) / 8.0;
  EXPECT_LE((sol.x.matrix() - uniform).norm(), 1e-5);
  const auto pg = ir::solve_regularized_sdp_numerically(spectrum, Regularizer::entropy(1e-6));
  EXPECT_LE((pg.solution.matrix() - uniform).norm(), 1e-5);
}

TEST(RegularizedSdp, ClosedFormsMatchProjectedGradient) {
  const std::vector<Graph> graphs{ir::generate(ir::family::Dumbbell{3, 1}),
                                  ir::generate(ir::family::RandomRegular{12, 3}, 5),
                                  ir::generate(ir::family::WhiskeredExpander{8, 3, 2, 3}, 2)};
  for (const Graph& g : graphs) {
    const auto spectrum = ir::LaplacianSpectrum::of(g);
    for (const auto& reg : {Regularizer::entropy(10.0), Regularizer::entropy(0.5), Regularizer::log_det(3.0),
                            Regularizer::p_norm(2.0, 4.0), Regularizer::p_norm(1.5, 2.0)}) {
      const auto closed = ir::solve_regularized_sdp(spectrum, reg);
      const auto pg = ir::solve_regularized_sdp_numerically(spectrum, reg);
      EXPECT_LE((closed.x.matrix() - pg.solution.matrix()).norm(), 1e-5) << reg.name() << " eta=" << reg.eta;
      // The closed form is optimal for the unsmoothed objective.
      EXPECT_LE(closed.objective, ir::regularized_objective_value(spectrum, reg, pg.solution.matrix()) + 1e-12);
    }
  }
}

TEST(RegularizedSdp, DumbbellEntropyEtaTen) {
  const auto spectrum = ir::LaplacianSpectrum::of(ir::generate(ir::family::Dumbbell{3, 1}));
  const auto closed = ir::solve_regularized_sdp(spectrum, Regularizer::entropy(10.0));
  const auto pg = ir::solve_regularized_sdp_numerically(spectrum, Regularizer::entropy(10.0));
  EXPECT_LE((closed.x.matrix() - pg.solution.matrix()).norm(), 1e-6);
}

TEST(RegularizedSdp, KktOfLogDet) {
  // mu_i (lambda_i + nu) eta = 1 for every weight.
  const auto spectrum = ir::LaplacianSpectrum::of(ir::generate(ir::family::RingOfCliques{4, 4}));
  const auto sol = ir::solve_regularized_sdp(spectrum, Regularizer::log_det(2.5));
  for (Eigen::Index i = 0; i < sol.weights.size(); ++i) {
    EXPECT_NEAR(sol.weights[i] * 2.5 * (spectrum.values[i] + sol.multiplier), 1.0, 1e-10);
  }
  EXPECT_NEAR(sol.weights.sum(), 1.0, 1e-12);
}

TEST(RegularizedSdp, EntropyPathIsMonotone) {
  const auto spectrum = ir::LaplacianSpectrum::of(ir::generate(ir::family::RandomRegular{18, 3}, 6));
  double last_energy = std::numeric_limits<double>::infinity();
  double last_entropy = std::numeric_limits<double>::infinity();
  for (double eta : {0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 200.0, 1000.0}) {
    const auto sol = ir::solve_regularized_sdp(spectrum, Regularizer::entropy(eta));
    const double energy = spectrum.values.dot(sol.weights);
    const double h = entropy_of(sol.weights);
    EXPECT_LE(energy, last_energy + 1e-12);
    EXPECT_LE(h, last_entropy + 1e-12);
    last_energy = energy;
    last_entropy = h;
  }
  EXPECT_NEAR(last_energy, spectrum.values[0], 1e-6);
}

TEST(RegularizedSdp, LargeEtaRecoversUnregularized) {
  const auto spectrum = ir::LaplacianSpectrum::of(ir::generate(ir::family::Dumbbell{4, 1}));
  ASSERT_GE(spectrum.values[1] - spectrum.values[0], 0.1);
  const auto reg = ir::solve_regularized_sdp(spectrum, Regularizer::entropy(1e4));
  const auto plain = ir::solve_unregularized_sdp(spectrum);
  EXPECT_LE((reg.x.matrix() - plain.x.matrix()).norm(), 1e-3);
}

TEST(RegularizedSdp, Validation) {
  EXPECT_THROW(Regularizer::entropy(0.0), ir::InvalidInput);
  EXPECT_THROW(Regularizer::p_norm(1.0, 1.0), ir::InvalidInput);
  EXPECT_THROW(ir::LaplacianSpectrum::of(ir::Graph::from_edges(3, std::vector<ir::Edge>{{0, 1, 1.0}})),
               ir::InvalidInput);
}

TEST(DiffusionOperator, HeatAtZeroIsNormalizedIdentity) {
  const auto spectrum = ir::LaplacianSpectrum::of(ir::generate(ir::family::Path{6}));
  const Graph g = ir::generate(ir::family::Path{6});
  const auto x = ir::diffusion_operator(spectrum, g, DiffusionKind::heat_kernel(0.0));
  EXPECT_LE((x.matrix() - complement_projector(spectrum) / 5.0).norm(), 1e-12);
}

TEST(DiffusionOperator, SingleEdgeIsTheUniquePoint) {
  const Graph g = single_edge();
  const auto spectrum = ir::LaplacianSpectrum::of(g);
  for (const auto& kind : {DiffusionKind::heat_kernel(0.4), DiffusionKind::heat_kernel(7.0),
                           DiffusionKind::page_rank(0.3), DiffusionKind::lazy_walk(0.5, 3)}) {
    EXPECT_LE((ir::diffusion_operator(spectrum, g, kind).matrix() - complement_projector(spectrum)).norm(), 1e-12);
  }
}

TEST(DiffusionOperator, PageRankSpectrumOnCycle) {
  const Graph g = ir::generate(ir::family::Cycle{4});
  const auto spectrum = ir::LaplacianSpectrum::of(g);
  const double gamma = 0.3;
  const auto x = ir::diffusion_operator(spectrum, g, DiffusionKind::page_rank(gamma));
  Eigen::VectorXd expected(3);
  for (int i = 0; i < 3; ++i) expected[i] = gamma / (1.0 - (1.0 - gamma) * (1.0 - spectrum.values[i]));
  expected /= expected.sum();
  const Eigen::VectorXd got = spectrum.eigenweights(x.matrix());
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(got[i], expected[i], 1e-12);
}

TEST(DiffusionOperator, IndefiniteLazyWalkRejected) {
  const Graph g = ir::generate(ir::family::Cycle{6});
  EXPECT_THROW(ir::diffusion_operator(g, DiffusionKind::lazy_walk(0.2, 1)), ir::InvalidInput);
}

TEST(VerifyEquivalence, HeatOnRandomRegular) {
  const Graph g = ir::generate(ir::family::RandomRegular{20, 3}, 1);
  for (double t : {0.1, 1.0, 10.0}) {
    const auto rep =
        ir::verify_equivalence(g, DiffusionKind::heat_kernel(t), Regularizer::Type::GeneralizedEntropy);
    EXPECT_LE(rep.frobenius_gap, 1e-6);
    EXPECT_DOUBLE_EQ(rep.regularizer.eta, t);
    // Oracle side: projected gradient at the calibrated eta.
    const auto pg = ir::solve_regularized_sdp_numerically(ir::LaplacianSpectrum::of(g), rep.regularizer);
    const auto op = ir::diffusion_operator(g, DiffusionKind::heat_kernel(t));
    EXPECT_LE((pg.solution.matrix() - op.matrix()).norm(), 1e-5);
  }
}

TEST(VerifyEquivalence, SingleEdgeEveryPairing) {
  const Graph g = single_edge();
  EXPECT_LE(ir::verify_equivalence(g, DiffusionKind::heat_kernel(1.0), Regularizer::Type::GeneralizedEntropy)
                .frobenius_gap,
            1e-12);
  EXPECT_LE(ir::verify_equivalence(g, DiffusionKind::page_rank(0.5), Regularizer::Type::LogDet).frobenius_gap,
            1e-12);
  EXPECT_LE(
      ir::verify_equivalence(g, DiffusionKind::lazy_walk(0.5, 2), Regularizer::Type::PNorm, 2.0).frobenius_gap,
      1e-12);
}

TEST(VerifyEquivalence, PageRankLogDetOnDumbbell) {
  const Graph g = ir::generate(ir::family::Dumbbell{3, 1});
  const auto rep = ir::verify_equivalence(g, DiffusionKind::page_rank(0.5), Regularizer::Type::LogDet);
  EXPECT_LE(rep.frobenius_gap, 1e-6);
  EXPECT_LE(rep.objective_gap, 1e-9);
  EXPECT_FALSE(rep.degenerate);
  const auto pg = ir::solve_regularized_sdp_numerically(ir::LaplacianSpectrum::of(g), rep.regularizer);
  EXPECT_LE((pg.solution.matrix() - ir::diffusion_operator(g, DiffusionKind::page_rank(0.5)).matrix()).norm(), 1e-5);
}

TEST(VerifyEquivalence, UnsupportedPairing) {
  const Graph g = ir::generate(ir::family::Cycle{5});
  EXPECT_THROW(ir::verify_equivalence(g, DiffusionKind::heat_kernel(1.0), Regularizer::Type::LogDet),
               ir::InvalidInput);
}

TEST(VerifyEquivalence, ResidualsAreFiniteAndNonNegative) {
  const Graph g = ir::generate(ir::family::Grid{3, 4});
  const auto rep = ir::verify_equivalence(g, DiffusionKind::heat_kernel(2.0), Regularizer::Type::GeneralizedEntropy);
  for (double r : {rep.feasibility.psd, rep.feasibility.trace, rep.feasibility.trivial, rep.frobenius_gap,
                   rep.objective_gap}) {
    EXPECT_GE(r, 0.0);
    EXPECT_TRUE(std::isfinite(r));
  }
}

TEST(PNormFit, ReportsBestGridPoint) {
  const Graph g = ir::generate(ir::family::Dumbbell{3, 1});
  const auto spectrum = ir::LaplacianSpectrum::of(g);
  const auto grid = ir::default_p_grid();
  ASSERT_EQ(grid.size(), 30u);
  EXPECT_NEAR(grid.front(), 1.1, 1e-12);
  EXPECT_NEAR(grid.back(), 4.0, 1e-12);
  const auto fit = ir::fit_pnorm(spectrum, g, DiffusionKind::lazy_walk(0.5, 2), grid, "dumbbell");
  ASSERT_EQ(fit.gaps.size(), grid.size());
  for (double gap : fit.gaps) EXPECT_GE(gap, fit.gaps[fit.best]);
  ASSERT_TRUE(fit.best_report.best_fit_p.has_value());
  EXPECT_DOUBLE_EQ(*fit.best_report.best_fit_p, grid[fit.best]);
  const std::string row = ir::to_csv_row(fit.best_report);
  EXPECT_NE(row.find("pnorm(best_fit_p="), std::string::npos) << row;
  EXPECT_EQ(row.rfind("dumbbell,lazy(alpha=0.5),2,", 0), 0u) << row;
}

TEST(EquivalenceCsv, RowShape) {
  const Graph g = ir::generate(ir::family::Cycle{5});
  auto rep = ir::verify_equivalence(g, DiffusionKind::heat_kernel(1.0), Regularizer::Type::GeneralizedEntropy);
  rep.graph_id = "c5";
  const std::string row = ir::to_csv_row(rep);
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), 10);
  EXPECT_EQ(row.rfind("c5,heat,1,entropy,1,", 0), 0u) << row;
}
