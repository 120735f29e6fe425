#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "implicitreg/diffusion.hpp"
#include "implicitreg/numerics.hpp"
#include "implicitreg/sdp_solver.hpp"

namespace implicitreg {

// G(X) for the regularized spectral program
//   minimize Tr(Lnorm X) + G(X) / eta  over  {X >= 0, Tr X = 1, X d^{1/2} = 0}.
// All three are spectral functions of X:
//   GeneralizedEntropy  Tr(X log X)
//   LogDet              -log det(X) on the complement of d^{1/2}
//   PNorm(p)            Tr(X^p) / p
struct Regularizer {
  enum class Type { GeneralizedEntropy, LogDet, PNorm };

  Type type = Type::GeneralizedEntropy;
  double eta = 1.0;
  double p = 2.0;  // PNorm only

  static Regularizer entropy(double eta);
  static Regularizer log_det(double eta);
  static Regularizer p_norm(double p, double eta);

  std::string name() const;  // "entropy", "logdet", "pnorm"
  // G evaluated on the eigenvalues of X restricted to the complement.
  double value(std::span<const double> weights) const;
};

// Nontrivial spectrum of the normalized Laplacian, computed once per graph on
// an explicit orthonormal basis of the complement of d^{1/2}.
struct LaplacianSpectrum {
  Eigen::MatrixXd laplacian;  // dense normalized Laplacian
  Eigen::VectorXd trivial;    // unit d^{1/2}
  Eigen::VectorXd values;     // lambda_2 <= ... <= lambda_n
  Eigen::MatrixXd vectors;    // n x (n-1)

  // Throws InvalidInput for disconnected graphs or n > dense_limit.
  static LaplacianSpectrum of(const Graph& g, std::size_t dense_limit = default_dense_limit());

  Eigen::Index size() const { return laplacian.rows(); }
  // Eigenvalues of X in the Laplacian eigenbasis: diag(V^T X V).
  Eigen::VectorXd eigenweights(const Eigen::MatrixXd& x) const;
};

inline constexpr double kDegeneracyTol = 1e-10;

struct SdpSolution {
  DensityMatrix x;
  Eigen::VectorXd weights;   // aligned with LaplacianSpectrum::values
  double objective = 0.0;    // Tr(Lnorm X) + G(X)/eta  (just Tr(Lnorm X) when unregularized)
  double multiplier = 0.0;   // LogDet: nu; PNorm: c; otherwise 0
  bool degenerate = false;   // lambda_2 within kDegeneracyTol of lambda_3
  int lambda2_multiplicity = 1;
};

// Trace-normalized projector onto the lambda_2 eigenspace.
SdpSolution solve_unregularized_sdp(const LaplacianSpectrum& spectrum);
SdpSolution solve_unregularized_sdp(const Graph& g, std::size_t dense_limit = default_dense_limit());

// Exact optimum via the spectral reduction. The optimum is diagonal in the
// Laplacian eigenbasis and its weights come from the scalar dual:
//   entropy  mu_i ∝ exp(-eta lambda_i)
//   logdet   mu_i = 1 / (eta (lambda_i + nu)),           nu by bisection
//   pnorm    mu_i = max(0, c - eta lambda_i)^{1/(p-1)},  c by bisection
// Throws NumericalFailure if a bisection bracket cannot be established.
SdpSolution solve_regularized_sdp(const LaplacianSpectrum& spectrum, const Regularizer& reg);
SdpSolution solve_regularized_sdp(const Graph& g, const Regularizer& reg,
                                  std::size_t dense_limit = default_dense_limit());

// Tr(Lnorm X) + G(X)/eta for an arbitrary feasible X (weights from its own
// eigenvalues, negatives clipped to zero).
double regularized_objective_value(const LaplacianSpectrum& spectrum, const Regularizer& reg,
                                   const Eigen::MatrixXd& x);

// Below this the oracle objective is quadratic. On the n <= 40 suite at eta up
// to 10 the resulting bias in the optimum is under 1e-6 (Frobenius), while
// the condition number stays near 1 / floor.
inline constexpr double kPgSmoothingFloor = 1e-6;

// Objective handed to projected_gradient_sdp(). Below `floor` each scalar
// spectral term is continued by its second-order Taylor expansion at `floor`,
// which keeps gradients finite on the boundary of the PSD cone.
SdpObjective make_sdp_objective(const Eigen::MatrixXd& laplacian, const Regularizer& reg,
                                double floor = kPgSmoothingFloor);

// Projected-gradient solution of the same program, independent of the
// closed forms above.
PgResult solve_regularized_sdp_numerically(const LaplacianSpectrum& spectrum, const Regularizer& reg,
                                           const PgOptions& options = {},
                                           double floor = kPgSmoothingFloor);

// The dynamics as a density matrix: the dense operator (matrix exponential,
// resolvent inverse, matrix power) conjugated by D^{+-1/2} into symmetric form,
// compressed onto the complement of d^{1/2} and scaled to unit trace.
DensityMatrix diffusion_operator(const LaplacianSpectrum& spectrum, const Graph& g, const DiffusionKind& kind);
DensityMatrix diffusion_operator(const Graph& g, const DiffusionKind& kind,
                                 std::size_t dense_limit = default_dense_limit());

struct EquivalenceReport {
  std::string graph_id;
  DiffusionKind diffusion;
  Regularizer regularizer;  // eta holds the calibrated value
  double frobenius_gap = 0.0;
  double objective_gap = 0.0;
  FeasibilityResiduals feasibility;  // worst of the two matrices
  bool degenerate = false;
  std::optional<double> best_fit_p;  // set on rows produced by fit_pnorm()
};

inline constexpr double kEquivalencePassGap = 1e-6;

// Calibrates eta from the diffusion parameter and compares the two matrices.
// Pairings: HeatKernel-GeneralizedEntropy (eta = t), PageRank-LogDet (nu from
// the ratio of the two lowest distinct eigenweights), LazyWalk-PNorm (same
// ratio rule for c/eta at the requested p). Anything else is InvalidInput.
EquivalenceReport verify_equivalence(const LaplacianSpectrum& spectrum, const Graph& g, const DiffusionKind& kind,
                                     Regularizer::Type family, double p = 2.0, const std::string& graph_id = "");
EquivalenceReport verify_equivalence(const Graph& g, const DiffusionKind& kind, Regularizer::Type family,
                                     double p = 2.0, const std::string& graph_id = "");

// Calibrated eta for a pairing without running the comparison.
Regularizer calibrate(const LaplacianSpectrum& spectrum, const DensityMatrix& diffusion, const DiffusionKind& kind,
                      Regularizer::Type family, double p = 2.0);

struct PNormFit {
  std::vector<double> p_grid;
  std::vector<double> gaps;
  std::size_t best = 0;
  EquivalenceReport best_report;

  // Gaps are non-increasing up to the best grid point and non-decreasing after
  // (1e-14 slack for ties at machine precision).
  bool unimodal() const;
};

// Lazy walk against PNorm over a grid of p values.
PNormFit fit_pnorm(const LaplacianSpectrum& spectrum, const Graph& g, const DiffusionKind& lazy,
                   std::span<const double> p_grid, const std::string& graph_id = "");

// 1.1, 1.2, ..., 4.0
std::vector<double> default_p_grid();

inline constexpr const char* kEquivalenceCsvHeader =
    "graph_id,dynamics,param,regularizer,eta,frobenius_gap,objective_gap,psd_resid,trace_resid,trivial_resid,"
    "degenerate_flag";
std::string to_csv_row(const EquivalenceReport& report);

}  // namespace implicitreg
