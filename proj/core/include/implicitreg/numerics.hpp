#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "implicitreg/graph.hpp"

namespace implicitreg {

// Ceiling on n for every dense O(n^3) path. 4096 unless the environment
// variable IMPLICITREG_DENSE_LIMIT holds a positive integer.
std::size_t default_dense_limit();

// Throws InvalidInput when g exceeds `limit`.
void require_dense(const Graph& g, std::size_t limit, const char* what);

Eigen::MatrixXd dense_matrix(const Graph& g, MatrixKind kind);

// d^{1/2} / ||d^{1/2}||, the unit trivial eigenvector of the normalized Laplacian.
Eigen::VectorXd trivial_direction(const Graph& g);

// Orthonormal n x (n-1) basis of the complement of `unit` (a unit vector),
// taken from the Householder reflector that maps e_0 to `unit`.
Eigen::MatrixXd complement_basis(const Eigen::VectorXd& unit);

struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // orthonormal columns, index-aligned
};

// Each column is flipped so its largest-magnitude entry is positive; among
// entries within 1e-12 of the maximum magnitude the lowest index decides.
void canonicalize_signs(Eigen::MatrixXd& vectors);

// Dense symmetric eigensolve of L or the normalized Laplacian (or another
// symmetric kind). Throws InvalidInput for non-symmetric kinds or n > limit.
SpectralDecomposition dense_eigendecompose(const Graph& g, MatrixKind kind,
                                           std::size_t dense_limit = default_dense_limit());

// shift * I + scale * K, applied through apply_matrix().
struct ShiftedOperator {
  MatrixKind kind = MatrixKind::normalized_laplacian();
  double shift = 0.0;
  double scale = 1.0;

  NodeVector apply(const Graph& g, std::span<const double> x) const;
};

// Conjugate gradients. Returns x with ||op x - rhs|| <= tol ||rhs||, verified on
// the recomputed residual. Throws NumericalFailure after max_iters (0 means
// 10 n) iterations without reaching tol.
NodeVector solve_spd(const Graph& g, const ShiftedOperator& op, std::span<const double> rhs, double tol,
                     std::size_t max_iters = 0);

// Euclidean projection onto the probability simplex (sort and threshold).
std::vector<double> project_onto_simplex(std::span<const double> v);
Eigen::VectorXd project_onto_simplex(const Eigen::VectorXd& v);

struct FeasibilityResiduals {
  double symmetry = 0.0;  // max |X - X^T|
  double psd = 0.0;       // max(0, -lambda_min(X))
  double trace = 0.0;     // |Tr X - 1|
  double trivial = 0.0;   // ||X u|| for the unit trivial direction u
};

FeasibilityResiduals feasibility_residuals(const Eigen::MatrixXd& x, const Eigen::VectorXd& trivial_unit);

// Symmetric PSD matrix with unit trace that annihilates the trivial direction.
class DensityMatrix {
 public:
  static constexpr double kSymmetryTol = 1e-12;
  static constexpr double kPsdTol = 1e-10;
  static constexpr double kTraceTol = 1e-10;
  static constexpr double kTrivialTol = 1e-8;

  // Throws NumericalFailure if any invariant fails.
  static DensityMatrix checked(Eigen::MatrixXd x, const Eigen::VectorXd& trivial_unit);

  const Eigen::MatrixXd& matrix() const { return x_; }
  const FeasibilityResiduals& residuals() const { return residuals_; }
  Eigen::Index size() const { return x_.rows(); }

 private:
  DensityMatrix(Eigen::MatrixXd x, FeasibilityResiduals r) : x_(std::move(x)), residuals_(r) {}
  Eigen::MatrixXd x_;
  FeasibilityResiduals residuals_;
};

}  // namespace implicitreg
