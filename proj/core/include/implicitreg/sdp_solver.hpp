#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "implicitreg/numerics.hpp"

namespace implicitreg {

// A symmetric matrix living in the complement of the trivial direction, kept
// together with its eigen form: matrix = vectors * diag(weights) * vectors^T.
struct SpectralPoint {
  Eigen::MatrixXd matrix;   // n x n
  Eigen::VectorXd weights;  // n-1 eigenvalues, ascending
  Eigen::MatrixXd vectors;  // n x (n-1), orthonormal, orthogonal to the trivial direction
};

// Feasible set {X >= 0, Tr X = 1, X u = 0}. All work happens in an explicit
// orthonormal basis Q of the complement of u, so X u = 0 holds by
// construction; the Euclidean projection of Y is Q proj(Q^T Y Q) Q^T where the
// inner projection sends the eigenvalues onto the probability simplex.
class PsdSimplexProjection {
 public:
  explicit PsdSimplexProjection(const Eigen::VectorXd& trivial_unit);

  SpectralPoint project(const Eigen::MatrixXd& y) const;
  // Eigen form of Q Q^T y Q Q^T without touching the eigenvalues.
  SpectralPoint decompose(const Eigen::MatrixXd& y) const;
  // (I - u u^T) / (n - 1), the maximum-entropy feasible point.
  SpectralPoint barycenter() const;

  const Eigen::VectorXd& trivial_unit() const { return trivial_; }
  const Eigen::MatrixXd& basis() const { return basis_; }

 private:
  SpectralPoint assemble(const Eigen::MatrixXd& reduced_vectors, Eigen::VectorXd weights) const;

  Eigen::VectorXd trivial_;
  Eigen::MatrixXd basis_;
};

// Convex objective over the feasible set. Both callables must be pure.
struct SdpObjective {
  std::function<double(const SpectralPoint&)> value;
  std::function<Eigen::MatrixXd(const SpectralPoint&)> gradient;
};

struct PgOptions {
  // 1 / (2 * lambda_max estimate); the normalized Laplacian has lambda_max <= 2.
  double initial_step = 0.25;
  // The step is multiplied by this after every accepted step so it can
  // recover from a run of short steps.
  double step_growth = 1.1;
  // FISTA momentum with gradient-based restarts. Off gives plain projected
  // gradient.
  bool accelerate = true;
  // Stop once the gradient mapping ||y - z|| / step falls to grad_tol. For an
  // m-strongly convex objective this puts z within about grad_tol / m of the
  // optimum.
  double grad_tol = 1e-7;
  int max_iters = 200000;
};

struct PgResult {
  DensityMatrix solution;
  double objective = 0.0;
  std::vector<double> history;  // objective at the start point and after every step
  int iterations = 0;
  double final_step = 0.0;
  double gradient_mapping = 0.0;  // at termination
};

// Accelerated projected gradient over the PSD simplex, starting from `start`
// (projected) or the barycenter. Step acceptance and restarts use gradients
// only: objective differences drop below double resolution long before the
// iterate is accurate to 1e-6. Throws NumericalFailure on non-finite
// gradients or when max_iters is reached before grad_tol.
PgResult projected_gradient_sdp(const SdpObjective& objective, const PsdSimplexProjection& projection,
                                const PgOptions& options = {},
                                const std::optional<Eigen::MatrixXd>& start = std::nullopt);

}  // namespace implicitreg
