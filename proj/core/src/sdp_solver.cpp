#include "implicitreg/sdp_solver.hpp"

#include <cmath>
#include <limits>

#include "implicitreg/error.hpp"

namespace implicitreg {

namespace {

constexpr const char* kModule = "sdp";

}  // namespace

PsdSimplexProjection::PsdSimplexProjection(const Eigen::VectorXd& trivial_unit)
    : trivial_(trivial_unit), basis_(complement_basis(trivial_unit)) {
  if (trivial_unit.size() < 2) throw InvalidInput(kModule, "feasible set needs n >= 2");
}

SpectralPoint PsdSimplexProjection::assemble(const Eigen::MatrixXd& reduced_vectors,
                                             Eigen::VectorXd weights) const {
  SpectralPoint p;
  p.vectors = basis_ * reduced_vectors;
  p.matrix = p.vectors * weights.asDiagonal() * p.vectors.transpose();
  p.matrix = 0.5 * (p.matrix + p.matrix.transpose()).eval();
  p.weights = std::move(weights);
  return p;
}

SpectralPoint PsdSimplexProjection::decompose(const Eigen::MatrixXd& y) const {
  const Eigen::MatrixXd reduced = basis_.transpose() * (0.5 * (y + y.transpose())) * basis_;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(reduced);
  if (solver.info() != Eigen::Success) throw NumericalFailure(kModule, "eigensolver failed");
  return assemble(solver.eigenvectors(), solver.eigenvalues());
}

SpectralPoint PsdSimplexProjection::project(const Eigen::MatrixXd& y) const {
  const Eigen::MatrixXd reduced = basis_.transpose() * (0.5 * (y + y.transpose())) * basis_;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(reduced);
  if (solver.info() != Eigen::Success) throw NumericalFailure(kModule, "eigensolver failed");
  return assemble(solver.eigenvectors(), project_onto_simplex(Eigen::VectorXd(solver.eigenvalues())));
}

SpectralPoint PsdSimplexProjection::barycenter() const {
  const Eigen::Index m = basis_.cols();
  return assemble(Eigen::MatrixXd::Identity(m, m), Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m)));
}

PgResult projected_gradient_sdp(const SdpObjective& objective, const PsdSimplexProjection& projection,
                                const PgOptions& options, const std::optional<Eigen::MatrixXd>& start) {
  if (!(options.initial_step > 0.0) || !(options.step_growth >= 1.0) || !(options.grad_tol > 0.0) ||
      options.max_iters < 1) {
    throw InvalidInput(kModule, "invalid projected-gradient options");
  }
  auto gradient_at = [&](const SpectralPoint& p) {
    Eigen::MatrixXd g = objective.gradient(p);
    if (!g.allFinite()) throw NumericalFailure(kModule, "objective gradient is not finite");
    return g;
  };

  SpectralPoint x = start ? projection.project(*start) : projection.barycenter();
  const double f0 = objective.value(x);
  if (!std::isfinite(f0)) throw NumericalFailure(kModule, "objective is not finite at the start point");

  PgResult result{DensityMatrix::checked(x.matrix, projection.trivial_unit()), f0, {f0}, 0, options.initial_step, 0.0};
  SpectralPoint y = x;
  Eigen::MatrixXd grad_y = gradient_at(y);
  double momentum = 1.0;
  double step = options.initial_step;

  for (int it = 1; it <= options.max_iters; ++it) {
    // Backtracking on <grad(z) - grad(y), z - y> <= |z - y|^2 / step, which
    // for convex f implies the quadratic upper model at z.
    SpectralPoint z;
    Eigen::MatrixXd grad_z;
    double dist = 0.0;
    for (;;) {
      z = projection.project(y.matrix - step * grad_y);
      grad_z = gradient_at(z);
      const Eigen::MatrixXd diff = z.matrix - y.matrix;
      dist = diff.norm();
      const double curvature = ((grad_z - grad_y).array() * diff.array()).sum();
      if (curvature <= dist * dist / step) break;
      step *= 0.5;
      if (step < 1e-300) throw NumericalFailure(kModule, "backtracking step underflow");
    }
    const double mapping = dist / step;
    result.history.push_back(objective.value(z));

    if (mapping <= options.grad_tol) {
      result.solution = DensityMatrix::checked(z.matrix, projection.trivial_unit());
      result.objective = result.history.back();
      result.iterations = it;
      result.final_step = step;
      result.gradient_mapping = mapping;
      return result;
    }

    if (!options.accelerate) {
      x = std::move(z);
      y = x;
      grad_y = std::move(grad_z);
    } else if (((y.matrix - z.matrix).array() * (z.matrix - x.matrix).array()).sum() > 0.0) {
      // Momentum points against the descent direction: restart from z.
      momentum = 1.0;
      x = std::move(z);
      y = x;
      grad_y = std::move(grad_z);
    } else {
      const double next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
      const Eigen::MatrixXd extrapolated = z.matrix + ((momentum - 1.0) / next) * (z.matrix - x.matrix);
      momentum = next;
      x = std::move(z);
      y = projection.decompose(extrapolated);
      grad_y = gradient_at(y);
    }
    step *= options.step_growth;
  }
  throw NumericalFailure(kModule, "projected gradient hit the iteration cap of " +
                                      std::to_string(options.max_iters));
}

}  // namespace implicitreg
