#include "implicitreg/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>

#include "implicitreg/error.hpp"

namespace implicitreg {

namespace {

constexpr const char* kModule = "numerics";

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

std::size_t default_dense_limit() {
  if (const char* env = std::getenv("IMPLICITREG_DENSE_LIMIT")) {
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return 4096;
}

void require_dense(const Graph& g, std::size_t limit, const char* what) {
  if (static_cast<std::size_t>(g.num_nodes()) > limit) {
    throw InvalidInput(kModule, std::string(what) + ": n = " + std::to_string(g.num_nodes()) +
                                    " exceeds the dense limit " + std::to_string(limit));
  }
}

Eigen::MatrixXd dense_matrix(const Graph& g, MatrixKind kind) {
  const NodeId n = g.num_nodes();
  Eigen::MatrixXd out(n, n);
  NodeVector e(n, 0.0);
  for (NodeId j = 0; j < n; ++j) {
    e[j] = 1.0;
    const NodeVector col = apply_matrix(g, kind, e);
    out.col(j) = Eigen::Map<const Eigen::VectorXd>(col.data(), n);
    e[j] = 0.0;
  }
  return out;
}

Eigen::VectorXd trivial_direction(const Graph& g) {
  Eigen::VectorXd u(g.num_nodes());
  for (NodeId i = 0; i < g.num_nodes(); ++i) u[i] = std::sqrt(g.degree(i));
  const double norm = u.norm();
  if (!(norm > 0.0)) throw InvalidInput(kModule, "graph has no edges");
  return u / norm;
}

Eigen::MatrixXd complement_basis(const Eigen::VectorXd& unit) {
  const Eigen::Index n = unit.size();
  // Reflector H = I - 2 w w^T / (w^T w) with w = e0 - s*unit maps s*unit to e0
  // and e0 to s*unit; s = -sign(unit_0) keeps w well away from zero.
  const double s = unit[0] >= 0.0 ? -1.0 : 1.0;
  Eigen::VectorXd w = -s * unit;
  w[0] += 1.0;
  const double ww = w.squaredNorm();
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n) - (2.0 / ww) * w * w.transpose();
  return h.rightCols(n - 1);
}

void canonicalize_signs(Eigen::MatrixXd& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    auto col = vectors.col(j);
    const double peak = col.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      if (std::abs(col[i]) >= peak - 1e-12) {
        if (col[i] < 0.0) col *= -1.0;
        break;
      }
    }
  }
}

SpectralDecomposition dense_eigendecompose(const Graph& g, MatrixKind kind, std::size_t dense_limit) {
  if (!kind.is_symmetric()) {
    throw InvalidInput(kModule, "dense_eigendecompose needs a symmetric operator, got " + kind.name());
  }
  require_dense(g, dense_limit, "dense_eigendecompose");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense_matrix(g, kind));
  if (solver.info() != Eigen::Success) throw NumericalFailure(kModule, "symmetric eigensolver failed");
  SpectralDecomposition out{solver.eigenvalues(), solver.eigenvectors()};
  canonicalize_signs(out.eigenvectors);
  return out;
}

NodeVector ShiftedOperator::apply(const Graph& g, std::span<const double> x) const {
  NodeVector out = apply_matrix(g, kind, x);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = shift * x[i] + scale * out[i];
  return out;
}

NodeVector solve_spd(const Graph& g, const ShiftedOperator& op, std::span<const double> rhs, double tol,
                     std::size_t max_iters) {
  const std::size_t n = static_cast<std::size_t>(g.num_nodes());
  if (rhs.size() != n) throw InvalidInput(kModule, "solve_spd: rhs length does not match node count");
  if (!(tol > 0.0)) throw InvalidInput(kModule, "solve_spd: tolerance must be positive");
  if (max_iters == 0) max_iters = 10 * std::max<std::size_t>(n, 1);

  const double rhs_norm = std::sqrt(dot(rhs, rhs));
  NodeVector x(n, 0.0);
  if (rhs_norm == 0.0) return x;
  const double target = tol * rhs_norm;

  NodeVector r(rhs.begin(), rhs.end());
  NodeVector p = r;
  double rr = dot(r, r);
  for (std::size_t it = 0; it < max_iters; ++it) {
    const NodeVector ap = op.apply(g, p);
    const double pap = dot(p, ap);
    if (!(pap > 0.0) || !std::isfinite(pap)) break;  // not positive definite along p
    const double step = rr / pap;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += step * p[i];
      r[i] -= step * ap[i];
    }
    const double rr_next = dot(r, r);
    if (std::sqrt(rr_next) <= target) {
      // Confirm against the true residual; recurrence drift can mislead.
      const NodeVector ax = op.apply(g, x);
      double true_rr = 0.0;
      for (std::size_t i = 0; i < n; ++i) true_rr += (rhs[i] - ax[i]) * (rhs[i] - ax[i]);
      if (std::sqrt(true_rr) <= target) return x;
      for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - ax[i];
      p = r;
      rr = true_rr;
      continue;
    }
    const double beta = rr_next / rr;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    rr = rr_next;
  }
  throw NumericalFailure(kModule, "solve_spd: no convergence to relative residual " + std::to_string(tol) +
                                      " within " + std::to_string(max_iters) + " iterations");
}

std::vector<double> project_onto_simplex(std::span<const double> v) {
  if (v.empty()) throw InvalidInput(kModule, "cannot project an empty vector onto the simplex");
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) theta = candidate;
  }
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [theta](double x) { return std::max(x - theta, 0.0); });
  return out;
}

Eigen::VectorXd project_onto_simplex(const Eigen::VectorXd& v) {
  const auto p = project_onto_simplex(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
  return Eigen::Map<const Eigen::VectorXd>(p.data(), v.size());
}

FeasibilityResiduals feasibility_residuals(const Eigen::MatrixXd& x, const Eigen::VectorXd& trivial_unit) {
  FeasibilityResiduals r;
  r.symmetry = (x - x.transpose()).cwiseAbs().maxCoeff();
  const Eigen::MatrixXd sym = 0.5 * (x + x.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  r.psd = std::max(0.0, -solver.eigenvalues()[0]);
  r.trace = std::abs(x.trace() - 1.0);
  r.trivial = (x * trivial_unit).norm();
  return r;
}

DensityMatrix DensityMatrix::checked(Eigen::MatrixXd x, const Eigen::VectorXd& trivial_unit) {
  if (x.rows() != x.cols() || x.rows() != trivial_unit.size()) {
    throw InvalidInput(kModule, "density matrix dimension mismatch");
  }
  if (!x.allFinite()) throw NumericalFailure(kModule, "density matrix has non-finite entries");
  const FeasibilityResiduals r = feasibility_residuals(x, trivial_unit);
  if (r.symmetry > kSymmetryTol || r.psd > kPsdTol || r.trace > kTraceTol || r.trivial > kTrivialTol) {
    throw NumericalFailure(kModule, "density matrix invariants violated (sym " + std::to_string(r.symmetry) +
                                        ", psd " + std::to_string(r.psd) + ", trace " +
                                        std::to_string(r.trace) + ", trivial " + std::to_string(r.trivial) +
                                        ")");
  }
  return DensityMatrix(std::move(x), r);
}

}  // namespace implicitreg
