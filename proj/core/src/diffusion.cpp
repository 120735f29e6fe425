#include "implicitreg/diffusion.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "implicitreg/error.hpp"
#include "implicitreg/generators.hpp"

namespace implicitreg {

namespace {

constexpr const char* kModule = "diffusion";

void check_seed(const Graph& g, std::span<const double> seed) {
  if (seed.size() != static_cast<std::size_t>(g.num_nodes())) {
    throw InvalidInput(kModule, "seed length " + std::to_string(seed.size()) + " does not match node count " +
                                    std::to_string(g.num_nodes()));
  }
  for (double x : seed) {
    if (!std::isfinite(x)) throw InvalidInput(kModule, "seed has non-finite entries");
  }
}

void check_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidInput(kModule, "teleportation gamma must lie in (0,1]");
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

}  // namespace

DiffusionKind DiffusionKind::heat_kernel(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidInput(kModule, "heat kernel time must be >= 0");
  return {Type::HeatKernel, t, 0};
}

DiffusionKind DiffusionKind::page_rank(double gamma) {
  check_gamma(gamma);
  return {Type::PageRank, gamma, 0};
}

DiffusionKind DiffusionKind::lazy_walk(double alpha, int steps) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput(kModule, "holding probability must lie in (0,1)");
  if (steps < 0) throw InvalidInput(kModule, "lazy walk step count must be >= 0");
  return {Type::LazyWalk, alpha, steps};
}

std::string DiffusionKind::dynamics() const {
  switch (type) {
    case Type::HeatKernel: return "heat";
    case Type::PageRank: return "pagerank";
    case Type::LazyWalk: return "lazy";
  }
  return "unknown";
}

std::string DiffusionKind::label() const {
  switch (type) {
    case Type::HeatKernel: return "t=" + fmt(parameter);
    case Type::PageRank: return "gamma=" + fmt(parameter);
    case Type::LazyWalk: return "alpha=" + fmt(parameter) + ";steps=" + std::to_string(steps);
  }
  return "";
}

NodeVector heat_kernel_exact(const Graph& g, double t, std::span<const double> seed, std::size_t dense_limit) {
  if (!(t >= 0.0)) throw InvalidInput(kModule, "heat kernel time must be >= 0");
  check_seed(g, seed);
  const SpectralDecomposition spec = dense_eigendecompose(g, MatrixKind::normalized_laplacian(), dense_limit);
  const Eigen::Map<const Eigen::VectorXd> s(seed.data(), static_cast<Eigen::Index>(seed.size()));
  const Eigen::VectorXd coeffs = spec.eigenvectors.transpose() * s;
  const Eigen::VectorXd damped = coeffs.array() * (-t * spec.eigenvalues.array()).exp();
  const Eigen::VectorXd out = spec.eigenvectors * damped;
  return NodeVector(out.data(), out.data() + out.size());
}

NodeVector heat_kernel_series(const Graph& g, double t, std::span<const double> seed, int terms) {
  if (!(t >= 0.0)) throw InvalidInput(kModule, "heat kernel time must be >= 0");
  if (terms < 0) throw InvalidInput(kModule, "series term count must be >= 0");
  check_seed(g, seed);
  NodeVector term(seed.begin(), seed.end());
  NodeVector sum = term;
  NodeVector next(term.size());
  for (int j = 1; j <= terms; ++j) {
    apply_matrix(g, MatrixKind::normalized_laplacian(), term, next);
    const double factor = -t / static_cast<double>(j);
    for (std::size_t i = 0; i < sum.size(); ++i) {
      term[i] = factor * next[i];
      sum[i] += term[i];
    }
  }
  return sum;
}

NodeVector pagerank_exact(const Graph& g, double gamma, std::span<const double> seed, std::size_t dense_limit) {
  check_gamma(gamma);
  check_seed(g, seed);
  require_dense(g, dense_limit, "pagerank_exact");
  const Eigen::Index n = g.num_nodes();
  const Eigen::MatrixXd system =
      Eigen::MatrixXd::Identity(n, n) - (1.0 - gamma) * dense_matrix(g, MatrixKind::random_walk());
  const Eigen::Map<const Eigen::VectorXd> s(seed.data(), n);
  const Eigen::VectorXd out = system.partialPivLu().solve(gamma * s);
  return NodeVector(out.data(), out.data() + out.size());
}

NodeVector pagerank_richardson(const Graph& g, double gamma, std::span<const double> seed, double tol) {
  check_gamma(gamma);
  check_seed(g, seed);
  if (!(tol > 0.0)) throw InvalidInput(kModule, "richardson tolerance must be positive");
  const std::size_t n = seed.size();
  NodeVector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = gamma * seed[i];
  NodeVector mx(n);
  // The iteration contracts by (1 - gamma) in the l1 norm, so this cap is
  // only reachable through non-finite input.
  const long max_iters = 100000000L;
  for (long it = 0; it < max_iters; ++it) {
    apply_matrix(g, MatrixKind::random_walk(), x, mx);
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double next = gamma * seed[i] + (1.0 - gamma) * mx[i];
      delta += std::abs(next - x[i]);
      x[i] = next;
    }
    if (delta <= tol) return x;
  }
  throw NumericalFailure(kModule, "richardson iteration did not converge");
}

NodeVector lazy_walk(const Graph& g, double alpha, int steps, std::span<const double> seed) {
  const MatrixKind kind = MatrixKind::lazy_walk(alpha);
  if (steps < 0) throw InvalidInput(kModule, "lazy walk step count must be >= 0");
  check_seed(g, seed);
  NodeVector q(seed.begin(), seed.end());
  NodeVector next(q.size());
  for (int s = 0; s < steps; ++s) {
    apply_matrix(g, kind, q, next);
    q.swap(next);
  }
  return q;
}

PowerMethodReport power_method(const Graph& g, PowerTarget target, std::span<const double> start, int max_iters,
                               double tol) {
  check_seed(g, start);
  if (max_iters < 0) throw InvalidInput(kModule, "max_iters must be >= 0");
  const std::size_t n = start.size();
  const bool deflate = target == PowerTarget::SecondOfNormalizedLaplacian;
  NodeVector trivial = g.sqrt_degrees();
  {
    const double norm = norm2(trivial);
    if (!(norm > 0.0)) throw InvalidInput(kModule, "power method needs a graph with edges");
    for (double& v : trivial) v /= norm;
  }
  auto project_and_normalize = [&](NodeVector& v) {
    if (deflate) {
      double c = 0.0;
      for (std::size_t i = 0; i < n; ++i) c += trivial[i] * v[i];
      for (std::size_t i = 0; i < n; ++i) v[i] -= c * trivial[i];
    }
    return norm2(v);
  };
  // w = (2I - Lnorm) v
  auto apply_shifted = [&](const NodeVector& v, NodeVector& w) {
    apply_matrix(g, MatrixKind::normalized_laplacian(), v, w);
    for (std::size_t i = 0; i < n; ++i) w[i] = 2.0 * v[i] - w[i];
  };

  PowerMethodReport report;
  NodeVector v(start.begin(), start.end());
  const double start_norm = norm2(v);
  const double norm = project_and_normalize(v);
  if (!(norm > 1e-12 * std::max(1.0, start_norm))) {
    throw InvalidInput(kModule, "power method start vector has no component along the target subspace");
  }
  for (double& x : v) x /= norm;

  NodeVector w(n);
  apply_shifted(v, w);
  double rayleigh = 0.0;
  for (std::size_t i = 0; i < n; ++i) rayleigh += v[i] * w[i];
  report.rayleigh_history.push_back(rayleigh);

  for (int it = 1; it <= max_iters; ++it) {
    const double wn = project_and_normalize(w);
    if (!(wn > 0.0)) break;  // landed in the kernel of the shifted operator
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / wn;
    apply_shifted(v, w);
    double next = 0.0;
    for (std::size_t i = 0; i < n; ++i) next += v[i] * w[i];
    report.rayleigh_history.push_back(next);
    report.iterations = it;
    const double delta = std::abs(next - rayleigh);
    rayleigh = next;
    if (delta < tol) {
      report.converged = true;
      break;
    }
  }

  Eigen::MatrixXd as_column = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(n));
  canonicalize_signs(as_column);
  report.vector.assign(as_column.data(), as_column.data() + n);
  report.eigenvalue = deflate ? 2.0 - rayleigh : rayleigh;
  return report;
}

NodeVector random_sign_vector(NodeId n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  NodeVector out(n);
  for (auto& x : out) x = (rng() >> 63) ? 1.0 : -1.0;
  return out;
}

}  // namespace implicitreg
