#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "implicitreg/graph.hpp"
#include "implicitreg/numerics.hpp"

namespace implicitreg {

// The three seed-vector dynamics and their aggressiveness parameter.
//   HeatKernel(t)          exp(-t Lnorm)                  t >= 0
//   PageRank(gamma)        gamma (I - (1-gamma) M)^{-1}   gamma in (0,1]
//   LazyWalk(alpha, k)     (alpha I + (1-alpha) M)^k      alpha in (0,1), k >= 0
struct DiffusionKind {
  enum class Type { HeatKernel, PageRank, LazyWalk };

  Type type = Type::HeatKernel;
  double parameter = 0.0;
  int steps = 0;  // LazyWalk only

  static DiffusionKind heat_kernel(double t);
  static DiffusionKind page_rank(double gamma);
  static DiffusionKind lazy_walk(double alpha, int steps);

  std::string dynamics() const;  // "heat", "pagerank", "lazy"
  std::string label() const;     // e.g. "t=0.5", "alpha=0.5;steps=2"
};

inline constexpr double kRichardsonTol = 1e-10;
inline constexpr double kPowerMethodTol = 1e-12;

// exp(-t Lnorm) seed through the dense eigendecomposition.
NodeVector heat_kernel_exact(const Graph& g, double t, std::span<const double> seed,
                             std::size_t dense_limit = default_dense_limit());
// sum_{j <= terms} (-t)^j Lnorm^j / j! seed, by sparse products only.
NodeVector heat_kernel_series(const Graph& g, double t, std::span<const double> seed, int terms);

// Dense LU solve of (I - (1-gamma) M) x = gamma seed.
NodeVector pagerank_exact(const Graph& g, double gamma, std::span<const double> seed,
                          std::size_t dense_limit = default_dense_limit());
// x <- gamma seed + (1-gamma) M x until ||dx||_1 <= tol.
NodeVector pagerank_richardson(const Graph& g, double gamma, std::span<const double> seed,
                               double tol = kRichardsonTol);

NodeVector lazy_walk(const Graph& g, double alpha, int steps, std::span<const double> seed);

enum class PowerTarget {
  DominantOfShifted,           // top eigenpair of 2I - Lnorm
  SecondOfNormalizedLaplacian  // same operator, deflated against d^{1/2} every step
};

struct PowerMethodReport {
  // DominantOfShifted: eigenvalue of 2I - Lnorm.
  // SecondOfNormalizedLaplacian: lambda_2 of Lnorm, i.e. 2 - rayleigh.
  double eigenvalue = 0.0;
  NodeVector vector;                   // unit norm
  int iterations = 0;
  bool converged = false;
  std::vector<double> rayleigh_history;  // of 2I - Lnorm, one entry per iterate (start included)
};

// Plain power iteration. Stops when successive Rayleigh quotients differ by
// less than tol; running out of iterations is reported, not thrown, since the
// truncated iterate is itself an object of study. Throws InvalidInput when the
// start has no component along the target subspace.
PowerMethodReport power_method(const Graph& g, PowerTarget target, std::span<const double> start, int max_iters,
                               double tol = kPowerMethodTol);

// Deterministic +-1 start vector.
NodeVector random_sign_vector(NodeId n, std::uint64_t seed);

}  // namespace implicitreg
