#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "implicitreg/graph.hpp"
#include "implicitreg/numerics.hpp"
#include "implicitreg/partitioning.hpp"

namespace implicitreg {

// Approximate personalized PageRank state. Throughout a run
//   p + R_gamma(r) = R_gamma(seed),  R_gamma = gamma (I - (1-gamma) M)^{-1}.
struct PushState {
  NodeVector p;  // settled mass
  NodeVector r;  // residual
  double gamma = 0.0;
  double epsilon = 0.0;
  std::size_t pushes = 0;
  std::vector<char> touched;  // touched[v]: v ever held nonzero p or r
  std::size_t touched_count = 0;
};

// Called after every push with the node that was pushed.
using PushObserver = std::function<void(const PushState&, NodeId)>;

// Pushes nodes with r(v) >= epsilon * d(v) in FIFO order until none is left.
// Requires 0 < gamma < 1 and epsilon > 0.
PushState push_ppr(const Graph& g, const SeedDistribution& seed, double gamma, double epsilon,
                   const PushObserver& observer = {});

struct TruncatedWalk {
  NodeVector q;
  double lost_mass = 0.0;  // 1 - sum(q)
};

// q <- W_alpha q, then zero every q(v) < epsilon * d(v), `steps` times. With
// epsilon = 0 the result is bit-identical to lazy_walk().
TruncatedWalk truncated_walk(const Graph& g, const SeedDistribution& seed, double alpha, int steps,
                             double epsilon);

// Degree-normalized sweep over the support of a nonnegative mass vector.
SweepProfile local_sweep(const Graph& g, std::span<const double> mass);

struct MovResult {
  NodeVector x;                     // unit norm, orthogonal to d^{1/2}, x . D^{1/2}s >= 0
  std::optional<double> gamma_star; // empty when the locality constraint does not bind
  double overlap = 0.0;             // (x . D^{1/2}s)^2
  double kkt_residual = 0.0;
  double rayleigh = 0.0;            // x^T Lnorm x
};

// Locally-biased spectral program
//   minimize x^T Lnorm x  s.t. |x| = 1, x . d^{1/2} = 0, (x . D^{1/2}s)^2 >= kappa
// with D^{1/2}s projected off d^{1/2} and normalized first. Dense.
MovResult mov_solve(const Graph& g, const SeedDistribution& seed, double kappa,
                    std::size_t dense_limit = default_dense_limit());

struct LocalMethod {
  enum class Kind { Push, Mov, TruncatedWalk };
  Kind kind = Kind::Push;
  std::vector<double> grid;  // gamma (push), kappa (mov) or step counts (truncwalk)
  double epsilon = 0.0;      // push / truncwalk; 0 selects 1e-6 / k for push
  double alpha = 0.5;        // truncwalk

  static LocalMethod push(std::vector<double> gammas = default_gamma_grid(), double epsilon = 0.0);
  static LocalMethod mov(std::vector<double> kappas);
  static LocalMethod truncated_walk(double alpha, std::vector<double> steps, double epsilon);

  std::string name() const;  // "push", "mov", "truncwalk"

  // 20 geometric points in [1e-4, 0.5].
  static std::vector<double> default_gamma_grid();
};

struct LocalResult {
  std::optional<Cluster> cluster;  // empty: no sweep prefix contained u within the budget
  double param = 0.0;              // grid value that produced the cluster
  std::size_t grid_points = 0;
};

// Best-conductance sweep prefix that contains u and has volume <= k, over the
// method's parameter grid. Ties: smaller volume, then lexicographic members.
LocalResult local_profile(const Graph& g, NodeId u, double k, const LocalMethod& method);

}  // namespace implicitreg
