#include "implicitreg/local_clustering.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "implicitreg/error.hpp"
#include "implicitreg/regularization.hpp"

namespace implicitreg {

namespace {

constexpr const char* kModule = "local";

void check_seed_size(const Graph& g, const SeedDistribution& seed) {
  if (seed.size() != static_cast<std::size_t>(g.num_nodes())) {
    throw InvalidInput(kModule, "seed length does not match the graph");
  }
}

// Lexicographic tie-break on cluster candidates.
bool better(const Cluster& a, const Cluster& b) {
  if (a.conductance != b.conductance) return a.conductance < b.conductance;
  if (a.volume != b.volume) return a.volume < b.volume;
  return a.members < b.members;
}

}  // namespace

PushState push_ppr(const Graph& g, const SeedDistribution& seed, double gamma, double epsilon,
                   const PushObserver& observer) {
  check_seed_size(g, seed);
  if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidInput(kModule, "push: gamma must lie in (0,1)");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw InvalidInput(kModule, "push: epsilon must be positive");

  const auto n = static_cast<std::size_t>(g.num_nodes());
  PushState s;
  s.p.assign(n, 0.0);
  s.r = seed.values();
  s.gamma = gamma;
  s.epsilon = epsilon;
  s.touched.assign(n, 0);

  std::vector<char> queued(n, 0);
  std::deque<NodeId> queue;
  auto eligible = [&](NodeId v) { return s.r[v] > 0.0 && s.r[v] >= epsilon * g.degree(v); };
  for (std::size_t v = 0; v < n; ++v) {
    if (s.r[v] != 0.0) {
      s.touched[v] = 1;
      ++s.touched_count;
    }
    if (eligible(static_cast<NodeId>(v))) {
      queued[v] = 1;
      queue.push_back(static_cast<NodeId>(v));
    }
  }

  while (!queue.empty()) {
    const NodeId v = queue.front();
    queue.pop_front();
    queued[v] = 0;
    const double rv = s.r[v];
    s.p[v] += gamma * rv;
    s.r[v] = 0.0;
    const double spread = (1.0 - gamma) * rv / g.degree(v);
    const auto nb = g.neighbors(v);
    const auto w = g.weights(v);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      const NodeId u = nb[k];
      s.r[u] += spread * w[k];
      if (!s.touched[u]) {
        s.touched[u] = 1;
        ++s.touched_count;
      }
      if (!queued[u] && eligible(u)) {
        queued[u] = 1;
        queue.push_back(u);
      }
    }
    ++s.pushes;
    if (observer) observer(s, v);
  }
  return s;
}

TruncatedWalk truncated_walk(const Graph& g, const SeedDistribution& seed, double alpha, int steps,
                             double epsilon) {
  check_seed_size(g, seed);
  const MatrixKind kind = MatrixKind::lazy_walk(alpha);
  if (steps < 0) throw InvalidInput(kModule, "truncated walk: step count must be >= 0");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw InvalidInput(kModule, "truncated walk: epsilon must be nonnegative");
  }
  TruncatedWalk out;
  out.q = seed.values();
  NodeVector next(out.q.size());
  for (int step = 0; step < steps; ++step) {
    apply_matrix(g, kind, out.q, next);
    out.q.swap(next);
    if (epsilon > 0.0) {
      for (NodeId v = 0; v < g.num_nodes(); ++v) {
        if (out.q[v] < epsilon * g.degree(v)) out.q[v] = 0.0;
      }
    }
  }
  double total = 0.0;
  for (double x : out.q) total += x;
  out.lost_mass = 1.0 - total;
  return out;
}

SweepProfile local_sweep(const Graph& g, std::span<const double> mass) {
  if (mass.size() != static_cast<std::size_t>(g.num_nodes())) {
    throw InvalidInput(kModule, "local sweep: vector length does not match the graph");
  }
  std::vector<NodeId> support;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (!std::isfinite(mass[v]) || mass[v] < 0.0) {
      throw InvalidInput(kModule, "local sweep: mass must be finite and nonnegative");
    }
    if (mass[v] > 0.0) support.push_back(v);
  }
  if (support.empty()) throw InvalidInput(kModule, "local sweep: mass vector is zero");
  std::stable_sort(support.begin(), support.end(), [&](NodeId a, NodeId b) {
    return mass[a] / g.degree(a) > mass[b] / g.degree(b);
  });
  return sweep_order(g, std::move(support));
}

MovResult mov_solve(const Graph& g, const SeedDistribution& seed, double kappa, std::size_t dense_limit) {
  check_seed_size(g, seed);
  if (!(kappa >= 0.0 && kappa <= 1.0)) throw InvalidInput(kModule, "mov: kappa must lie in [0,1]");
  const LaplacianSpectrum spec = LaplacianSpectrum::of(g, dense_limit);
  const Eigen::Index n = spec.size();

  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) w[i] = std::sqrt(g.degree(static_cast<NodeId>(i))) * seed[i];
  w -= spec.trivial.dot(w) * spec.trivial;
  const double wn = w.norm();
  if (!(wn > 1e-12)) throw InvalidInput(kModule, "mov: seed has no component off the trivial eigenvector");
  w /= wn;
  const Eigen::VectorXd beta = spec.vectors.transpose() * w;
  const Eigen::VectorXd& lambda = spec.values;

  Eigen::Index mult = 1;
  while (mult < lambda.size() && lambda[mult] - lambda[0] <= kDegeneracyTol) ++mult;
  const double head_overlap = beta.head(mult).squaredNorm();

  MovResult out;
  Eigen::VectorXd x;
  double shift = lambda[0];
  if (head_overlap >= kappa) {
    // Unconstrained optimum: the lambda_2 eigenvector closest to the seed.
    x = head_overlap > 1e-24 ? Eigen::VectorXd(spec.vectors.leftCols(mult) * beta.head(mult))
                             : Eigen::VectorXd(spec.vectors.col(0));
  } else if (kappa >= 1.0) {
    x = w;
    shift = -std::numeric_limits<double>::infinity();
    out.gamma_star = shift;
  } else {
    auto coeffs = [&](double gamma) { return (beta.array() / (lambda.array() - gamma)).matrix().eval(); };
    auto overlap = [&](double gamma) {
      const Eigen::VectorXd c = coeffs(gamma);
      const double dot = beta.dot(c);
      return dot * dot / c.squaredNorm();
    };
    // overlap() decreases from 1 (gamma -> -inf) to head_overlap (gamma -> lambda_2).
    double span = 1.0;
    while (overlap(lambda[0] - span) < kappa) {
      span *= 2.0;
      if (span > 1e300) throw NumericalFailure(kModule, "mov: cannot bracket the constraint multiplier");
    }
    double lo = lambda[0] - span;
    double hi = lambda[0];
    for (int it = 0; it < 400; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (overlap(mid) >= kappa) lo = mid;
      else hi = mid;
    }
    shift = lo;  // keeps the constraint satisfied
    x = spec.vectors * coeffs(shift);
    out.gamma_star = shift;
  }
  x.normalize();
  if (x.dot(w) < 0.0) x = -x;

  const Eigen::VectorXd lx = spec.laplacian * x;
  out.rayleigh = x.dot(lx);
  const double dot = x.dot(w);
  out.overlap = dot * dot;
  if (std::isfinite(shift)) {
    // (L - gamma) x must be a multiple of w on the complement of d^{1/2}.
    Eigen::VectorXd res = lx - shift * x;
    res -= spec.trivial.dot(res) * spec.trivial;
    if (out.gamma_star) res -= w.dot(res) * w;
    out.kkt_residual = res.norm();
  }
  out.x.assign(x.data(), x.data() + n);
  return out;
}

LocalMethod LocalMethod::push(std::vector<double> gammas, double epsilon) {
  for (double gamma : gammas) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidInput(kModule, "push grid: gamma must lie in (0,1)");
  }
  if (!(epsilon >= 0.0)) throw InvalidInput(kModule, "push grid: epsilon must be nonnegative");
  return {Kind::Push, std::move(gammas), epsilon, 0.5};
}

LocalMethod LocalMethod::mov(std::vector<double> kappas) {
  for (double kappa : kappas) {
    if (!(kappa >= 0.0 && kappa <= 1.0)) throw InvalidInput(kModule, "mov grid: kappa must lie in [0,1]");
  }
  return {Kind::Mov, std::move(kappas), 0.0, 0.5};
}

LocalMethod LocalMethod::truncated_walk(double alpha, std::vector<double> steps, double epsilon) {
  for (double s : steps) {
    if (!(s >= 0.0) || s != std::floor(s)) throw InvalidInput(kModule, "truncwalk grid: steps must be integers >= 0");
  }
  return {Kind::TruncatedWalk, std::move(steps), epsilon, alpha};
}

std::string LocalMethod::name() const {
  switch (kind) {
    case Kind::Push: return "push";
    case Kind::Mov: return "mov";
    case Kind::TruncatedWalk: return "truncwalk";
  }
  return "unknown";
}

std::vector<double> LocalMethod::default_gamma_grid() {
  std::vector<double> grid;
  const double lo = std::log(1e-4);
  const double hi = std::log(0.5);
  for (int i = 0; i < 20; ++i) grid.push_back(std::exp(lo + (hi - lo) * i / 19.0));
  return grid;
}

LocalResult local_profile(const Graph& g, NodeId u, double k, const LocalMethod& method) {
  if (u < 0 || u >= g.num_nodes()) throw InvalidInput(kModule, "target node out of range");
  if (!(k >= g.degree(u))) throw InvalidInput(kModule, "volume budget is below the degree of the target node");
  if (k > g.total_volume()) throw InvalidInput(kModule, "volume budget exceeds the total volume");
  if (method.grid.empty()) throw InvalidInput(kModule, "empty parameter grid");
  const SeedDistribution seed = SeedDistribution::indicator(g.num_nodes(), u);

  LocalResult out;
  for (double param : method.grid) {
    ++out.grid_points;
    SweepProfile prof;
    switch (method.kind) {
      case LocalMethod::Kind::Push: {
        const double eps = method.epsilon > 0.0 ? method.epsilon : 1e-6 / k;
        const PushState s = push_ppr(g, seed, param, eps);
        if (s.pushes == 0) continue;
        prof = local_sweep(g, s.p);
        break;
      }
      case LocalMethod::Kind::Mov: {
        const MovResult m = mov_solve(g, seed, param);
        prof = sweep_cut(g, m.x, SweepOrdering::SqrtDegree);
        break;
      }
      case LocalMethod::Kind::TruncatedWalk: {
        const TruncatedWalk t = truncated_walk(g, seed, method.alpha, static_cast<int>(param), method.epsilon);
        if (std::none_of(t.q.begin(), t.q.end(), [](double x) { return x > 0.0; })) continue;
        prof = local_sweep(g, t.q);
        break;
      }
    }

    // Lowest-conductance prefix that contains u and fits the budget; the
    // earliest such prefix also has the smallest volume.
    double volume = 0.0;
    bool has_u = false;
    std::optional<std::size_t> pick;
    for (std::size_t i = 0; i < prof.prefix_conductance.size(); ++i) {
      volume += g.degree(prof.order[i]);
      has_u = has_u || prof.order[i] == u;
      if (volume > k) break;
      if (has_u && (!pick || prof.prefix_conductance[i] < prof.prefix_conductance[*pick])) pick = i;
    }
    if (!pick) continue;
    Cluster c = conductance(g, std::span<const NodeId>(prof.order.data(), *pick + 1));
    if (!out.cluster || better(c, *out.cluster)) {
      out.cluster = std::move(c);
      out.param = param;
    }
  }
  return out;
}

}  // namespace implicitreg
