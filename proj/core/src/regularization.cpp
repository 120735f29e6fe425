#include "implicitreg/regularization.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "implicitreg/error.hpp"

namespace implicitreg {

namespace {

constexpr const char* kModule = "regularization";
constexpr double kDistinctEigenvalueGap = 1e-8;

std::string fmt(const char* pattern, double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, pattern, x);
  return buf;
}

// Finds s in [lo, hi] with f(s) = 0 for monotone f, given a sign change.
template <class F>
double bisect(F f, double lo, double hi) {
  const double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) == (fhi < 0.0)) {
    throw NumericalFailure(kModule, "bisection bracket [" + fmt("%.6g", lo) + ", " + fmt("%.6g", hi) +
                                        "] does not straddle a root (f = " + fmt("%.3g", flo) + ", " +
                                        fmt("%.3g", fhi) + ")");
  }
  const bool increasing = flo < 0.0;
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == increasing) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

Eigen::MatrixXd from_weights(const LaplacianSpectrum& spectrum, const Eigen::VectorXd& weights) {
  Eigen::MatrixXd x = spectrum.vectors * weights.asDiagonal() * spectrum.vectors.transpose();
  return 0.5 * (x + x.transpose());
}

FeasibilityResiduals worst(const FeasibilityResiduals& a, const FeasibilityResiduals& b) {
  return {std::max(a.symmetry, b.symmetry), std::max(a.psd, b.psd), std::max(a.trace, b.trace),
          std::max(a.trivial, b.trivial)};
}

bool is_degenerate(const LaplacianSpectrum& s) {
  return s.values.size() >= 2 && s.values[1] - s.values[0] <= kDegeneracyTol;
}

// Second-order continuation of a scalar convex function below `floor`.
struct SmoothedTerm {
  double floor;
  double (*f)(double, double);
  double (*df)(double, double);
  double (*d2f)(double, double);
  double p;

  double value(double x) const {
    if (x >= floor) return f(x, p);
    const double h = x - floor;
    return f(floor, p) + df(floor, p) * h + 0.5 * d2f(floor, p) * h * h;
  }
  double derivative(double x) const {
    if (x >= floor) return df(x, p);
    return df(floor, p) + d2f(floor, p) * (x - floor);
  }
};

SmoothedTerm smoothed_term(const Regularizer& reg, double floor) {
  switch (reg.type) {
    case Regularizer::Type::GeneralizedEntropy:
      return {floor, [](double x, double) { return x * std::log(x); },
              [](double x, double) { return std::log(x) + 1.0; }, [](double x, double) { return 1.0 / x; }, 0.0};
    case Regularizer::Type::LogDet:
      return {floor, [](double x, double) { return -std::log(x); }, [](double x, double) { return -1.0 / x; },
              [](double x, double) { return 1.0 / (x * x); }, 0.0};
    case Regularizer::Type::PNorm:
      return {floor, [](double x, double p) { return std::pow(x, p) / p; },
              [](double x, double p) { return std::pow(x, p - 1.0); },
              [](double x, double p) { return (p - 1.0) * std::pow(x, p - 2.0); }, reg.p};
  }
  throw InvalidInput(kModule, "unknown regularizer");
}

}  // namespace

Regularizer Regularizer::entropy(double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidInput(kModule, "eta must be positive");
  return {Type::GeneralizedEntropy, eta, 0.0};
}

Regularizer Regularizer::log_det(double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidInput(kModule, "eta must be positive");
  return {Type::LogDet, eta, 0.0};
}

Regularizer Regularizer::p_norm(double p, double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidInput(kModule, "eta must be positive");
  if (!(p > 1.0) || !std::isfinite(p)) throw InvalidInput(kModule, "p-norm exponent must exceed 1");
  return {Type::PNorm, eta, p};
}

std::string Regularizer::name() const {
  switch (type) {
    case Type::GeneralizedEntropy: return "entropy";
    case Type::LogDet: return "logdet";
    case Type::PNorm: return "pnorm";
  }
  return "unknown";
}

double Regularizer::value(std::span<const double> weights) const {
  double g = 0.0;
  for (double w : weights) {
    switch (type) {
      case Type::GeneralizedEntropy:
        if (w > 0.0) g += w * std::log(w);
        break;
      case Type::LogDet:
        if (!(w > 0.0)) return std::numeric_limits<double>::infinity();
        g -= std::log(w);
        break;
      case Type::PNorm:
        if (w > 0.0) g += std::pow(w, p) / p;
        break;
    }
  }
  return g;
}

LaplacianSpectrum LaplacianSpectrum::of(const Graph& g, std::size_t dense_limit) {
  require_dense(g, dense_limit, "LaplacianSpectrum");
  if (g.num_nodes() < 2 || !g.is_connected()) {
    throw InvalidInput(kModule, "spectral programs need a connected graph with at least two nodes");
  }
  LaplacianSpectrum s;
  s.laplacian = dense_matrix(g, MatrixKind::normalized_laplacian());
  s.laplacian = 0.5 * (s.laplacian + s.laplacian.transpose()).eval();
  s.trivial = trivial_direction(g);
  const Eigen::MatrixXd basis = complement_basis(s.trivial);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(basis.transpose() * s.laplacian * basis);
  if (solver.info() != Eigen::Success) throw NumericalFailure(kModule, "symmetric eigensolver failed");
  s.values = solver.eigenvalues();
  s.vectors = basis * solver.eigenvectors();
  canonicalize_signs(s.vectors);
  return s;
}

Eigen::VectorXd LaplacianSpectrum::eigenweights(const Eigen::MatrixXd& x) const {
  return (vectors.transpose() * x * vectors).diagonal();
}

SdpSolution solve_unregularized_sdp(const LaplacianSpectrum& spectrum) {
  const Eigen::Index m = spectrum.values.size();
  int multiplicity = 0;
  while (multiplicity < m && spectrum.values[multiplicity] - spectrum.values[0] <= kDegeneracyTol) ++multiplicity;
  Eigen::VectorXd weights = Eigen::VectorXd::Zero(m);
  weights.head(multiplicity).setConstant(1.0 / multiplicity);
  const Eigen::MatrixXd x = from_weights(spectrum, weights);
  SdpSolution out{DensityMatrix::checked(x, spectrum.trivial), weights, 0.0, 0.0, multiplicity > 1, multiplicity};
  out.objective = spectrum.values.dot(weights);
  return out;
}

SdpSolution solve_unregularized_sdp(const Graph& g, std::size_t dense_limit) {
  return solve_unregularized_sdp(LaplacianSpectrum::of(g, dense_limit));
}

SdpSolution solve_regularized_sdp(const LaplacianSpectrum& spectrum, const Regularizer& reg) {
  const Eigen::VectorXd& lambda = spectrum.values;
  const Eigen::Index m = lambda.size();
  const double eta = reg.eta;
  const Eigen::VectorXd excess = (lambda.array() - lambda[0]).matrix();
  Eigen::VectorXd w(m);
  double multiplier = 0.0;

  switch (reg.type) {
    case Regularizer::Type::GeneralizedEntropy: {
      w = (-eta * excess.array()).exp();
      break;
    }
    case Regularizer::Type::LogDet: {
      // s = lambda_2 + nu > 0; total(s) decreases from +inf to <= 1 at s_hi.
      auto total = [&](double s) { return (1.0 / (eta * (excess.array() + s))).sum() - 1.0; };
      const double hi = static_cast<double>(m) / eta;
      double lo = hi;
      for (int k = 0; k < 2000 && total(lo) <= 0.0; ++k) lo *= 0.5;
      const double s = bisect(total, lo, hi);
      w = 1.0 / (eta * (excess.array() + s));
      multiplier = s - lambda[0];
      break;
    }
    case Regularizer::Type::PNorm: {
      // s = c - eta lambda_2 in (0, 1]; total(s) increases from -1 to >= 0.
      const double exponent = 1.0 / (reg.p - 1.0);
      auto weights_at = [&](double s) {
        return (s - eta * excess.array()).max(0.0).pow(exponent).matrix().eval();
      };
      auto total = [&](double s) { return weights_at(s).sum() - 1.0; };
      const double s = bisect(total, 0.0, 1.0);
      w = weights_at(s);
      multiplier = s + eta * lambda[0];
      break;
    }
  }
  const double sum = w.sum();
  if (!(sum > 0.0) || !std::isfinite(sum)) throw NumericalFailure(kModule, "closed-form weights degenerate");
  w /= sum;

  const Eigen::MatrixXd x = from_weights(spectrum, w);
  SdpSolution out{DensityMatrix::checked(x, spectrum.trivial), w, 0.0, multiplier, is_degenerate(spectrum), 1};
  out.objective = lambda.dot(w) + reg.value(std::span<const double>(w.data(), static_cast<std::size_t>(m))) / eta;
  return out;
}

SdpSolution solve_regularized_sdp(const Graph& g, const Regularizer& reg, std::size_t dense_limit) {
  return solve_regularized_sdp(LaplacianSpectrum::of(g, dense_limit), reg);
}

double regularized_objective_value(const LaplacianSpectrum& spectrum, const Regularizer& reg,
                                   const Eigen::MatrixXd& x) {
  const Eigen::MatrixXd reduced = spectrum.vectors.transpose() * x * spectrum.vectors;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (reduced + reduced.transpose()),
                                                        Eigen::EigenvaluesOnly);
  Eigen::VectorXd w = solver.eigenvalues().cwiseMax(0.0);
  const double g = reg.value(std::span<const double>(w.data(), static_cast<std::size_t>(w.size())));
  return (spectrum.laplacian * x).trace() + g / reg.eta;
}

SdpObjective make_sdp_objective(const Eigen::MatrixXd& laplacian, const Regularizer& reg, double floor) {
  if (!(floor > 0.0)) throw InvalidInput(kModule, "smoothing floor must be positive");
  const SmoothedTerm term = smoothed_term(reg, floor);
  const double inv_eta = 1.0 / reg.eta;
  SdpObjective obj;
  obj.value = [laplacian, term, inv_eta](const SpectralPoint& p) {
    double g = 0.0;
    for (Eigen::Index i = 0; i < p.weights.size(); ++i) g += term.value(p.weights[i]);
    return (laplacian.array() * p.matrix.array()).sum() + inv_eta * g;
  };
  obj.gradient = [laplacian, term, inv_eta](const SpectralPoint& p) {
    Eigen::VectorXd d(p.weights.size());
    for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = term.derivative(p.weights[i]);
    Eigen::MatrixXd grad = laplacian + inv_eta * (p.vectors * d.asDiagonal() * p.vectors.transpose());
    return Eigen::MatrixXd(0.5 * (grad + grad.transpose()));
  };
  return obj;
}

PgResult solve_regularized_sdp_numerically(const LaplacianSpectrum& spectrum, const Regularizer& reg,
                                           const PgOptions& options, double floor) {
  const PsdSimplexProjection projection(spectrum.trivial);
  return projected_gradient_sdp(make_sdp_objective(spectrum.laplacian, reg, floor), projection, options);
}

DensityMatrix diffusion_operator(const LaplacianSpectrum& spectrum, const Graph& g, const DiffusionKind& kind) {
  const Eigen::Index n = spectrum.size();
  Eigen::VectorXd sqrt_d(n);
  for (Eigen::Index i = 0; i < n; ++i) sqrt_d[i] = std::sqrt(g.degree(static_cast<NodeId>(i)));
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd complement = identity - spectrum.trivial * spectrum.trivial.transpose();
  // D^{-1/2} T D^{1/2} for an operator T on the random-walk side.
  auto symmetrize_walk = [&](const Eigen::MatrixXd& t) {
    return Eigen::MatrixXd(sqrt_d.cwiseInverse().asDiagonal() * t * sqrt_d.asDiagonal());
  };

  // One-dimensional feasible set: its single point is every program's optimum
  // (the lazy operator can vanish there, e.g. alpha = 1/2 on a single edge).
  if (n == 2) return DensityMatrix::checked(complement, spectrum.trivial);

  Eigen::MatrixXd op;
  switch (kind.type) {
    case DiffusionKind::Type::HeatKernel: {
      op = (-kind.parameter * spectrum.laplacian).exp();
      break;
    }
    case DiffusionKind::Type::PageRank: {
      const double gamma = kind.parameter;
      const Eigen::MatrixXd walk = dense_matrix(g, MatrixKind::random_walk());
      const Eigen::MatrixXd resolvent = gamma * (identity - (1.0 - gamma) * walk).partialPivLu().solve(identity);
      op = symmetrize_walk(resolvent);
      break;
    }
    case DiffusionKind::Type::LazyWalk: {
      const Eigen::MatrixXd lazy = dense_matrix(g, MatrixKind::lazy_walk(kind.parameter));
      Eigen::MatrixXd base = complement * symmetrize_walk(lazy) * complement;
      base = 0.5 * (base + base.transpose()).eval();
      // Square-and-multiply, rescaling as we go: only the direction of the
      // result matters and high powers would otherwise underflow.
      op = complement;
      for (int k = kind.steps; k > 0; k >>= 1) {
        if (k & 1) {
          op = op * base;
          op /= op.cwiseAbs().maxCoeff();
        }
        if (k > 1) {
          base = base * base;
          base /= base.cwiseAbs().maxCoeff();
        }
      }
      break;
    }
  }
  Eigen::MatrixXd x = complement * op * complement;
  x = 0.5 * (x + x.transpose()).eval();
  const double trace = x.trace();
  if (!(trace > 0.0) || !std::isfinite(trace)) {
    throw NumericalFailure(kModule, kind.dynamics() + " operator has no mass off the trivial direction (" +
                                        kind.label() + ")");
  }
  x /= trace;
  try {
    return DensityMatrix::checked(std::move(x), spectrum.trivial);
  } catch (const NumericalFailure& e) {
    if (kind.type == DiffusionKind::Type::LazyWalk && kind.parameter < 0.5) {
      throw InvalidInput(kModule, "lazy walk with alpha < 1/2 is indefinite on this graph (" + kind.label() + ")");
    }
    throw;
  }
}

DensityMatrix diffusion_operator(const Graph& g, const DiffusionKind& kind, std::size_t dense_limit) {
  return diffusion_operator(LaplacianSpectrum::of(g, dense_limit), g, kind);
}

Regularizer calibrate(const LaplacianSpectrum& spectrum, const DensityMatrix& diffusion, const DiffusionKind& kind,
                      Regularizer::Type family, double p) {
  using RT = Regularizer::Type;
  using DT = DiffusionKind::Type;
  const bool paired = (kind.type == DT::HeatKernel && family == RT::GeneralizedEntropy) ||
                      (kind.type == DT::PageRank && family == RT::LogDet) ||
                      (kind.type == DT::LazyWalk && family == RT::PNorm);
  if (!paired) {
    throw InvalidInput(kModule, "unsupported pairing: " + kind.dynamics() + " with " +
                                    Regularizer{family, 1.0, p}.name());
  }
  if (kind.type == DT::HeatKernel) {
    if (!(kind.parameter > 0.0)) throw InvalidInput(kModule, "heat kernel at t = 0 is the eta -> 0 limit");
    return Regularizer::entropy(kind.parameter);
  }

  const Eigen::VectorXd& lambda = spectrum.values;
  const Eigen::Index m = lambda.size();
  Eigen::Index j = 1;
  while (j < m && lambda[j] - lambda[0] <= kDistinctEigenvalueGap) ++j;
  if (j == m) {
    // Flat nontrivial spectrum: every eta yields the uniform optimum.
    return family == RT::LogDet ? Regularizer::log_det(1.0) : Regularizer::p_norm(p, 1.0);
  }
  const Eigen::VectorXd rho = spectrum.eigenweights(diffusion.matrix());
  if (!(rho[j] > 0.0)) throw NumericalFailure(kModule, "calibration: vanishing eigenweight (" + kind.label() + ")");
  const double ratio = rho[0] / rho[j];

  if (family == RT::LogDet) {
    if (!(ratio > 1.0 + 1e-12)) {
      throw InvalidInput(kModule, "calibration: flat operator, no finite eta (" + kind.label() + ")");
    }
    const double nu = (lambda[j] - ratio * lambda[0]) / (ratio - 1.0);
    return Regularizer::log_det((1.0 / (lambda.array() + nu)).sum());
  }

  const double powered = std::pow(ratio, p - 1.0);
  if (!(powered > 1.0 + 1e-12) || !std::isfinite(powered)) {
    throw InvalidInput(kModule, "calibration: eigenweight ratio unusable at p = " + fmt("%.4g", p));
  }
  const double a = (powered * lambda[j] - lambda[0]) / (powered - 1.0);
  const double mass = (a - lambda.array()).max(0.0).pow(1.0 / (p - 1.0)).sum();
  return Regularizer::p_norm(p, std::pow(mass, -(p - 1.0)));
}

EquivalenceReport verify_equivalence(const LaplacianSpectrum& spectrum, const Graph& g, const DiffusionKind& kind,
                                     Regularizer::Type family, double p, const std::string& graph_id) {
  const DensityMatrix dynamics = diffusion_operator(spectrum, g, kind);
  const Regularizer reg = calibrate(spectrum, dynamics, kind, family, p);
  const SdpSolution sdp = solve_regularized_sdp(spectrum, reg);

  EquivalenceReport r;
  r.graph_id = graph_id.empty() ? g.fingerprint() : graph_id;
  r.diffusion = kind;
  r.regularizer = reg;
  r.frobenius_gap = (dynamics.matrix() - sdp.x.matrix()).norm();
  r.objective_gap = std::abs(regularized_objective_value(spectrum, reg, dynamics.matrix()) - sdp.objective);
  r.feasibility = worst(dynamics.residuals(), sdp.x.residuals());
  r.degenerate = sdp.degenerate;
  return r;
}

EquivalenceReport verify_equivalence(const Graph& g, const DiffusionKind& kind, Regularizer::Type family, double p,
                                     const std::string& graph_id) {
  return verify_equivalence(LaplacianSpectrum::of(g), g, kind, family, p, graph_id);
}

bool PNormFit::unimodal() const {
  constexpr double slack = 1e-14;
  for (std::size_t i = 0; i + 1 <= best && i + 1 < gaps.size(); ++i) {
    if (gaps[i + 1] > gaps[i] + slack) return false;
  }
  for (std::size_t i = best; i + 1 < gaps.size(); ++i) {
    if (gaps[i + 1] < gaps[i] - slack) return false;
  }
  return true;
}

PNormFit fit_pnorm(const LaplacianSpectrum& spectrum, const Graph& g, const DiffusionKind& lazy,
                   std::span<const double> p_grid, const std::string& graph_id) {
  if (lazy.type != DiffusionKind::Type::LazyWalk) throw InvalidInput(kModule, "fit_pnorm expects a lazy walk");
  if (p_grid.empty()) throw InvalidInput(kModule, "empty p grid");
  PNormFit fit;
  fit.p_grid.assign(p_grid.begin(), p_grid.end());
  double best_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    double gap = std::numeric_limits<double>::infinity();
    try {
      EquivalenceReport r = verify_equivalence(spectrum, g, lazy, Regularizer::Type::PNorm, p_grid[i], graph_id);
      gap = r.frobenius_gap;
      if (gap < best_gap) {
        best_gap = gap;
        fit.best = i;
        fit.best_report = std::move(r);
      }
    } catch (const InvalidInput&) {
      // Calibration impossible at this p; leave the gap infinite.
    }
    fit.gaps.push_back(gap);
  }
  if (!std::isfinite(best_gap)) throw NumericalFailure(kModule, "p-norm calibration failed on the whole grid");
  fit.best_report.best_fit_p = fit.p_grid[fit.best];
  return fit;
}

std::vector<double> default_p_grid() {
  std::vector<double> grid;
  for (int k = 11; k <= 40; ++k) grid.push_back(k / 10.0);
  return grid;
}

std::string to_csv_row(const EquivalenceReport& r) {
  std::string dynamics = r.diffusion.dynamics();
  std::string param;
  if (r.diffusion.type == DiffusionKind::Type::LazyWalk) {
    dynamics += "(alpha=" + fmt("%.6g", r.diffusion.parameter) + ")";
    param = std::to_string(r.diffusion.steps);
  } else {
    param = fmt("%.6g", r.diffusion.parameter);
  }
  std::string regularizer = r.regularizer.name();
  if (r.best_fit_p) {
    regularizer += "(best_fit_p=" + fmt("%.4g", *r.best_fit_p) + ")";
  } else if (r.regularizer.type == Regularizer::Type::PNorm) {
    regularizer += "(p=" + fmt("%.4g", r.regularizer.p) + ")";
  }
  return r.graph_id + ',' + dynamics + ',' + param + ',' + regularizer + ',' + fmt("%.10g", r.regularizer.eta) +
         ',' + fmt("%.6e", r.frobenius_gap) + ',' + fmt("%.6e", r.objective_gap) + ',' +
         fmt("%.3e", r.feasibility.psd) + ',' + fmt("%.3e", r.feasibility.trace) + ',' +
         fmt("%.3e", r.feasibility.trivial) + ',' + (r.degenerate ? "1" : "0");
}

}  // namespace implicitreg
