// Regularity probes for the constraint system b - Ax in P, x in K.
//
// Strong simultaneity asks for a radius eps0 > 0 such that the system stays
// solvable for every right-hand side b_bar with ||b_bar - b|| <= eps0, i.e.
// that 0 is an interior point of AK - b + P. Unlike the Slater condition it
// does not need int P to be nonempty. When int P is nonempty the two
// conditions coincide, which check_equivalence verifies numerically.
//
// The eps0 estimate is a minimum over finitely many probed directions, so it
// can exceed the true radius when the binding direction is not probed.
// Reports say "estimated over N directions".
#pragma once

#include "cone_kkt/solver.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace cone_kkt {

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An eps0 estimate that a later feasibility call contradicts.
class ProbeConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Feasibility { Feasible, Infeasible, NotConverged };

struct FeasibilityResult {
  Feasibility status = Feasibility::NotConverged;
  Vector x;
  double residual = 0.0;
  double threshold = 0.0;
};

/// Runs phase-1 on b_bar. Feasible iff the residual is within
/// 1e-6 * (1 + ||b_bar||); Infeasible iff phase-1 became stationary above it.
inline FeasibilityResult feasibility(const ProblemSpec& prob, const Vector& b_bar,
                                     const SolverOptions& opts = {}) {
  const Phase1Result r = phase1(prob, b_bar, opts);
  FeasibilityResult out;
  out.x = r.x;
  out.residual = r.residual;
  out.threshold = 1e-6 * (1.0 + b_bar.norm());
  if (r.residual <= out.threshold)
    out.status = Feasibility::Feasible;
  else if (r.status == Phase1Status::Stationary)
    out.status = Feasibility::Infeasible;
  else
    out.status = Feasibility::NotConverged;
  return out;
}

/// Some x in K with b_bar - Ax in P, or nullopt when the system is infeasible.
/// Throws ConvergenceError if phase-1 neither converged nor found a point.
inline std::optional<Vector> feasible(const ProblemSpec& prob, const Vector& b_bar,
                                      const SolverOptions& opts = {}) {
  FeasibilityResult r = feasibility(prob, b_bar, opts);
  switch (r.status) {
    case Feasibility::Feasible: return std::move(r.x);
    case Feasibility::Infeasible: return std::nullopt;
    case Feasibility::NotConverged: break;
  }
  throw ConvergenceError("phase-1 did not converge (residual " +
                         std::to_string(r.residual) + ")");
}

struct ProbeOptions {
  std::size_t n_random_dirs = 64;
  std::uint64_t seed = 0;
  std::optional<double> lambda_max;  // default 4 (1 + ||b||)
  std::optional<double> bisect_tol;  // default 1e-4 (1 + ||b||)
  SolverOptions solver{};
};

struct DirectionProbe {
  Vector direction;  // unit in the p-norm of Y
  double lambda = 0.0;
  bool converged = true;
};

struct EpsilonReport {
  double eps_hat = 0.0;
  std::size_t directions_probed = 0;
  std::vector<DirectionProbe> per_direction;  // basis directions first, then random
  double norm_p = 2.0;
  double lambda_max = 0.0;
  double bisect_tol = 0.0;
  std::vector<std::string> warnings;

  std::size_t flagged() const {
    std::size_t k = 0;
    for (const auto& d : per_direction) k += d.converged ? 0 : 1;
    return k;
  }
};

/// Resolved probe defaults for `prob`: (lambda_max, bisect_tol).
inline std::pair<double, double> probe_scales(const ProblemSpec& prob,
                                              const ProbeOptions& opts) {
  const double bn = norm(prob.b, prob.p_norm_y);
  const double lmax = opts.lambda_max.value_or(4.0 * (1.0 + bn));
  const double btol = opts.bisect_tol.value_or(1e-4 * (1.0 + bn));
  if (!(lmax > 0.0)) throw std::invalid_argument("lambda_max must be > 0");
  if (!(btol > 0.0)) throw std::invalid_argument("bisect_tol must be > 0");
  return {lmax, btol};
}

namespace detail {

struct RayResult {
  double lambda = 0.0;
  bool converged = true;
  Vector x;  // witness at lambda when one was found
};

/// Largest lambda in [0, lambda_max] (to within tol) with b - lambda*dir
/// feasible. Feasibility along the ray is monotone because the set of
/// solvable right-hand sides AK + P is convex.
inline RayResult bisect_ray(const ProblemSpec& prob, const Vector& dir,
                            double lambda_max, double tol,
                            const SolverOptions& sopts) {
  RayResult out;
  auto test = [&](double lambda) -> std::optional<bool> {
    FeasibilityResult r = feasibility(prob, prob.b - lambda * dir, sopts);
    if (r.status == Feasibility::NotConverged) return std::nullopt;
    if (r.status == Feasibility::Feasible) out.x = std::move(r.x);
    return r.status == Feasibility::Feasible;
  };

  auto at_zero = test(0.0);
  if (!at_zero) { out.converged = false; return out; }
  if (!*at_zero) return out;
  const Vector x0 = out.x;
  auto at_max = test(lambda_max);
  if (!at_max) { out.converged = false; return out; }
  if (*at_max) { out.lambda = lambda_max; return out; }

  Vector best_x = x0;
  double lo = 0.0;
  double hi = lambda_max;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    auto ok = test(mid);
    if (!ok) { out.converged = false; break; }
    if (*ok) {
      lo = mid;
      best_x = out.x;
    } else {
      hi = mid;
    }
  }
  out.lambda = lo;
  out.x = std::move(best_x);
  return out;
}

}  // namespace detail

/// Estimates eps0 over the 2*dim_y signed basis directions plus
/// n_random_dirs seeded random unit directions.
inline EpsilonReport probe_strong_simultaneity(const ProblemSpec& prob,
                                               const ProbeOptions& opts = {}) {
  const auto [lmax, btol] = probe_scales(prob, opts);
  const auto m = prob.dim_y();
  EpsilonReport rep;
  rep.norm_p = prob.p_norm_y;
  rep.lambda_max = lmax;
  rep.bisect_tol = btol;

  std::vector<Vector> dirs;
  dirs.reserve(static_cast<std::size_t>(2 * m) + opts.n_random_dirs);
  for (std::ptrdiff_t i = 0; i < m; ++i) {
    dirs.push_back(Vector::Unit(m, i));
    dirs.push_back(-Vector::Unit(m, i));
  }
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  while (dirs.size() < static_cast<std::size_t>(2 * m) + opts.n_random_dirs) {
    Vector v(m);
    for (auto& e : v) e = gauss(rng);
    const double nv = norm(v, prob.p_norm_y);
    if (nv > 1e-12) dirs.push_back(v / nv);
  }

  rep.eps_hat = lmax;
  bool any = false;
  for (auto& d : dirs) {
    const detail::RayResult r = detail::bisect_ray(prob, d, lmax, btol, opts.solver);
    if (!r.converged) {
      rep.warnings.push_back("phase-1 did not converge along direction " +
                             std::to_string(rep.per_direction.size()) +
                             "; excluded from the minimum");
    } else {
      rep.eps_hat = std::min(rep.eps_hat, r.lambda);
      any = true;
    }
    rep.per_direction.push_back({std::move(d), r.lambda, r.converged});
  }
  if (!any) rep.eps_hat = 0.0;
  rep.directions_probed = rep.per_direction.size();
  return rep;
}

struct SlaterReport {
  bool holds = false;
  std::optional<Vector> witness;
  double margin = 0.0;  // min over Nonneg coords of P of (b - A*witness)
  std::string reason;
};

inline constexpr double kSlaterMarginTol = 1e-6;

/// Maximizes the margin t with (b - Ax)_i >= t on the Nonneg coordinates of P,
/// x in K, by bisection on the phase-1 engine. Fails immediately when P has
/// empty interior.
inline SlaterReport probe_slater(const ProblemSpec& prob, const ProbeOptions& opts = {}) {
  SlaterReport rep;
  if (!prob.P.has_interior()) {
    rep.reason = "empty interior";
    return rep;
  }
  const auto [lmax, btol] = probe_scales(prob, opts);
  const auto m = prob.dim_y();
  Vector dir = Vector::Zero(m);
  for (std::ptrdiff_t j = 0; j < m; ++j)
    if (prob.P[j] == ConeTag::Nonneg) dir(j) = 1.0;

  const detail::RayResult r = detail::bisect_ray(prob, dir, lmax, btol, opts.solver);
  if (!r.converged) throw ConvergenceError("Slater probe: phase-1 did not converge");
  if (r.x.size() == 0) {
    rep.reason = "constraints infeasible";
    return rep;
  }
  const Vector slack = prob.b - prob.A.apply(r.x);
  double margin = lmax;  // no Nonneg coordinate: P is the whole space
  for (std::ptrdiff_t j = 0; j < m; ++j)
    if (prob.P[j] == ConeTag::Nonneg) margin = std::min(margin, slack(j));
  if (r.lambda > kSlaterMarginTol && margin > 0.0) {
    rep.holds = true;
    rep.witness = r.x;
    rep.margin = margin;
  } else {
    rep.margin = std::max(r.lambda, 0.0);
    rep.reason = "no positive margin";
  }
  return rep;
}

/// Maximizer of <zstar, z> over the unit ball of the p-norm (the dual-norm
/// direction). For p = 2 this is zstar / ||zstar||_2.
inline Vector dual_norm_direction(const Vector& zstar, double p) {
  const auto m = zstar.size();
  Vector z0 = Vector::Zero(m);
  if (p == 2.0) return zstar / zstar.norm();
  if (p == 1.0) {
    Eigen::Index k = 0;
    zstar.cwiseAbs().maxCoeff(&k);
    z0(k) = zstar(k) > 0 ? 1.0 : -1.0;
    return z0;
  }
  if (p == kInfNorm) {
    for (Eigen::Index i = 0; i < m; ++i)
      z0(i) = zstar(i) > 0 ? 1.0 : (zstar(i) < 0 ? -1.0 : 0.0);
    return z0;
  }
  const double q = p / (p - 1.0);
  for (Eigen::Index i = 0; i < m; ++i)
    z0(i) = std::copysign(std::pow(std::abs(zstar(i)), q - 1.0), zstar(i));
  return z0 / norm(z0, p);
}

struct PairingWitness {
  Vector x;
  double pairing_value = 0.0;
};

/// For zstar in P* \ {0}, a point x in K with <zstar, b - Ax> > 0, built by
/// solving the system shifted by eps_hat along the direction maximizing
/// <zstar, .> over the unit ball. The pairing is then at least
/// eps_hat * ||zstar||_dual up to phase-1 tolerance.
inline PairingWitness lemma3_witness(const ProblemSpec& prob, const Vector& zstar,
                                    const EpsilonReport& eps,
                                    const SolverOptions& sopts = {}) {
  require_dim("lemma3_witness zstar", prob.dim_y(), zstar.size());
  if (!prob.P.dual().contains(zstar, 1e-8))
    throw std::invalid_argument("lemma3_witness: zstar is not in the dual cone of P");
  if (!(zstar.norm() > 0.0))
    throw std::invalid_argument("lemma3_witness: zstar must be nonzero");
  if (!(eps.eps_hat > 0.0))
    throw std::invalid_argument("lemma3_witness: eps_hat must be > 0");

  const Vector z0 = dual_norm_direction(zstar, eps.norm_p);
  const Vector b_bar = prob.b - eps.eps_hat * (1.0 - 1e-6) * z0;
  auto x = feasible(prob, b_bar, sopts);
  if (!x)
    throw ProbeConsistencyError(
        "lemma3_witness: shifted system infeasible; eps_hat overestimates eps0");
  PairingWitness w;
  w.pairing_value = zstar.dot(prob.b - prob.A.apply(*x));
  w.x = std::move(*x);
  return w;
}

struct EquivalenceReport {
  bool applicable = false;  // int P nonempty
  bool slater_holds = false;
  bool eps_positive = false;
  bool consistent = true;
};

struct RegularityReport {
  EpsilonReport eps;
  SlaterReport slater;
  EquivalenceReport equivalence;
};

inline EquivalenceReport compare_conditions(const ProblemSpec& prob,
                                            const EpsilonReport& eps,
                                            const SlaterReport& slater) {
  EquivalenceReport e;
  e.applicable = prob.P.has_interior();
  e.slater_holds = slater.holds;
  e.eps_positive = eps.eps_hat > 0.0;
  e.consistent = !e.applicable || (e.slater_holds == e.eps_positive);
  return e;
}

/// Runs both probes and compares them.
inline RegularityReport probe_regularity(const ProblemSpec& prob,
                                         const ProbeOptions& opts = {}) {
  RegularityReport r;
  r.eps = probe_strong_simultaneity(prob, opts);
  r.slater = probe_slater(prob, opts);
  r.equivalence = compare_conditions(prob, r.eps, r.slater);
  return r;
}

inline EquivalenceReport check_equivalence(const ProblemSpec& prob, std::uint64_t seed) {
  ProbeOptions opts;
  opts.seed = seed;
  return probe_regularity(prob, opts).equivalence;
}

}  // namespace cone_kkt
