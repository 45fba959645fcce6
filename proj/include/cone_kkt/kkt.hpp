// Kuhn-Tucker residuals for a candidate pair (x0, z0), the accept/reject
// verdict built from them, and a sampled check of the saddle inequality
//
//     L(x0, z) <= L(x0, z0) <= L(x, z0)   for all x in K, z in P*.
//
// The primal feasibility residual is read as b - A x0 in P and the slackness
// residual as <z0, A x0 - b>, both evaluated at x0.
#pragma once

#include "cone_kkt/problem.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace cone_kkt {

struct KktResiduals {
  double r_stat = 0.0;   // dist(I'(x0) + A*z0, K*)
  double r_comp = 0.0;   // |<I'(x0) + A*z0, x0>|
  double r_pfeas = 0.0;  // dist(b - A x0, P) + dist(x0, K)
  double r_dfeas = 0.0;  // dist(z0, P*)
  double r_slack = 0.0;  // |<z0, A x0 - b>|

  double max() const {
    return std::max({r_stat, r_comp, r_pfeas, r_dfeas, r_slack});
  }
};

enum class KktCondition { Stationarity, Complementarity, PrimalFeasibility,
                          DualFeasibility, Slackness };

inline constexpr std::array<KktCondition, 5> kAllConditions = {
    KktCondition::Stationarity, KktCondition::Complementarity,
    KktCondition::PrimalFeasibility, KktCondition::DualFeasibility,
    KktCondition::Slackness};

inline std::string_view to_string(KktCondition c) noexcept {
  switch (c) {
    case KktCondition::Stationarity: return "stationarity";
    case KktCondition::Complementarity: return "complementarity";
    case KktCondition::PrimalFeasibility: return "primal feasibility";
    case KktCondition::DualFeasibility: return "dual feasibility";
    case KktCondition::Slackness: return "complementary slackness";
  }
  return "";
}

/// Short key used in certificate files.
inline std::string_view residual_key(KktCondition c) noexcept {
  switch (c) {
    case KktCondition::Stationarity: return "r_stat";
    case KktCondition::Complementarity: return "r_comp";
    case KktCondition::PrimalFeasibility: return "r_pfeas";
    case KktCondition::DualFeasibility: return "r_dfeas";
    case KktCondition::Slackness: return "r_slack";
  }
  return "";
}

inline double residual_of(const KktResiduals& r, KktCondition c) noexcept {
  switch (c) {
    case KktCondition::Stationarity: return r.r_stat;
    case KktCondition::Complementarity: return r.r_comp;
    case KktCondition::PrimalFeasibility: return r.r_pfeas;
    case KktCondition::DualFeasibility: return r.r_dfeas;
    case KktCondition::Slackness: return r.r_slack;
  }
  return 0.0;
}

inline double& residual_of(KktResiduals& r, KktCondition c) noexcept {
  switch (c) {
    case KktCondition::Stationarity: return r.r_stat;
    case KktCondition::Complementarity: return r.r_comp;
    case KktCondition::PrimalFeasibility: return r.r_pfeas;
    case KktCondition::DualFeasibility: return r.r_dfeas;
    case KktCondition::Slackness: return r.r_slack;
  }
  return r.r_stat;
}

inline void check_certificate_dims(const ProblemSpec& prob, const Certificate& cert) {
  require_dim("certificate x0", prob.dim_x(), cert.x0.size());
  require_dim("certificate z0", prob.dim_y(), cert.z0.size());
}

inline KktResiduals kkt_residuals(const ProblemSpec& prob, const Certificate& cert) {
  check_certificate_dims(prob, cert);
  const Vector& x = cert.x0;
  const Vector& z = cert.z0;
  const Vector g = lagrangian_grad_x(prob, x, z);
  const Vector slack = prob.b - prob.A.apply(x);

  KktResiduals r;
  r.r_stat = prob.K.dual().distance(g);
  r.r_comp = std::abs(g.dot(x));
  r.r_pfeas = prob.P.distance(slack) + prob.K.distance(x);
  r.r_dfeas = prob.P.dual().distance(z);
  r.r_slack = std::abs(z.dot(slack));
  return r;
}

struct FailedCondition {
  KktCondition condition;
  double residual;
};

struct Verdict {
  bool accepted = false;
  KktResiduals residuals;
  std::vector<FailedCondition> failures;
};

inline constexpr double kDefaultCertTol = 1e-6;

/// Accepted iff every residual is <= tol.
inline Verdict verify_certificate(const ProblemSpec& prob, const Certificate& cert,
                                  double tol = kDefaultCertTol) {
  if (!(tol > 0.0)) throw std::invalid_argument("verify_certificate: tol must be > 0");
  Verdict v;
  v.residuals = kkt_residuals(prob, cert);
  for (KktCondition c : kAllConditions) {
    const double r = residual_of(v.residuals, c);
    if (!(r <= tol)) v.failures.push_back({c, r});
  }
  v.accepted = v.failures.empty();
  return v;
}

enum class SaddleSide { Left, Right };

struct SaddleWitness {
  SaddleSide side;  // Left: a multiplier z; Right: a primal point x
  Vector point;
  double violation;
};

struct SaddleReport {
  std::size_t samples = 0;
  double max_left_violation = 0.0;
  double max_right_violation = 0.0;
  std::vector<SaddleWitness> worst_witnesses;  // at most 3, largest first

  double max_violation() const {
    return std::max(max_left_violation, max_right_violation);
  }
};

/// Deterministic points evaluated on top of the random draws.
struct SaddleExtraSamples {
  std::vector<Vector> x;
  std::vector<Vector> z;
};

/// Samples x = proj_K(gaussian) and z = proj_{P*}(gaussian) and records the
/// largest violations of both saddle inequalities. The points x = x0, x = 0,
/// z = 0 and z = z0 are always included. Sampling can refute a saddle point but
/// never prove one.
inline SaddleReport check_saddle(const ProblemSpec& prob, const Certificate& cert,
                                 std::size_t n_samples, std::uint64_t seed,
                                 double tol, const SaddleExtraSamples& extra = {}) {
  if (n_samples < 1) throw std::invalid_argument("check_saddle: n_samples must be >= 1");
  check_certificate_dims(prob, cert);
  const auto n = prob.dim_x();
  const auto m = prob.dim_y();
  const ConeSpec p_dual = prob.P.dual();
  const double l0 = lagrangian(prob, cert.x0, cert.z0);

  std::vector<SaddleWitness> witnesses;
  SaddleReport rep;
  rep.samples = n_samples;

  auto record = [&](SaddleSide side, const Vector& pt, double viol) {
    viol = std::max(viol, 0.0);
    double& slot = side == SaddleSide::Left ? rep.max_left_violation
                                            : rep.max_right_violation;
    slot = std::max(slot, viol);
    if (viol > tol) witnesses.push_back({side, pt, viol});
  };
  auto eval_x = [&](const Vector& x) {
    record(SaddleSide::Right, x, l0 - lagrangian(prob, x, cert.z0));
  };
  auto eval_z = [&](const Vector& z) {
    record(SaddleSide::Left, z, lagrangian(prob, cert.x0, z) - l0);
  };

  eval_x(cert.x0);
  eval_x(prob.K.project(Vector::Zero(n)));
  eval_z(Vector::Zero(m));
  eval_z(cert.z0);
  for (const auto& x : extra.x) {
    require_dim("check_saddle extra x", n, x.size());
    eval_x(prob.K.project(x));
  }
  for (const auto& z : extra.z) {
    require_dim("check_saddle extra z", m, z.size());
    eval_z(p_dual.project(z));
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector x(n);
  Vector z(m);
  for (std::size_t k = 0; k < n_samples; ++k) {
    for (auto i = 0; i < n; ++i) x(i) = gauss(rng);
    for (auto j = 0; j < m; ++j) z(j) = gauss(rng);
    eval_x(prob.K.project(x));
    eval_z(p_dual.project(z));
  }

  std::stable_sort(witnesses.begin(), witnesses.end(),
                   [](const SaddleWitness& a, const SaddleWitness& b) {
                     return a.violation > b.violation;
                   });
  if (witnesses.size() > 3) witnesses.resize(3);
  rep.worst_witnesses = std::move(witnesses);
  return rep;
}

}  // namespace cone_kkt
