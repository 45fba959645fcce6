// First-order solvers: a projected extragradient iteration for the saddle
// point of the Lagrange function over K x P*, and the projected-gradient
// phase-1 engine that decides whether b_bar - Ax in P has a solution x in K.
#pragma once

#include "cone_kkt/kkt.hpp"
#include "cone_kkt/problem.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace cone_kkt {

struct SolverOptions {
  double step_scale = 0.9;
  std::size_t max_iters = 200000;
  double residual_tol = 1e-8;
  std::uint64_t seed = 0;  // reserved for randomized restarts

  void check() const {
    if (!(step_scale > 0.0 && step_scale < 1.0))
      throw std::invalid_argument("SolverOptions: step_scale must lie in (0,1)");
    if (!(residual_tol > 0.0))
      throw std::invalid_argument("SolverOptions: residual_tol must be > 0");
  }
};

struct TracePoint {
  std::size_t iter;
  double lagrangian;
  double merit;  // max KKT residual
};

struct SolveTrace {
  std::size_t iters = 0;
  KktResiduals final_residuals;
  bool converged = false;
  double step = 0.0;
  std::vector<TracePoint> history;  // iterations 1, 2, 4, 8, ... and the last one
};

struct SaddleSolution {
  Certificate certificate;
  SolveTrace trace;
};

/// Lipschitz constant of the monotone operator (x,z) -> (Qx + c + A'z, b - Ax),
/// i.e. the spectral norm of [[Q, A'], [-A, 0]].
inline double saddle_lipschitz(const ProblemSpec& prob) {
  const auto n = prob.dim_x();
  const auto m = prob.dim_y();
  Matrix block = Matrix::Zero(n + m, n + m);
  block.topLeftCorner(n, n) = prob.objective.Q;
  block.topRightCorner(n, m) = prob.A.matrix().transpose();
  block.bottomLeftCorner(m, n) = -prob.A.matrix();
  return LinearMap(std::move(block)).operator_norm();
}

namespace detail {

/// Guess the active set at (x, z), then solve the equality-constrained KKT
/// system on it by least squares. Returns the candidate; callers keep it only
/// if its residuals are small.
inline Certificate polish(const ProblemSpec& prob, const Vector& x, const Vector& z,
                          const Vector& gx, const Vector& gz) {
  const auto n = prob.dim_x();
  const auto m = prob.dim_y();
  std::vector<Eigen::Index> free_x, act_y;
  for (Eigen::Index i = 0; i < n; ++i) {
    const ConeTag t = prob.K[i];
    if (t == ConeTag::Free || (t == ConeTag::Nonneg && x(i) > gx(i))) free_x.push_back(i);
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    const ConeTag t = prob.P[j];
    // slack b - Ax = -gz
    if (t == ConeTag::Zero || (t == ConeTag::Nonneg && z(j) > -gz(j))) act_y.push_back(j);
  }
  const auto nf = static_cast<Eigen::Index>(free_x.size());
  const auto ma = static_cast<Eigen::Index>(act_y.size());
  Matrix kkt = Matrix::Zero(nf + ma, nf + ma);
  Vector rhs(nf + ma);
  const Matrix& Q = prob.objective.Q;
  const Matrix& A = prob.A.matrix();
  for (Eigen::Index r = 0; r < nf; ++r) {
    for (Eigen::Index s = 0; s < nf; ++s) kkt(r, s) = Q(free_x[r], free_x[s]);
    for (Eigen::Index s = 0; s < ma; ++s) kkt(r, nf + s) = A(act_y[s], free_x[r]);
    rhs(r) = -prob.objective.c(free_x[r]);
  }
  for (Eigen::Index r = 0; r < ma; ++r) {
    for (Eigen::Index s = 0; s < nf; ++s) kkt(nf + r, s) = A(act_y[r], free_x[s]);
    rhs(nf + r) = prob.b(act_y[r]);
  }
  const Eigen::CompleteOrthogonalDecomposition<Matrix> dec(kkt);
  Vector sol = dec.solve(rhs);
  for (int k = 0; k < 2; ++k) sol += dec.solve(rhs - kkt * sol);  // iterative refinement
  Certificate out{Vector::Zero(n), Vector::Zero(m)};
  for (Eigen::Index r = 0; r < nf; ++r) out.x0(free_x[r]) = sol(r);
  for (Eigen::Index r = 0; r < ma; ++r) out.z0(act_y[r]) = sol(nf + r);
  return out;
}

}  // namespace detail

/// Extragradient iteration from x = proj_K(0), z = 0 with step
/// step_scale / L. Every kPolishEvery iterations an active-set polish is
/// tried; it replaces the iterate only if it meets residual_tol.
/// Stops once every KKT residual is <= residual_tol.
inline constexpr std::size_t kPolishEvery = 256;

inline SaddleSolution solve_saddle(const ProblemSpec& prob, const SolverOptions& opts = {}) {
  opts.check();
  const auto n = prob.dim_x();
  const auto m = prob.dim_y();
  const Matrix& Q = prob.objective.Q;
  const Vector& c = prob.objective.c;
  const Matrix& A = prob.A.matrix();
  const Vector& b = prob.b;
  const ConeSpec& K = prob.K;
  const ConeSpec p_dual = prob.P.dual();

  const double lip = saddle_lipschitz(prob);
  const double tau = lip > 0.0 ? opts.step_scale / lip : opts.step_scale;

  SaddleSolution out;
  out.trace.step = tau;
  Vector x = K.project(Vector::Zero(n));
  Vector z = Vector::Zero(m);

  out.trace.final_residuals = kkt_residuals(prob, {x, z});
  if (out.trace.final_residuals.max() <= opts.residual_tol) {
    out.trace.converged = true;
    out.certificate = {x, z};
    return out;
  }

  Vector gx = Q * x + c + A.transpose() * z;
  Vector gz = A * x - b;
  std::size_t next_log = 1;
  for (std::size_t it = 1; it <= opts.max_iters; ++it) {
    const Vector xb = K.project(x - tau * gx);
    const Vector zb = p_dual.project(z + tau * gz);
    const Vector gxb = Q * xb + c + A.transpose() * zb;
    const Vector gzb = A * xb - b;
    x = K.project(x - tau * gxb);
    z = p_dual.project(z + tau * gzb);

    gx = Q * x + c + A.transpose() * z;
    gz = A * x - b;
    KktResiduals r;
    r.r_stat = K.dual().distance(gx);
    r.r_comp = std::abs(gx.dot(x));
    r.r_pfeas = prob.P.distance(-gz) + K.distance(x);
    r.r_dfeas = p_dual.distance(z);
    r.r_slack = std::abs(z.dot(gz));

    if (r.max() > opts.residual_tol && it % kPolishEvery == 0) {
      Certificate cand = detail::polish(prob, x, z, gx, gz);
      const KktResiduals rc = kkt_residuals(prob, cand);
      if (rc.max() <= opts.residual_tol) {
        x = std::move(cand.x0);
        z = std::move(cand.z0);
        gx = Q * x + c + A.transpose() * z;
        gz = A * x - b;
        r = rc;
      }
    }

    out.trace.iters = it;
    out.trace.final_residuals = r;
    const bool done = r.max() <= opts.residual_tol;
    if (it == next_log || done || it == opts.max_iters) {
      out.trace.history.push_back({it, prob.objective.value(x) + z.dot(gz), r.max()});
      if (it == next_log) next_log *= 2;
    }
    if (done) {
      out.trace.converged = true;
      break;
    }
  }
  out.certificate = {std::move(x), std::move(z)};
  return out;
}

enum class Phase1Status { TargetReached, Stationary, IterationLimit };

struct Phase1Result {
  Vector x;
  double residual = 0.0;  // dist(P, b_bar - A x)
  std::size_t iters = 0;
  Phase1Status status = Phase1Status::IterationLimit;
};

/// Accelerated projected gradient (with gradient-based restart) on
/// 1/2 dist(P, b_bar - Ax)^2 over x in K with step step_scale / ||A||^2.
/// Stops when the residual drops below residual_tol, when the gradient
/// mapping vanishes, or at max_iters.
inline Phase1Result phase1(const ProblemSpec& prob, const Vector& b_bar,
                           const SolverOptions& opts = {}) {
  opts.check();
  require_dim("phase1 b_bar", prob.dim_y(), b_bar.size());
  const Matrix& A = prob.A.matrix();
  const ConeSpec& K = prob.K;
  const ConeSpec& P = prob.P;

  const double a_norm = prob.A.operator_norm();
  const double scale = 1.0 + b_bar.norm();
  const double target = opts.residual_tol;
  const double stationary_tol = 1e-12 * scale * std::max(a_norm, 1.0);

  auto defect_at = [&](const Vector& x) {
    const Vector slack = b_bar - A * x;
    return Vector(slack - P.project(slack));
  };

  Phase1Result res;
  res.x = K.project(Vector::Zero(prob.dim_x()));
  res.residual = defect_at(res.x).norm();
  if (res.residual <= target) {
    res.status = Phase1Status::TargetReached;
    return res;
  }
  if (a_norm == 0.0) {
    res.status = Phase1Status::Stationary;
    return res;
  }
  const double tau = opts.step_scale / (a_norm * a_norm);

  Vector best_x = res.x;
  double best = res.residual;
  Vector y = res.x;
  double t = 1.0;
  for (std::size_t it = 1; it <= opts.max_iters; ++it) {
    // grad of 1/2 |defect|^2 in x is -A' defect
    const Vector x_next = K.project(y + tau * (A.transpose() * defect_at(y)));
    const double move = (x_next - y).norm() / tau;
    const Vector step = x_next - res.x;
    if ((y - x_next).dot(step) > 0.0) {
      t = 1.0;
      y = x_next;
    } else {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      y = x_next + ((t - 1.0) / t_next) * step;
      t = t_next;
    }
    res.x = x_next;
    res.residual = defect_at(res.x).norm();
    res.iters = it;
    if (res.residual < best) {
      best = res.residual;
      best_x = res.x;
    }
    if (res.residual <= target) {
      res.status = Phase1Status::TargetReached;
      return res;
    }
    if (move <= stationary_tol) {
      res.status = Phase1Status::Stationary;
      break;
    }
  }
  res.x = std::move(best_x);
  res.residual = best;
  return res;
}

}  // namespace cone_kkt
