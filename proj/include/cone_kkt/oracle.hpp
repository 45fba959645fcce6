// Exact reference solutions at tiny dimension by active-set enumeration.
//
// Every subset of the inequality constraints is treated as active, the
// resulting equality-constrained problem is solved by the null-space method,
// and the best primal-feasible candidate wins. Free primal coordinates are split into
// x+ - x- so the feasible polyhedron is pointed; then some optimal extreme
// point always yields a subsystem with a unique minimizer, and subsets
// without one can be skipped.
#pragma once

#include "cone_kkt/kkt.hpp"
#include "cone_kkt/problem.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace cone_kkt {

class EnumerationGuardError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class OracleInfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::ptrdiff_t kOracleMaxTotalDim = 14;
inline constexpr int kOracleMaxInequalities = 24;

namespace enumeration {

/// minimize 1/2 u'Hu + f'u  s.t.  u_i per `var` tag,  G_j u <= h_j (or == h_j if row_eq[j]).
struct Qp {
  Matrix H;
  Vector f;
  std::vector<ConeTag> var;
  Matrix G;
  Vector h;
  std::vector<bool> row_eq;

  std::ptrdiff_t nvars() const { return f.size(); }
  std::ptrdiff_t nrows() const { return h.size(); }
};

struct Result {
  Vector u;
  double value = 0.0;
  std::vector<int> active;  // inequality indices: vars first, then rows offset by nvars
};

inline double qp_value(const Qp& qp, const Vector& u) {
  return 0.5 * u.dot(qp.H * u) + qp.f.dot(u);
}

inline bool qp_feasible(const Qp& qp, const Vector& u, double tol) {
  for (std::ptrdiff_t i = 0; i < qp.nvars(); ++i) {
    if (qp.var[static_cast<std::size_t>(i)] == ConeTag::Nonneg && u(i) < -tol) return false;
    if (qp.var[static_cast<std::size_t>(i)] == ConeTag::Zero && std::abs(u(i)) > tol) return false;
  }
  if (qp.nrows() > 0) {
    const Vector r = qp.G * u - qp.h;
    for (std::ptrdiff_t j = 0; j < qp.nrows(); ++j) {
      if (qp.row_eq[static_cast<std::size_t>(j)] ? std::abs(r(j)) > tol : r(j) > tol)
        return false;
    }
  }
  return true;
}

/// Global minimizer by enumeration; nullopt if no subset yields a feasible point.
/// Ties within 1e-10 relative are broken by the lexicographically smallest
/// active index list.
inline std::optional<Result> solve(const Qp& qp, double feas_tol = 1e-10) {
  const auto n = qp.nvars();
  std::vector<int> ineq;  // candidate indices into vars (i) or rows (n + j)
  std::vector<int> always_eq;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const ConeTag t = qp.var[static_cast<std::size_t>(i)];
    if (t == ConeTag::Nonneg) ineq.push_back(static_cast<int>(i));
    if (t == ConeTag::Zero) always_eq.push_back(static_cast<int>(i));
  }
  for (std::ptrdiff_t j = 0; j < qp.nrows(); ++j) {
    if (qp.row_eq[static_cast<std::size_t>(j)])
      always_eq.push_back(static_cast<int>(n + j));
    else
      ineq.push_back(static_cast<int>(n + j));
  }
  if (static_cast<int>(ineq.size()) > kOracleMaxInequalities)
    throw EnumerationGuardError("enumeration: too many inequality constraints");

  const double scale = 1.0 + std::max(qp.h.size() ? qp.h.cwiseAbs().maxCoeff() : 0.0,
                                      qp.f.size() ? qp.f.cwiseAbs().maxCoeff() : 0.0);
  const double tol = feas_tol * scale;

  auto constraint_row = [&](int idx, Eigen::Ref<Vector> row, double& rhs) {
    row.setZero();
    if (idx < n) {
      row(idx) = 1.0;
      rhs = 0.0;
    } else {
      row = qp.G.row(idx - n).transpose();
      rhs = qp.h(idx - n);
    }
  };
  std::ptrdiff_t base_rank = 0;
  if (!always_eq.empty()) {
    Matrix E(static_cast<std::ptrdiff_t>(always_eq.size()), n);
    double unused = 0.0;
    for (std::size_t r = 0; r < always_eq.size(); ++r) {
      Vector row(n);
      constraint_row(always_eq[r], row, unused);
      E.row(static_cast<std::ptrdiff_t>(r)) = row.transpose();
    }
    Eigen::FullPivLU<Matrix> lu(E);
    lu.setThreshold(1e-10);
    base_rank = lu.rank();
  }
  const double h_scale = 1.0 + (qp.H.size() ? qp.H.cwiseAbs().maxCoeff() : 0.0);

  std::optional<Result> best;
  const std::uint64_t n_masks = std::uint64_t{1} << ineq.size();
  std::vector<int> active;
  for (std::uint64_t mask = 0; mask < n_masks; ++mask) {
    // A larger active set cannot add independent rows beyond dim n.
    if (std::popcount(mask) > n - base_rank) continue;
    active.clear();
    for (std::size_t b = 0; b < ineq.size(); ++b)
      if (mask >> b & 1u) active.push_back(ineq[b]);

    const auto ne = static_cast<std::ptrdiff_t>(always_eq.size() + active.size());
    Matrix E(ne, n);
    Vector e(ne);
    std::ptrdiff_t r = 0;
    for (const auto* list : {&always_eq, &active}) {
      for (int idx : *list) {
        Vector row(n);
        constraint_row(idx, row, e(r));
        E.row(r++) = row.transpose();
      }
    }

    // Null-space method: u = u_p + Z w with E u_p = e and E Z = 0.
    Vector u = Vector::Zero(n);
    Matrix Z = Matrix::Identity(n, n);
    if (ne > 0) {
      Eigen::JacobiSVD<Matrix> svd(E, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const Vector& sv = svd.singularValues();
      const double cut = 1e-10 * std::max(1.0, sv.size() ? sv(0) : 0.0);
      std::ptrdiff_t rank = 0;
      while (rank < sv.size() && sv(rank) > cut) ++rank;
      const Vector ut_e = svd.matrixU().leftCols(rank).transpose() * e;
      u = svd.matrixV().leftCols(rank) * ut_e.cwiseQuotient(sv.head(rank));
      if ((E * u - e).norm() > 1e-9 * (1.0 + e.cwiseAbs().maxCoeff())) continue;
      Z = svd.matrixV().rightCols(n - rank);
    }
    if (Z.cols() > 0) {
      const Matrix reduced = Z.transpose() * qp.H * Z;
      Eigen::SelfAdjointEigenSolver<Matrix> eig(reduced);
      if (eig.eigenvalues()(0) <= 1e-10 * h_scale) continue;  // not a unique minimizer
      const Vector w = eig.eigenvectors() *
                       (eig.eigenvalues().cwiseInverse().asDiagonal() *
                        (eig.eigenvectors().transpose() * (Z.transpose() * (qp.H * u + qp.f))));
      u -= Z * w;
    }
    if (!u.allFinite() || !qp_feasible(qp, u, tol)) continue;
    const double val = qp_value(qp, u);
    bool take = !best;
    if (best) {
      const double gap = 1e-10 * (1.0 + std::abs(best->value));
      if (val < best->value - gap)
        take = true;
      else if (val <= best->value + gap)
        take = std::lexicographical_compare(active.begin(), active.end(),
                                            best->active.begin(), best->active.end());
    }
    if (take) best = Result{std::move(u), val, active};
  }
  return best;
}

/// Null-cone test: true iff d = 0 is the only solution of E d = 0, F d >= 0.
inline bool cone_is_trivial(const Matrix& E, const Matrix& F, double tol = 1e-8) {
  const auto k = std::max(E.cols(), F.cols());
  if (k == 0) return true;
  if (E.rows() + F.rows() == 0) return false;
  Matrix all(E.rows() + F.rows(), k);
  if (E.rows() > 0) all.topRows(E.rows()) = E;
  if (F.rows() > 0) all.bottomRows(F.rows()) = F;
  Eigen::FullPivLU<Matrix> lu_all(all);
  lu_all.setThreshold(tol);
  if (lu_all.rank() < k) return false;  // contains a line
  if (F.rows() == 0) return true;
  // Pointed: nontrivial iff some extreme ray satisfies F d >= 0.
  const auto nf = F.rows();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << nf); ++mask) {
    if (static_cast<std::ptrdiff_t>(std::popcount(mask)) > k - 1) continue;
    if (E.rows() + std::popcount(mask) == 0) {
      // k == 1: the only candidate rays are +-1.
      const Vector fd = F.col(0);
      if (fd.minCoeff() >= -tol || (-fd).minCoeff() >= -tol) return false;
      continue;
    }
    Matrix sub(E.rows() + std::popcount(mask), k);
    sub.topRows(E.rows()) = E;
    std::ptrdiff_t r = E.rows();
    for (std::ptrdiff_t j = 0; j < nf; ++j)
      if (mask >> j & 1u) sub.row(r++) = F.row(j);
    Eigen::FullPivLU<Matrix> lu(sub);
    lu.setThreshold(tol);
    if (lu.rank() != k - 1) continue;
    Vector d = lu.kernel().col(0);
    d /= d.norm();
    const Vector fd = F * d;
    if (fd.minCoeff() >= -tol || (-fd).minCoeff() >= -tol) return false;
  }
  return true;
}

/// Maps x in K to u >= 0 coordinates by splitting Free coordinates: x = T u.
inline Matrix split_free(const ConeSpec& K, std::vector<ConeTag>& var_tags) {
  const auto n = K.dim();
  std::vector<std::ptrdiff_t> free_idx;
  for (std::ptrdiff_t i = 0; i < n; ++i)
    if (K[i] == ConeTag::Free) free_idx.push_back(i);
  const auto nf = static_cast<std::ptrdiff_t>(free_idx.size());
  Matrix T = Matrix::Zero(n, n + nf);
  T.leftCols(n).setIdentity();
  var_tags.clear();
  for (std::ptrdiff_t i = 0; i < n; ++i)
    var_tags.push_back(K[i] == ConeTag::Free ? ConeTag::Nonneg : K[i]);
  for (std::ptrdiff_t f = 0; f < nf; ++f) {
    T(free_idx[static_cast<std::size_t>(f)], n + f) = -1.0;
    var_tags.push_back(ConeTag::Nonneg);
  }
  return T;
}

}  // namespace enumeration

struct OracleSolution {
  Vector x_opt;
  double value = 0.0;
  std::vector<int> active_set;  // i < dim_x: x_i >= 0 binds; dim_x + j: row j of b - Ax in P binds
  Vector z_recovered;
  bool unique_multiplier = true;
};

inline void oracle_guard(const ProblemSpec& prob) {
  if (prob.dim_x() + prob.dim_y() > kOracleMaxTotalDim)
    throw EnumerationGuardError("oracle: dim_x + dim_y = " +
                                std::to_string(prob.dim_x() + prob.dim_y()) +
                                " exceeds the enumeration guard of " +
                                std::to_string(kOracleMaxTotalDim));
}

/// Minimal-norm multiplier at a known optimum, with a uniqueness flag.
inline std::pair<Vector, bool> recover_multiplier(const ProblemSpec& prob,
                                                  const Vector& x,
                                                  double act_tol) {
  const auto n = prob.dim_x();
  const auto m = prob.dim_y();
  const Matrix& A = prob.A.matrix();
  const Vector grad_i = prob.objective.gradient(x);
  const Vector slack = prob.b - A * x;

  enumeration::Qp qp;
  qp.H = Matrix::Identity(m, m);
  qp.f = Vector::Zero(m);
  qp.var.resize(static_cast<std::size_t>(m));
  for (std::ptrdiff_t j = 0; j < m; ++j) {
    switch (prob.P[j]) {
      case ConeTag::Free: qp.var[static_cast<std::size_t>(j)] = ConeTag::Zero; break;
      case ConeTag::Zero: qp.var[static_cast<std::size_t>(j)] = ConeTag::Free; break;
      case ConeTag::Nonneg:
        qp.var[static_cast<std::size_t>(j)] =
            slack(j) > act_tol ? ConeTag::Zero : ConeTag::Nonneg;
        break;
    }
  }
  // Stationarity rows: (A'z)_i = -I'(x)_i where x_i may move, -(A'z)_i <= I'(x)_i at a bound.
  std::vector<Vector> rows;
  std::vector<double> rhs;
  std::vector<bool> eq;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const ConeTag t = prob.K[i];
    if (t == ConeTag::Zero) continue;
    if (t == ConeTag::Free || x(i) > act_tol) {
      rows.push_back(A.col(i));
      rhs.push_back(-grad_i(i));
      eq.push_back(true);
    } else {
      rows.push_back(-A.col(i));
      rhs.push_back(grad_i(i));
      eq.push_back(false);
    }
  }
  qp.G.resize(static_cast<std::ptrdiff_t>(rows.size()), m);
  qp.h.resize(static_cast<std::ptrdiff_t>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    qp.G.row(static_cast<std::ptrdiff_t>(r)) = rows[r].transpose();
    qp.h(static_cast<std::ptrdiff_t>(r)) = rhs[r];
  }
  qp.row_eq = eq;

  auto res = enumeration::solve(qp, 1e-9);
  if (!res) throw OracleInfeasibleError("oracle: no multiplier satisfies the KKT conditions");
  const Vector z = prob.P.dual().project(res->u) + Vector::Zero(m);  // no -0 entries

  // Directions d that keep z a valid multiplier: free variables only.
  std::vector<std::ptrdiff_t> movable;
  for (std::ptrdiff_t j = 0; j < m; ++j)
    if (qp.var[static_cast<std::size_t>(j)] != ConeTag::Zero) movable.push_back(j);
  const auto k = static_cast<std::ptrdiff_t>(movable.size());
  std::vector<Vector> e_rows;
  std::vector<Vector> f_rows;
  const double tight = 1e-8;
  for (std::ptrdiff_t j = 0; j < k; ++j) {
    const auto col = movable[static_cast<std::size_t>(j)];
    if (qp.var[static_cast<std::size_t>(col)] == ConeTag::Nonneg && z(col) <= tight)
      f_rows.push_back(Vector::Unit(k, j));
  }
  for (std::ptrdiff_t r = 0; r < qp.G.rows(); ++r) {
    Vector row(k);
    for (std::ptrdiff_t j = 0; j < k; ++j) row(j) = qp.G(r, movable[static_cast<std::size_t>(j)]);
    if (qp.row_eq[static_cast<std::size_t>(r)])
      e_rows.push_back(row);
    else if (qp.G.row(r).dot(z) - qp.h(r) >= -tight)
      f_rows.push_back(-row);  // G d <= 0 keeps a tight row feasible
  }
  auto stack = [k](const std::vector<Vector>& v) {
    Matrix M(static_cast<std::ptrdiff_t>(v.size()), k);
    for (std::size_t r = 0; r < v.size(); ++r) M.row(static_cast<std::ptrdiff_t>(r)) = v[r].transpose();
    return M;
  };
  const bool unique = enumeration::cone_is_trivial(stack(e_rows), stack(f_rows), tight);
  return {z, unique};
}

inline OracleSolution oracle_solve(const ProblemSpec& prob) {
  oracle_guard(prob);
  const auto m = prob.dim_y();
  const Matrix& A = prob.A.matrix();

  enumeration::Qp qp;
  const Matrix T = enumeration::split_free(prob.K, qp.var);
  qp.H = T.transpose() * prob.objective.Q * T;
  qp.f = T.transpose() * prob.objective.c;
  std::vector<std::ptrdiff_t> kept;
  for (std::ptrdiff_t j = 0; j < m; ++j)
    if (prob.P[j] != ConeTag::Free) kept.push_back(j);
  const Matrix AT = A * T;
  qp.G.resize(static_cast<std::ptrdiff_t>(kept.size()), T.cols());
  qp.h.resize(static_cast<std::ptrdiff_t>(kept.size()));
  for (std::size_t r = 0; r < kept.size(); ++r) {
    const auto j = kept[r];
    qp.G.row(static_cast<std::ptrdiff_t>(r)) = AT.row(j);
    qp.h(static_cast<std::ptrdiff_t>(r)) = prob.b(j);
    qp.row_eq.push_back(prob.P[j] == ConeTag::Zero);
  }

  auto res = enumeration::solve(qp);
  if (!res) throw OracleInfeasibleError("oracle: no feasible point");

  OracleSolution sol;
  sol.x_opt = prob.K.project(T * res->u);
  sol.value = prob.objective.value(sol.x_opt);

  const Vector slack = prob.b - A * sol.x_opt;
  const double act_tol = 1e-9 * (1.0 + sol.x_opt.cwiseAbs().maxCoeff() +
                                 prob.b.cwiseAbs().maxCoeff());
  for (std::ptrdiff_t i = 0; i < prob.dim_x(); ++i)
    if (prob.K[i] == ConeTag::Nonneg && sol.x_opt(i) <= act_tol)
      sol.active_set.push_back(static_cast<int>(i));
  for (std::ptrdiff_t j = 0; j < m; ++j)
    if (prob.P[j] == ConeTag::Zero ||
        (prob.P[j] == ConeTag::Nonneg && slack(j) <= act_tol))
      sol.active_set.push_back(static_cast<int>(prob.dim_x() + j));

  std::tie(sol.z_recovered, sol.unique_multiplier) =
      recover_multiplier(prob, sol.x_opt, act_tol);
  return sol;
}

struct OraclePhase1 {
  Vector x;
  double distance = 0.0;  // min over x in K of dist(P, b_bar - Ax)
};

/// Exact phase-1: minimizes dist(P, b_bar - Ax) over K by enumeration, using
/// a slack s with (Ax - b_bar)_j <= s_j (s_j >= 0) on Nonneg rows and
/// (Ax - b_bar)_j = s_j on Zero rows.
inline OraclePhase1 oracle_phase1(const ProblemSpec& prob, const Vector& b_bar) {
  require_dim("oracle_phase1 b_bar", prob.dim_y(), b_bar.size());
  const auto m = prob.dim_y();
  std::vector<ConeTag> xtags;
  const Matrix T = enumeration::split_free(prob.K, xtags);
  const auto nu = T.cols();
  std::vector<std::ptrdiff_t> kept;
  for (std::ptrdiff_t j = 0; j < m; ++j)
    if (prob.P[j] != ConeTag::Free) kept.push_back(j);
  const auto ns = static_cast<std::ptrdiff_t>(kept.size());

  enumeration::Qp qp;
  qp.H = Matrix::Zero(nu + ns, nu + ns);
  qp.H.bottomRightCorner(ns, ns).setIdentity();
  qp.f = Vector::Zero(nu + ns);
  qp.var = xtags;
  qp.G = Matrix::Zero(ns, nu + ns);
  qp.h.resize(ns);
  const Matrix AT = prob.A.matrix() * T;
  for (std::ptrdiff_t r = 0; r < ns; ++r) {
    const auto j = kept[static_cast<std::size_t>(r)];
    const bool zero_row = prob.P[j] == ConeTag::Zero;
    qp.var.push_back(zero_row ? ConeTag::Free : ConeTag::Nonneg);
    qp.G.block(r, 0, 1, nu) = AT.row(j);
    qp.G(r, nu + r) = -1.0;
    qp.h(r) = b_bar(j);
    qp.row_eq.push_back(zero_row);
  }
  auto res = enumeration::solve(qp);
  if (!res) throw OracleInfeasibleError("oracle_phase1: enumeration found no candidate");
  OraclePhase1 out;
  out.x = prob.K.project(T * res->u.head(nu));
  out.distance = prob.P.distance(b_bar - prob.A.apply(out.x));
  return out;
}

inline bool oracle_feasible(const ProblemSpec& prob, const Vector& b_bar) {
  return oracle_phase1(prob, b_bar).distance <= 1e-9 * (1.0 + b_bar.norm());
}

/// Unit directions (in the p-norm) on a uniform grid: equiangular on the
/// circle for dim 2, a spherical Fibonacci lattice for dim 3.
inline std::vector<Vector> grid_directions(std::ptrdiff_t dim, std::size_t n_grid, double p) {
  std::vector<Vector> dirs;
  if (dim == 1) {
    dirs.push_back(Vector::Constant(1, 1.0));
    dirs.push_back(Vector::Constant(1, -1.0));
    return dirs;
  }
  for (std::size_t i = 0; i < n_grid; ++i) {
    Vector v(dim);
    if (dim == 2) {
      const double th = 2.0 * std::numbers::pi * static_cast<double>(i) /
                        static_cast<double>(n_grid);
      v << std::cos(th), std::sin(th);
    } else {
      const double y = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(n_grid);
      const double r = std::sqrt(std::max(0.0, 1.0 - y * y));
      const double th = static_cast<double>(i) * std::numbers::pi * (3.0 - std::sqrt(5.0));
      v << r * std::cos(th), y, r * std::sin(th);
    }
    // Snap round-off so exact axis directions stay exact.
    for (auto& e : v)
      if (std::abs(e) < 1e-15) e = 0.0;
    dirs.push_back(v / norm(v, p));
  }
  return dirs;
}

/// Dense-grid eps0: min over grid directions of the largest feasible step,
/// with exact feasibility from oracle_phase1.
inline double oracle_eps0(const ProblemSpec& prob, std::size_t n_grid,
                          std::optional<double> lambda_max = std::nullopt) {
  const auto m = prob.dim_y();
  if (m < 1 || m > 3) throw EnumerationGuardError("oracle_eps0: dim_y must be 1, 2 or 3");
  if (n_grid < 8) throw std::invalid_argument("oracle_eps0: n_grid must be >= 8");
  oracle_guard(prob);
  const double bn = norm(prob.b, prob.p_norm_y);
  const double lmax = lambda_max.value_or(4.0 * (1.0 + bn));
  const double tol = 1e-7 * (1.0 + bn);

  if (!oracle_feasible(prob, prob.b)) return 0.0;
  double best = lmax;
  for (const Vector& d : grid_directions(m, n_grid, prob.p_norm_y)) {
    if (oracle_feasible(prob, prob.b - best * d)) continue;  // cannot lower the min
    double lo = 0.0;
    double hi = best;
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      (oracle_feasible(prob, prob.b - mid * d) ? lo : hi) = mid;
    }
    best = lo;
  }
  return best;
}

}  // namespace cone_kkt
