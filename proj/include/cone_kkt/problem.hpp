// The conic program
//
//     minimize I(x)   subject to   b - Ax in P,   x in K,
//
// with a convex quadratic objective, together with its Lagrange function
// L(x, z) = I(x) + <z, Ax - b> over x in K, z in P*.
#pragma once

#include "cone_kkt/cones.hpp"
#include "cone_kkt/linalg.hpp"

#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cone_kkt {

/// I(x) = 1/2 x'Qx + c'x + d with Q symmetric positive semidefinite.
struct QuadraticFunctional {
  Matrix Q;
  Vector c;
  double d = 0.0;

  std::ptrdiff_t dim() const noexcept { return c.size(); }

  double value(const Vector& x) const {
    require_dim("QuadraticFunctional::value", dim(), x.size());
    return 0.5 * x.dot(Q * x) + c.dot(x) + d;
  }

  Vector gradient(const Vector& x) const {
    require_dim("QuadraticFunctional::gradient", dim(), x.size());
    return Q * x + c;
  }
};

struct ProblemSpec {
  std::string name;
  QuadraticFunctional objective;
  LinearMap A;
  Vector b;
  ConeSpec K;
  ConeSpec P;
  double p_norm_y = 2.0;

  std::ptrdiff_t dim_x() const noexcept { return objective.dim(); }
  std::ptrdiff_t dim_y() const noexcept { return b.size(); }
  SpaceSpec space_x() const { return SpaceSpec(dim_x()); }
  SpaceSpec space_y() const { return SpaceSpec(dim_y(), p_norm_y); }
};

/// Candidate primal point and multiplier.
struct Certificate {
  Vector x0;
  Vector z0;
};

class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(std::vector<std::string> errors)
      : std::invalid_argument(join(errors)), errors_(std::move(errors)) {}

  const std::vector<std::string>& errors() const noexcept { return errors_; }

 private:
  static std::string join(const std::vector<std::string>& errs) {
    std::string out = "invalid problem:";
    for (const auto& e : errs) out += "\n  - " + e;
    return out;
  }
  std::vector<std::string> errors_;
};

inline constexpr double kSymmetryTol = 1e-10;
inline constexpr double kPsdTol = 1e-10;

/// Every invariant violation of `prob`; empty when the problem is valid.
inline std::vector<std::string> validation_errors(const ProblemSpec& prob) {
  std::vector<std::string> errs;
  auto dims = [](auto r, auto c) {
    std::ostringstream os;
    os << r << "x" << c;
    return os.str();
  };
  const auto n = prob.objective.c.size();
  const auto m = prob.b.size();
  if (n < 1) errs.push_back("dim_x must be >= 1");
  if (m < 1) errs.push_back("dim_y must be >= 1");

  const Matrix& Q = prob.objective.Q;
  bool q_shape_ok = Q.rows() == n && Q.cols() == n;
  if (!q_shape_ok)
    errs.push_back("Q has shape " + dims(Q.rows(), Q.cols()) + ", expected " +
                   dims(n, n));
  if (prob.A.rows() != m || prob.A.cols() != n)
    errs.push_back("A has shape " + dims(prob.A.rows(), prob.A.cols()) +
                   ", expected " + dims(m, n));
  if (prob.K.dim() != n)
    errs.push_back("cone_K has " + std::to_string(prob.K.dim()) +
                   " entries, expected " + std::to_string(n));
  if (prob.P.dim() != m)
    errs.push_back("cone_P has " + std::to_string(prob.P.dim()) +
                   " entries, expected " + std::to_string(m));
  if (!valid_norm_exponent(prob.p_norm_y))
    errs.push_back("p_norm_y must be >= 1 or inf");

  bool finite = true;
  if (!Q.allFinite()) { errs.push_back("Q has non-finite entries"); finite = false; }
  if (!prob.objective.c.allFinite()) errs.push_back("c has non-finite entries");
  if (!std::isfinite(prob.objective.d)) errs.push_back("d is not finite");
  if (!prob.A.matrix().allFinite()) errs.push_back("A has non-finite entries");
  if (!prob.b.allFinite()) errs.push_back("b has non-finite entries");

  if (q_shape_ok && finite && n > 0) {
    const double asym = (Q - Q.transpose()).cwiseAbs().maxCoeff();
    if (asym > kSymmetryTol) {
      errs.push_back("Q is not symmetric (max |Q - Q'| = " + std::to_string(asym) + ")");
    } else {
      const Matrix sym = 0.5 * (Q + Q.transpose());
      const double lmin =
          Eigen::SelfAdjointEigenSolver<Matrix>(sym, Eigen::EigenvaluesOnly)
              .eigenvalues()(0);
      if (lmin < -kPsdTol) {
        std::ostringstream os;
        os << "Q is indefinite (smallest eigenvalue " << lmin << ")";
        errs.push_back(os.str());
      }
    }
  }
  return errs;
}

/// Returns `raw` unchanged if valid; throws ValidationError listing every violation.
inline ProblemSpec validate(ProblemSpec raw) {
  auto errs = validation_errors(raw);
  if (!errs.empty()) throw ValidationError(std::move(errs));
  return raw;
}

inline double objective_value(const QuadraticFunctional& f, const Vector& x) {
  return f.value(x);
}
inline Vector gradient(const QuadraticFunctional& f, const Vector& x) {
  return f.gradient(x);
}

/// L(x, z) = I(x) + <z, Ax - b>.
inline double lagrangian(const ProblemSpec& prob, const Vector& x, const Vector& z) {
  require_dim("lagrangian (multiplier)", prob.dim_y(), z.size());
  return prob.objective.value(x) + z.dot(prob.A.apply(x) - prob.b);
}

/// Partial gradient in x: I'(x) + A*z.
inline Vector lagrangian_grad_x(const ProblemSpec& prob, const Vector& x,
                                const Vector& z) {
  return prob.objective.gradient(x) + prob.A.adjoint_apply(z);
}

}  // namespace cone_kkt
