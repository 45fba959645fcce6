// Finite-truncation spaces, the duality pairing, p-norms and the linear map A.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace cone_kkt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kInfNorm = std::numeric_limits<double>::infinity();

class DimensionError : public std::invalid_argument {
 public:
  DimensionError(const std::string& what, std::ptrdiff_t expected,
                 std::ptrdiff_t got)
      : std::invalid_argument(what + ": expected dimension " +
                              std::to_string(expected) + ", got " +
                              std::to_string(got)),
        expected_(expected),
        got_(got) {}

  std::ptrdiff_t expected() const noexcept { return expected_; }
  std::ptrdiff_t got() const noexcept { return got_; }

 private:
  std::ptrdiff_t expected_;
  std::ptrdiff_t got_;
};

inline void require_dim(const char* what, std::ptrdiff_t expected,
                        std::ptrdiff_t got) {
  if (expected != got) throw DimensionError(what, expected, got);
}

inline bool valid_norm_exponent(double p) noexcept {
  return p == kInfNorm || (std::isfinite(p) && p >= 1.0);
}

/// A coordinate space of dimension `dim` whose ball geometry uses the p-norm.
struct SpaceSpec {
  std::ptrdiff_t dim = 1;
  double p = 2.0;

  SpaceSpec() = default;
  SpaceSpec(std::ptrdiff_t d, double exponent = 2.0) : dim(d), p(exponent) {
    if (dim < 1) throw std::invalid_argument("SpaceSpec: dim must be >= 1");
    if (!valid_norm_exponent(p))
      throw std::invalid_argument("SpaceSpec: norm exponent must be >= 1 or inf");
  }
};

inline bool all_finite(const Eigen::Ref<const Matrix>& m) {
  return m.allFinite();
}

/// Standard pairing between a functional and a vector in shared coordinates.
inline double pairing(const Vector& f, const Vector& v) {
  require_dim("pairing", f.size(), v.size());
  return f.dot(v);
}

/// p-norm; `p == kInfNorm` gives the max-abs norm.
inline double norm(const Vector& v, double p = 2.0) {
  if (!valid_norm_exponent(p))
    throw std::invalid_argument("norm: exponent must be >= 1 or inf");
  if (v.size() == 0) return 0.0;
  if (p == kInfNorm) return v.cwiseAbs().maxCoeff();
  if (p == 1.0) return v.cwiseAbs().sum();
  if (p == 2.0) return v.norm();
  // Scale by the max entry so large exponents do not overflow.
  const double scale = v.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += std::pow(std::abs(x) / scale, p);
  return scale * std::pow(acc, 1.0 / p);
}

/// Bounded linear operator A : X -> Y stored as a dense rows x cols matrix.
class LinearMap {
 public:
  LinearMap() = default;
  explicit LinearMap(Matrix entries) : m_(std::move(entries)) {}

  static LinearMap identity(std::ptrdiff_t n) {
    return LinearMap(Matrix::Identity(n, n));
  }
  static LinearMap zero(std::ptrdiff_t rows, std::ptrdiff_t cols) {
    return LinearMap(Matrix::Zero(rows, cols));
  }

  std::ptrdiff_t rows() const noexcept { return m_.rows(); }
  std::ptrdiff_t cols() const noexcept { return m_.cols(); }
  const Matrix& matrix() const noexcept { return m_; }

  /// Ax.
  Vector apply(const Vector& x) const {
    require_dim("LinearMap::apply (domain)", cols(), x.size());
    return m_ * x;
  }

  /// A*z, the transpose product; satisfies <z, Ax> = <A*z, x>.
  Vector adjoint_apply(const Vector& z) const {
    require_dim("LinearMap::adjoint_apply (codomain)", rows(), z.size());
    return m_.transpose() * z;
  }

  /// Spectral norm ||A||_2.
  double operator_norm() const {
    if (m_.size() == 0) return 0.0;
    return Eigen::JacobiSVD<Matrix>(m_).singularValues()(0);
  }

 private:
  Matrix m_;
};

inline Vector apply(const LinearMap& a, const Vector& x) { return a.apply(x); }
inline Vector adjoint_apply(const LinearMap& a, const Vector& z) {
  return a.adjoint_apply(z);
}

}  // namespace cone_kkt
