// Coordinate cones: each coordinate is constrained to be >= 0, == 0, or free.
//
// A cone with at least one Zero coordinate lies in a proper subspace and has
// empty interior, which is the finite-dimensional stand-in for positive cones
// such as the one of l_p. Projections are Euclidean irrespective of the norm
// used elsewhere for ball geometry.
#pragma once

#include "cone_kkt/linalg.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cone_kkt {

enum class ConeTag { Nonneg, Zero, Free };

inline std::string_view to_string(ConeTag t) noexcept {
  switch (t) {
    case ConeTag::Nonneg: return "nonneg";
    case ConeTag::Zero: return "zero";
    case ConeTag::Free: return "free";
  }
  return "nonneg";
}

inline std::optional<ConeTag> parse_cone_tag(std::string_view s) noexcept {
  if (s == "nonneg") return ConeTag::Nonneg;
  if (s == "zero") return ConeTag::Zero;
  if (s == "free") return ConeTag::Free;
  return std::nullopt;
}

/// Dual tag: Nonneg is self-dual, Zero and Free swap.
inline constexpr ConeTag dual(ConeTag t) noexcept {
  switch (t) {
    case ConeTag::Nonneg: return ConeTag::Nonneg;
    case ConeTag::Zero: return ConeTag::Free;
    case ConeTag::Free: return ConeTag::Zero;
  }
  return t;
}

class ConeSpec {
 public:
  ConeSpec() = default;
  explicit ConeSpec(std::vector<ConeTag> tags) : tags_(std::move(tags)) {}

  static ConeSpec orthant(std::ptrdiff_t n) {
    return ConeSpec(std::vector<ConeTag>(static_cast<std::size_t>(n), ConeTag::Nonneg));
  }
  static ConeSpec uniform(std::ptrdiff_t n, ConeTag t) {
    return ConeSpec(std::vector<ConeTag>(static_cast<std::size_t>(n), t));
  }

  std::ptrdiff_t dim() const noexcept {
    return static_cast<std::ptrdiff_t>(tags_.size());
  }
  ConeTag operator[](std::ptrdiff_t i) const {
    return tags_[static_cast<std::size_t>(i)];
  }
  const std::vector<ConeTag>& tags() const noexcept { return tags_; }

  std::ptrdiff_t count(ConeTag t) const {
    return std::count(tags_.begin(), tags_.end(), t);
  }

  /// Membership with absolute tolerance `tol` per coordinate.
  bool contains(const Vector& v, double tol = 0.0) const {
    require_dim("ConeSpec::contains", dim(), v.size());
    for (std::ptrdiff_t i = 0; i < dim(); ++i) {
      switch ((*this)[i]) {
        case ConeTag::Nonneg:
          if (!(v(i) >= -tol)) return false;
          break;
        case ConeTag::Zero:
          if (!(std::abs(v(i)) <= tol)) return false;
          break;
        case ConeTag::Free: break;
      }
    }
    return true;
  }

  ConeSpec dual() const {
    std::vector<ConeTag> out(tags_.size());
    std::transform(tags_.begin(), tags_.end(), out.begin(),
                   [](ConeTag t) { return cone_kkt::dual(t); });
    return ConeSpec(std::move(out));
  }

  /// Euclidean projection.
  Vector project(const Vector& v) const {
    require_dim("ConeSpec::project", dim(), v.size());
    Vector out = v;
    for (std::ptrdiff_t i = 0; i < dim(); ++i) {
      switch ((*this)[i]) {
        case ConeTag::Nonneg: out(i) = std::max(out(i), 0.0); break;
        case ConeTag::Zero: out(i) = 0.0; break;
        case ConeTag::Free: break;
      }
    }
    return out;
  }

  /// Euclidean distance from v to the cone.
  double distance(const Vector& v) const { return (v - project(v)).norm(); }

  bool has_interior() const noexcept { return count(ConeTag::Zero) == 0; }

  friend bool operator==(const ConeSpec&, const ConeSpec&) = default;

 private:
  std::vector<ConeTag> tags_;
};

inline bool contains(const ConeSpec& c, const Vector& v, double tol = 0.0) {
  return c.contains(v, tol);
}
inline ConeSpec dual(const ConeSpec& c) { return c.dual(); }
inline Vector project(const ConeSpec& c, const Vector& v) { return c.project(v); }
inline double distance(const ConeSpec& c, const Vector& v) { return c.distance(v); }
inline bool has_interior(const ConeSpec& c) { return c.has_interior(); }

}  // namespace cone_kkt
