// Reference instances. The same problems ship as JSON under fixtures/.
#pragma once

#include "cone_kkt/problem.hpp"

namespace cone_kkt::fixtures {

/// "slack": min x1^2 + x2^2, x <= (1,1), x >= 0. Optimum at the origin.
inline ProblemSpec p0() {
  ProblemSpec p;
  p.name = "p0";
  p.objective.Q = 2.0 * Matrix::Identity(2, 2);
  p.objective.c = Vector::Zero(2);
  p.objective.d = 0.0;
  p.A = LinearMap::identity(2);
  p.b = Vector{{1.0, 1.0}};
  p.K = ConeSpec::orthant(2);
  p.P = ConeSpec::orthant(2);
  return p;
}

/// "box": min (x1-1)^2 + (x2-1)^2, x <= (0.5,2), x >= 0. Optimum (0.5,1), z = (1,0).
inline ProblemSpec p1() {
  ProblemSpec p;
  p.name = "p1";
  p.objective.Q = 2.0 * Matrix::Identity(2, 2);
  p.objective.c = Vector{{-2.0, -2.0}};
  p.objective.d = 2.0;
  p.A = LinearMap::identity(2);
  p.b = Vector{{0.5, 2.0}};
  p.K = ConeSpec::orthant(2);
  p.P = ConeSpec::orthant(2);
  return p;
}

/// "ray": linear objective x1+x2+x3 over x >= 0 with P = (nonneg, zero).
/// P has empty interior; the optimum is the origin with multipliers (0,t), |t| <= 1.
inline ProblemSpec p2() {
  ProblemSpec p;
  p.name = "p2";
  p.objective.Q = Matrix::Zero(3, 3);
  p.objective.c = Vector::Ones(3);
  p.objective.d = 0.0;
  p.A = LinearMap(Matrix{{1.0, 0.0, 0.0}, {0.0, 1.0, -1.0}});
  p.b = Vector{{1.0, 0.0}};
  p.K = ConeSpec::orthant(3);
  p.P = ConeSpec({ConeTag::Nonneg, ConeTag::Zero});
  return p;
}

}  // namespace cone_kkt::fixtures
