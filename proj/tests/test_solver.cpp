#include "support/battery.hpp"

#include <gtest/gtest.h>

namespace {

using namespace cone_kkt;
using test_support::vec;

TEST(SolverOptions, Invariants) {
  SolverOptions o;
  EXPECT_NO_THROW(o.check());
  o.step_scale = 1.0;
  EXPECT_THROW(o.check(), std::invalid_argument);
  o = {};
  o.residual_tol = 0.0;
  EXPECT_THROW(o.check(), std::invalid_argument);
}

TEST(SolveSaddle, P0StartsAtOptimum) {
  const ProblemSpec p = fixtures::p0();
  const SaddleSolution s = solve_saddle(p);
  EXPECT_TRUE(s.trace.converged);
  EXPECT_EQ(s.certificate.x0, vec({0, 0}));
  EXPECT_EQ(s.certificate.z0, vec({0, 0}));
  EXPECT_EQ(p.objective.value(s.certificate.x0), 0.0);
}

TEST(SolveSaddle, P1) {
  const ProblemSpec p = fixtures::p1();
  const SaddleSolution s = solve_saddle(p);
  ASSERT_TRUE(s.trace.converged);
  EXPECT_LE((s.certificate.x0 - vec({0.5, 1})).norm(), 1e-6);
  EXPECT_LE((s.certificate.z0 - vec({1, 0})).norm(), 1e-6);
  EXPECT_NEAR(p.objective.value(s.certificate.x0), 0.25, 1e-8);
  EXPECT_TRUE(verify_certificate(p, s.certificate, 1e-6).accepted);
}

TEST(SolveSaddle, P2) {
  const ProblemSpec p = fixtures::p2();
  const SaddleSolution s = solve_saddle(p);
  ASSERT_TRUE(s.trace.converged);
  EXPECT_LE(std::abs(p.objective.value(s.certificate.x0)), 1e-6);
  EXPECT_NEAR(s.certificate.z0(0), 0.0, 1e-6);
  EXPECT_LE(std::abs(s.certificate.z0(1)), 1.0 + 1e-6);
  EXPECT_TRUE(verify_certificate(p, s.certificate, 1e-6).accepted);
}

TEST(SolveSaddle, StarvedIterationReportsNonConvergence) {
  SolverOptions o;
  o.max_iters = 10;
  const SaddleSolution s = solve_saddle(fixtures::p1(), o);
  EXPECT_FALSE(s.trace.converged);
  EXPECT_EQ(s.trace.iters, 10u);
  EXPECT_GT(s.trace.final_residuals.max(), o.residual_tol);
}

TEST(SolveSaddle, InfeasibleProblemShowsPersistentPrimalResidual) {
  ProblemSpec p = fixtures::p1();
  p.b = vec({-1, 2});  // x1 <= -1 with x1 >= 0
  SolverOptions o;
  o.max_iters = 5000;
  const SaddleSolution s = solve_saddle(p, o);
  EXPECT_FALSE(s.trace.converged);
  EXPECT_GT(s.trace.final_residuals.r_pfeas, 0.1);
}

TEST(SolveSaddle, ConvergedImpliesToleranceAndVerifies) {
  for (int s = 0; s < 40; ++s) {
    const ProblemSpec p = test_support::random_feasible_instance(2000 + s);
    const SolverOptions o;
    const SaddleSolution sol = solve_saddle(p, o);
    ASSERT_TRUE(sol.trace.converged) << p.name;
    EXPECT_LE(sol.trace.final_residuals.max(), o.residual_tol);
    EXPECT_TRUE(verify_certificate(p, sol.certificate, 10 * o.residual_tol).accepted) << p.name;
  }
}

TEST(SolveSaddle, MatchesOracleObjective) {
  for (int s = 0; s < 100; ++s) {
    const ProblemSpec p = test_support::random_feasible_instance(3000 + s);
    const SaddleSolution sol = solve_saddle(p);
    ASSERT_TRUE(sol.trace.converged) << p.name;
    const double v = oracle_solve(p).value;
    EXPECT_LE(std::abs(p.objective.value(sol.certificate.x0) - v), 1e-6 * (1 + std::abs(v)))
        << p.name;
  }
}

// Merit at iteration 2k is at most 1.01 times the merit at iteration k.
TEST(SolveSaddle, MeritTrendOnFixtures) {
  for (const ProblemSpec& p : {fixtures::p0(), fixtures::p1(), fixtures::p2()}) {
    const SaddleSolution s = solve_saddle(p);
    const auto& h = s.trace.history;
    for (std::size_t i = 1; i < h.size(); ++i) {
      if (h[i].iter != 2 * h[i - 1].iter) continue;
      EXPECT_LE(h[i].merit, 1.01 * h[i - 1].merit) << p.name << " at " << h[i].iter;
    }
  }
}

TEST(SolveSaddle, Deterministic) {
  const ProblemSpec p = test_support::random_feasible_instance(77);
  const SaddleSolution a = solve_saddle(p), b = solve_saddle(p);
  EXPECT_EQ(a.certificate.x0, b.certificate.x0);
  EXPECT_EQ(a.certificate.z0, b.certificate.z0);
  EXPECT_EQ(a.trace.iters, b.trace.iters);
}

TEST(SolveSaddle, StepWithinLipschitzBound) {
  const ProblemSpec p = fixtures::p1();
  const SaddleSolution s = solve_saddle(p);
  EXPECT_NEAR(s.trace.step * saddle_lipschitz(p), SolverOptions{}.step_scale, 1e-12);
}

TEST(Phase1, P1FeasibleRightHandSide) {
  const Phase1Result r = phase1(fixtures::p1(), vec({0.5, 2}));
  EXPECT_LE(r.residual, 1e-8);
  EXPECT_EQ(r.status, Phase1Status::TargetReached);
}

TEST(Phase1, P1InfeasibleRightHandSide) {
  const Phase1Result r = phase1(fixtures::p1(), vec({-0.1, 2}));
  EXPECT_NEAR(r.residual, 0.1, 1e-8);
  EXPECT_EQ(r.status, Phase1Status::Stationary);
}

TEST(Phase1, P2ZeroCoordinateReachable) {
  const ProblemSpec p = fixtures::p2();
  const Vector b_bar = vec({1, -5});
  const Phase1Result r = phase1(p, b_bar);
  EXPECT_LE(r.residual, 1e-8);
  EXPECT_TRUE(p.K.contains(r.x));
  EXPECT_TRUE(p.P.contains(b_bar - p.A.apply(r.x), 1e-7));
}

TEST(Phase1, DimensionMismatch) {
  EXPECT_THROW(phase1(fixtures::p1(), vec({1})), DimensionError);
}

}  // namespace
