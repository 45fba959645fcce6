#include "support/battery.hpp"

#include <gtest/gtest.h>

namespace {

using namespace cone_kkt;
using test_support::Rng;
using test_support::vec;

const Certificate kP1Exact{vec({0.5, 1}), vec({1, 0})};

TEST(KktResiduals, P1ExactCertificateIsAllZero) {
  const KktResiduals r = kkt_residuals(fixtures::p1(), kP1Exact);
  for (KktCondition c : kAllConditions) EXPECT_EQ(residual_of(r, c), 0.0) << to_string(c);
}

// I'(x0) + A*z0 = (-1, 0): distance 1 from the orthant, and its pairing with
// x0 = (0.5, 1) is -0.5.
TEST(KktResiduals, P1ZeroMultiplierLeavesStationarityResidual) {
  const KktResiduals r = kkt_residuals(fixtures::p1(), {vec({0.5, 1}), vec({0, 0})});
  EXPECT_DOUBLE_EQ(r.r_stat, 1.0);
  EXPECT_DOUBLE_EQ(r.r_comp, 0.5);
  EXPECT_EQ(r.r_pfeas, 0.0);
  EXPECT_EQ(r.r_dfeas, 0.0);
  EXPECT_EQ(r.r_slack, 0.0);
}

TEST(KktResiduals, P0Origin) {
  EXPECT_EQ(kkt_residuals(fixtures::p0(), {vec({0, 0}), vec({0, 0})}).max(), 0.0);
}

TEST(KktResiduals, DimensionMismatch) {
  EXPECT_THROW(kkt_residuals(fixtures::p1(), {vec({0.5, 1, 0}), vec({1, 0})}),
               DimensionError);
  EXPECT_THROW(kkt_residuals(fixtures::p1(), {vec({0.5, 1}), vec({1})}), DimensionError);
}

TEST(Verify, P1ExactAccepted) {
  const Verdict v = verify_certificate(fixtures::p1(), kP1Exact, 1e-6);
  EXPECT_TRUE(v.accepted);
  EXPECT_TRUE(v.failures.empty());
}

TEST(Verify, P1InfeasiblePointRejectedOnPrimalFeasibility) {
  const Verdict v = verify_certificate(fixtures::p1(), {vec({1, 1}), vec({0, 0})}, 1e-6);
  EXPECT_FALSE(v.accepted);
  ASSERT_EQ(v.failures.size(), 1u);
  EXPECT_EQ(v.failures[0].condition, KktCondition::PrimalFeasibility);
  EXPECT_DOUBLE_EQ(v.failures[0].residual, 0.5);
}

TEST(Verify, P2InteriorMultiplierAccepted) {
  EXPECT_TRUE(verify_certificate(fixtures::p2(), {vec({0, 0, 0}), vec({0, 0.5})}, 1e-6).accepted);
}

TEST(Verify, P2MultiplierFamily) {
  // z = (0, t) certifies the origin iff |t| <= 1.
  for (double t : {-1.0, -0.3, 0.0, 0.7, 1.0})
    EXPECT_TRUE(verify_certificate(fixtures::p2(), {Vector::Zero(3), vec({0, t})}).accepted);
  for (double t : {-1.1, 1.5})
    EXPECT_FALSE(verify_certificate(fixtures::p2(), {Vector::Zero(3), vec({0, t})}).accepted);
}

TEST(Verify, RejectsNonPositiveTolerance) {
  EXPECT_THROW(verify_certificate(fixtures::p1(), kP1Exact, 0.0), std::invalid_argument);
}

TEST(Verify, ConditionNamesAreRoles) {
  EXPECT_EQ(to_string(KktCondition::Complementarity), "complementarity");
  EXPECT_EQ(residual_key(KktCondition::Slackness), "r_slack");
}

TEST(CheckSaddle, ExactP1CertificateHasNoViolation) {
  const SaddleReport r = check_saddle(fixtures::p1(), kP1Exact, 1000, 1, 1e-9);
  EXPECT_EQ(r.samples, 1000u);
  EXPECT_LE(r.max_left_violation, 1e-12);
  EXPECT_LE(r.max_right_violation, 1e-12);
  EXPECT_TRUE(r.worst_witnesses.empty());
}

TEST(CheckSaddle, ProjectedPerturbedMultiplier) {
  const ProblemSpec p1 = fixtures::p1();
  const Certificate bad{vec({0.5, 1}), vec({1, -0.5})};
  EXPECT_GT(kkt_residuals(p1, bad).r_dfeas, 0.0);
  const Certificate fixed{bad.x0, p1.P.dual().project(bad.z0)};
  const SaddleReport r = check_saddle(p1, fixed, 1000, 2, 1e-9);
  EXPECT_LE(r.max_violation(), 1e-12);
}

TEST(CheckSaddle, InfeasiblePrimalShowsRightViolation) {
  SaddleExtraSamples extra;
  extra.x.push_back(vec({0.5, 1}));
  const SaddleReport r =
      check_saddle(fixtures::p1(), {vec({1, 1}), vec({1, 0})}, 10, 3, 1e-6, extra);
  EXPECT_GE(r.max_right_violation, 0.25 - 1e-12);
  ASSERT_FALSE(r.worst_witnesses.empty());
  EXPECT_LE(r.worst_witnesses.size(), 3u);
  for (std::size_t i = 1; i < r.worst_witnesses.size(); ++i)
    EXPECT_GE(r.worst_witnesses[i - 1].violation, r.worst_witnesses[i].violation);
  for (const auto& w : r.worst_witnesses) EXPECT_GT(w.violation, 1e-6);
}

TEST(CheckSaddle, DeterministicForSeed) {
  const Certificate c{vec({0.4, 1.1}), vec({0.8, 0.1})};
  const SaddleReport a = check_saddle(fixtures::p1(), c, 200, 42, 1e-6);
  const SaddleReport b = check_saddle(fixtures::p1(), c, 200, 42, 1e-6);
  EXPECT_EQ(a.max_left_violation, b.max_left_violation);
  EXPECT_EQ(a.max_right_violation, b.max_right_violation);
}

// Accepted at 1e-8 implies the sampled saddle inequalities hold.
TEST(CheckSaddle, SoundnessOnOracleCertificates) {
  for (int s = 0; s < 30; ++s) {
    const ProblemSpec p = test_support::random_feasible_instance(300 + s);
    const OracleSolution o = oracle_solve(p);
    const Certificate c{o.x_opt, o.z_recovered};
    if (!verify_certificate(p, c, 1e-8).accepted) continue;
    EXPECT_LE(check_saddle(p, c, 1000, s, 1e-6).max_violation(), 1e-6) << "seed " << s;
  }
}

// Residuals move by at most (1 + |Q| + |A|) * delta under a perturbation of size delta.
TEST(KktResiduals, ContinuousUnderPerturbation) {
  const std::vector<std::pair<ProblemSpec, Certificate>> cases = {
      {fixtures::p0(), {vec({0, 0}), vec({0, 0})}},
      {fixtures::p1(), kP1Exact},
      {fixtures::p2(), {vec({0, 0, 0}), vec({0, 0.5})}},
  };
  Rng rng(17);
  for (const auto& [p, c] : cases) {
    const KktResiduals r0 = kkt_residuals(p, c);
    const double bound = 1 + p.objective.Q.norm() + p.A.operator_norm();
    for (int t = 0; t < 200; ++t) {
      const double delta = 1e-3;
      Vector dx = rng.gauss_vec(p.dim_x()), dz = rng.gauss_vec(p.dim_y());
      const double s = delta / std::sqrt(dx.squaredNorm() + dz.squaredNorm());
      const KktResiduals r1 = kkt_residuals(p, {c.x0 + s * dx, c.z0 + s * dz});
      for (KktCondition k : kAllConditions)
        EXPECT_LE(std::abs(residual_of(r1, k) - residual_of(r0, k)), bound * delta)
            << p.name << " " << to_string(k);
    }
  }
}

TEST(KktResiduals, NonnegativeAndFinite) {
  Rng rng(23);
  for (int s = 0; s < 100; ++s) {
    const ProblemSpec p = test_support::random_feasible_instance(s);
    const KktResiduals r =
        kkt_residuals(p, {rng.gauss_vec(p.dim_x()), rng.gauss_vec(p.dim_y())});
    for (KktCondition k : kAllConditions) {
      EXPECT_GE(residual_of(r, k), 0.0);
      EXPECT_TRUE(std::isfinite(residual_of(r, k)));
    }
  }
}

}  // namespace
