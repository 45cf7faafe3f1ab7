#include <gtest/gtest.h>

#include <cmath>

#include "blockrelax/instance_gen.hpp"
#include "blockrelax/selector_oracle.hpp"
#include "blockrelax/wl1_solver.hpp"
#include "oracles.hpp"

using namespace blockrelax;

namespace {

RelaxedInstance reference_instance(std::uint64_t seed) {
  GenConfig cfg;
  cfg.m = cfg.n = 16;
  cfg.theta = 2;
  cfg.s = 4;
  cfg.r = 4;
  cfg.guess_density = 0.25;
  cfg.master_seed = seed;
  return build_instance(cfg);
}

Vector ones(int k) { return Vector::Ones(k); }

}  // namespace

TEST(SolveWeightedBp, IdentitySystem) {
  const Matrix b = Matrix::Identity(2, 2);
  const auto res = solve_weighted_bp(b, Vector::Ones(2), Vector::Unit(2, 0));
  ASSERT_EQ(res.status, SolveStatus::Optimal);
  EXPECT_NEAR(res.z(0), 1.0, 1e-9);
  EXPECT_NEAR(res.z(1), 0.0, 1e-9);
  EXPECT_NEAR(res.objective, 1.0, 1e-9);
  EXPECT_EQ(res.detected_support, (IndexList{0}));
}

TEST(SolveWeightedBp, CheaperColumnWins) {
  Matrix b(1, 2);
  b << 1, 1;
  Vector w(2);
  w << 1, 2;
  const auto res = solve_weighted_bp(b, w, Vector::Ones(1));
  ASSERT_EQ(res.status, SolveStatus::Optimal);
  EXPECT_NEAR(res.z(0), 1.0, 1e-8);
  EXPECT_NEAR(res.z(1), 0.0, 1e-8);
  EXPECT_NEAR(res.objective, 1.0, 1e-8);
}

TEST(SolveWeightedBp, InconsistentSystemIsInfeasible) {
  Matrix b(2, 1);
  b << 1, 0;
  const auto res = solve_weighted_bp(b, Vector::Ones(1), Vector::Unit(2, 1));
  EXPECT_EQ(res.status, SolveStatus::Infeasible);
}

TEST(SolveWeightedBp, RejectsNegativeWeights) {
  const Matrix b = Matrix::Identity(2, 2);
  Vector w(2);
  w << 1, -1;
  EXPECT_THROW(solve_weighted_bp(b, w, Vector::Ones(2)), InvalidArgument);
  SolveOptions bad;
  bad.tol_feas = 0.0;
  EXPECT_THROW(solve_weighted_bp(b, Vector::Ones(2), Vector::Ones(2), bad), InvalidArgument);
}

TEST(SolveWeightedBp, CertifiedPlantedInstanceIsRecovered) {
  int certified = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto inst = reference_instance(seed);
    const Matrix b = effective_matrix(inst.A, inst.X);
    const Vector w = solver_weights(inst.X, 0.5);
    const auto cert = kkt_certificate(b, w, inst.X.planted_global(), ones(inst.X.theta()));
    if (!cert.holds) continue;
    ++certified;
    const auto res = solve_weighted_bp(b, w, inst.y);
    ASSERT_EQ(res.status, SolveStatus::Optimal);
    const Vector target = Selector::discrete(inst.X.planted_columns(), inst.X.r()).values();
    EXPECT_LE((res.z - target).cwiseAbs().maxCoeff(), 1e-6) << "seed " << seed;
    EXPECT_EQ(recovery_check(inst, res, 1e-6), RecoveryOutcome::Exact);
    const auto ora = enumerate_selectors(inst, 0.5, 1e-8);
    ASSERT_TRUE(ora.unique());
    EXPECT_EQ(ora.best_combos[0], inst.X.planted_columns());
  }
  EXPECT_GT(certified, 0);
}

TEST(SolveWeightedBp, SoundnessOverSeededCorpus) {
  int violations = 0, certified = 0;
  for (std::uint64_t seed = 100; seed < 300; ++seed) {
    const auto inst = reference_instance(seed);
    const Matrix b = effective_matrix(inst.A, inst.X);
    const Vector w = solver_weights(inst.X, 0.5);
    if (!kkt_certificate(b, w, inst.X.planted_global(), ones(inst.X.theta())).holds) continue;
    ++certified;
    const auto res = solve_weighted_bp(b, w, inst.y);
    const Vector target = Selector::discrete(inst.X.planted_columns(), inst.X.r()).values();
    if (res.status != SolveStatus::Optimal || (res.z - target).cwiseAbs().maxCoeff() > 1e-6) ++violations;
  }
  EXPECT_GT(certified, 50);
  EXPECT_EQ(violations, 0);
}

TEST(SolveWeightedBp, FeasibilityPostcondition) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto inst = reference_instance(seed);
    const auto res = solve_weighted_bp(effective_matrix(inst.A, inst.X), solver_weights(inst.X, 0.5), inst.y);
    if (res.status == SolveStatus::Optimal) {
      EXPECT_LE(res.feas_residual, 1e-8 * (1.0 + inst.y.norm()));
      EXPECT_LE(res.duality_gap, 1e-8 * (1.0 + std::abs(res.objective)));
    }
  }
}

TEST(SolveWeightedBp, MatchesVertexEnumeration) {
  Stream rng(2024);
  for (int t = 0; t < 40; ++t) {
    const int m = 3 + static_cast<int>(rng.below(3));
    const int cols = m + 2 + static_cast<int>(rng.below(5));  // <= 12
    Matrix b(m, cols);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < cols; ++j) b(i, j) = rng.normal();
    Vector w(cols);
    for (int j = 0; j < cols; ++j) w(j) = 0.5 + rng.uniform();
    Vector z0 = Vector::Zero(cols);
    for (int k = 0; k < 3; ++k) z0(static_cast<int>(rng.below(cols))) = rng.normal();
    const Vector y = b * z0;
    const auto ref = oracle::lp_vertex_min(b, w, y, 1e-9 * (1.0 + y.norm()));
    ASSERT_TRUE(ref.has_value());
    const auto res = solve_weighted_bp(b, w, y);
    ASSERT_EQ(res.status, SolveStatus::Optimal);
    EXPECT_NEAR(res.objective, ref->objective, 1e-6 * std::max(1.0, ref->objective)) << "case " << t;
  }
}

TEST(SolveWeightedBp, ScalingCovariance) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto inst = reference_instance(seed);
    const Matrix b = effective_matrix(inst.A, inst.X);
    const Vector w = solver_weights(inst.X, 0.5);
    const auto base = solve_weighted_bp(b, w, inst.y);
    const double lambda = 3.5;
    const auto scaled = solve_weighted_bp(b, w, lambda * inst.y);
    if (base.status != SolveStatus::Optimal || scaled.status != SolveStatus::Optimal) continue;
    EXPECT_NEAR(scaled.objective, lambda * base.objective, 1e-6 * lambda * base.objective);
    EXPECT_EQ(scaled.detected_support, base.detected_support);
  }
}

TEST(KktCertificate, OrthogonalColumns) {
  const auto c = kkt_certificate(Matrix::Identity(2, 2), Vector::Ones(2), {0}, Vector::Ones(1));
  EXPECT_TRUE(c.holds);
  EXPECT_TRUE(c.injective);
  EXPECT_NEAR(c.margin, 1.0, 1e-12);
  EXPECT_NEAR(c.h(0), 1.0, 1e-12);
  EXPECT_NEAR(c.h(1), 0.0, 1e-12);
}

TEST(KktCertificate, TieIsNotStrict) {
  Matrix b(1, 2);
  b << 1, 1;
  const auto c = kkt_certificate(b, Vector::Ones(2), {0}, Vector::Ones(1));
  EXPECT_FALSE(c.holds);
  EXPECT_NEAR(c.margin, 0.0, 1e-12);
}

TEST(KktCertificate, HeavierCompetitorCertifies) {
  Matrix b(1, 2);
  b << 1, 1;
  Vector w(2);
  w << 1, 2;
  const auto c = kkt_certificate(b, w, {0}, Vector::Ones(1));
  EXPECT_TRUE(c.holds);
  EXPECT_NEAR(c.margin, 1.0, 1e-12);
}

TEST(KktCertificate, RankDeficientSupport) {
  Matrix b(2, 3);
  b << 1, 2, 0,
       1, 2, 1;
  const auto c = kkt_certificate(b, Vector::Ones(3), {0, 1}, Vector::Ones(2));
  EXPECT_FALSE(c.injective);
  EXPECT_FALSE(c.holds);
}

TEST(KktCertificate, HoldsIffInjectiveAndPositiveMargin) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto inst = reference_instance(seed);
    const auto c = kkt_certificate(effective_matrix(inst.A, inst.X), solver_weights(inst.X, 0.5),
                                   inst.X.planted_global(), ones(inst.X.theta()));
    EXPECT_EQ(c.holds, c.injective && c.margin > 0.0);
  }
}

TEST(KktCertificate, MarginIsHomogeneous) {
  const auto inst = reference_instance(3);
  const Matrix b = effective_matrix(inst.A, inst.X);
  const Vector w = solver_weights(inst.X, 0.5);
  const auto base = kkt_certificate(b, w, inst.X.planted_global(), ones(2));
  const double lambda = 2.5;
  const auto scaled = kkt_certificate(b, lambda * w, inst.X.planted_global(), ones(2));
  EXPECT_NEAR(scaled.margin, lambda * base.margin, 1e-10 * (1.0 + std::abs(lambda * base.margin)));
  EXPECT_EQ(scaled.holds, base.holds);
}

TEST(KktCertificate, Preconditions) {
  EXPECT_THROW(kkt_certificate(Matrix::Identity(2, 2), Vector::Ones(2), {}, Vector()), InvalidArgument);
  EXPECT_THROW(kkt_certificate(Matrix::Identity(2, 2), Vector::Ones(2), {0}, Vector::Ones(2)), InvalidArgument);
}

TEST(RecoveryCheck, DiscreteSelectorAtTIsExact) {
  const auto inst = reference_instance(5);
  SolveResult res;
  res.z = Selector::discrete(inst.X.planted_columns(), inst.X.r()).values();
  res.detected_support = inst.X.planted_global();
  res.status = SolveStatus::Optimal;
  EXPECT_EQ(recovery_check(inst, res, 1e-6), RecoveryOutcome::Exact);

  res.z *= 0.5;
  EXPECT_EQ(recovery_check(inst, res, 1e-6), RecoveryOutcome::SupportMatch);
}

TEST(RecoveryCheck, ZeroSelectorFails) {
  const auto inst = reference_instance(5);
  SolveResult res;
  res.z = Vector::Zero(inst.X.total_columns());
  res.status = SolveStatus::Optimal;
  EXPECT_EQ(recovery_check(inst, res, 1e-6), RecoveryOutcome::Fail);
}

TEST(RecoveryCheck, RequiresOptimalStatus) {
  const auto inst = reference_instance(5);
  SolveResult res;
  res.z = Vector::Zero(inst.X.total_columns());
  res.status = SolveStatus::MaxIter;
  EXPECT_THROW(recovery_check(inst, res, 1e-6), InvalidArgument);
}

TEST(DetectSupport, RelativeThreshold) {
  Vector z(4);
  z << 1.0, 1e-9, -0.5, 0.0;
  EXPECT_EQ(detect_support(z, 1e-7), (IndexList{0, 2}));
  EXPECT_TRUE(detect_support(Vector::Zero(3), 1e-7).empty());
}
