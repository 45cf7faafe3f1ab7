#include <gtest/gtest.h>

#include <cmath>

#include "blockrelax/instance_gen.hpp"
#include "blockrelax/selector_oracle.hpp"

using namespace blockrelax;

namespace {

GenConfig small_cfg(int r, int theta, std::uint64_t seed) {
  GenConfig cfg;
  cfg.m = cfg.n = 8;
  cfg.theta = theta;
  cfg.s = 3;
  cfg.r = r;
  cfg.guess_density = 0.5;
  cfg.master_seed = seed;
  return cfg;
}

}  // namespace

TEST(EnumerateSelectors, SingleCombinationWhenROne) {
  const auto inst = build_instance(small_cfg(1, 3, 4));
  const auto res = enumerate_selectors(inst, 0.5, 1e-8);
  EXPECT_EQ(res.evaluated_count, 1u);
  EXPECT_EQ(res.feasible_count, 1u);
  ASSERT_TRUE(res.unique());
  double expected = 0.0;
  for (int l = 0; l < 3; ++l) expected += lp_norm(inst.x.segment(l * 8, 8), 0.5);
  EXPECT_EQ(res.best_objective, expected);
}

TEST(EnumerateSelectors, GenericInstanceHasUniqueBestAtT) {
  int unique_at_t = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = build_instance(small_cfg(2, 2, seed));
    const auto res = enumerate_selectors(inst, 0.5, 1e-8);
    EXPECT_EQ(res.evaluated_count, 4u);
    if (res.unique() && res.best_combos[0] == inst.X.planted_columns()) ++unique_at_t;
  }
  EXPECT_GE(unique_at_t, 18);
}

TEST(EnumerateSelectors, DuplicatedPlantedColumnTies) {
  const auto inst0 = build_instance(small_cfg(3, 2, 9));
  std::vector<Matrix> blocks = inst0.X.blocks();
  const int k = inst0.X.planted_columns()[0];
  blocks[0].col((k + 1) % 3) = blocks[0].col(k);
  RelaxedInstance inst = inst0;
  inst.X = GuessEnsemble(blocks, inst0.X.planted_columns());
  const auto res = enumerate_selectors(inst, 0.5, 1e-8);
  EXPECT_GE(res.best_combos.size(), 2u);
}

TEST(EnumerateSelectors, ObjectiveAtTIsSumOfPlantedNorms) {
  const auto inst = build_instance(small_cfg(3, 2, 11));
  const Matrix b = effective_matrix(inst.A, inst.X);
  const Vector w = solver_weights(inst.X, 0.5);
  const auto res = enumerate_selectors(b, w, inst.y, 2, 3, 1e-8);
  double at_t = 0.0;
  for (int l = 0; l < 2; ++l) at_t += lp_norm(inst.x.segment(l * 8, 8), 0.5);
  EXPECT_LE(res.best_objective, at_t);
  double w_t = 0.0;
  for (int g : inst.X.planted_global()) w_t += w(g);
  EXPECT_EQ(w_t, at_t);
}

TEST(EnumerateSelectors, IndependentOfJobs) {
  const auto inst = build_instance(small_cfg(4, 4, 13));
  const auto a = enumerate_selectors(inst, 0.5, 1e-8, 1);
  const auto b = enumerate_selectors(inst, 0.5, 1e-8, 7);
  EXPECT_EQ(a.best_combos, b.best_combos);
  EXPECT_EQ(a.best_objective, b.best_objective);
  EXPECT_EQ(a.feasible_count, b.feasible_count);
  EXPECT_EQ(a.evaluated_count, 256u);
}

TEST(EnumerateSelectors, GuardTrips) {
  GenConfig cfg = small_cfg(10, 7, 1);
  cfg.m = cfg.n = 4;
  cfg.s = 1;
  const auto inst = build_instance(cfg);
  EXPECT_THROW(enumerate_selectors(inst, 0.5, 1e-8), GuardExceeded);
}

TEST(L0MinOracle, Examples) {
  const auto one = l0_min_oracle(Matrix::Identity(2, 2), Vector::Unit(2, 0), 2, 1e-10);
  ASSERT_TRUE(one.has_value());
  EXPECT_EQ(one->min_l0, 1);
  EXPECT_EQ(one->witness, (IndexList{0}));

  const auto zero = l0_min_oracle(Matrix::Identity(2, 2), Vector::Zero(2), 2, 1e-10);
  ASSERT_TRUE(zero.has_value());
  EXPECT_EQ(zero->min_l0, 0);

  Matrix a(2, 1);
  a << 1, 0;
  EXPECT_FALSE(l0_min_oracle(a, Vector::Unit(2, 1), 1, 1e-10).has_value());
  EXPECT_THROW(l0_min_oracle(Matrix::Identity(13, 13), Vector::Ones(13), 13, 1e-10), GuardExceeded);
}

TEST(L0MinOracle, MonotoneUnderAddedColumns) {
  Stream rng(5);
  for (int t = 0; t < 20; ++t) {
    Matrix a(4, 6);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 6; ++j) a(i, j) = rng.normal();
    Vector z = Vector::Zero(6);
    z(0) = 1.0;
    z(3) = -2.0;
    z(5) = 0.5;
    const Vector y = a * z;
    const auto base = l0_min_oracle(a, y, 4, 1e-9);
    Matrix wider(4, 8);
    wider << a, y, Vector::Unit(4, 0);
    const auto more = l0_min_oracle(wider, y, 4, 1e-9);
    ASSERT_TRUE(base && more);
    EXPECT_LE(more->min_l0, base->min_l0);
    EXPECT_EQ(more->min_l0, 1);
  }
}

TEST(DiscreteLpOracle, Scalar) {
  const auto res = discrete_lp_oracle(Matrix::Identity(1, 1), Vector::Ones(1), 0.5, {-1.0, 0.0, 1.0}, 1e-9);
  ASSERT_TRUE(res.has_value());
  EXPECT_DOUBLE_EQ(res->min_value, 1.0);
  ASSERT_EQ(res->witnesses.size(), 1u);
  EXPECT_EQ(res->witnesses[0](0), 1.0);
}

TEST(DiscreteLpOracle, RequiresZeroInGridAndFeasibility) {
  EXPECT_THROW(discrete_lp_oracle(Matrix::Identity(1, 1), Vector::Ones(1), 0.5, {-1.0, 1.0}, 1e-9), InvalidArgument);
  EXPECT_FALSE(discrete_lp_oracle(Matrix::Identity(1, 1), Vector::Constant(1, 0.3), 0.5, {-1.0, 0.0, 1.0}, 1e-9)
                   .has_value());
}
