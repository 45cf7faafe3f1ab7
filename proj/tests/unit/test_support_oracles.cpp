#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"

TEST(SupportOracles, LpVertexMinSmallCases) {
  Eigen::MatrixXd b(1, 2);
  b << 1, 1;
  Eigen::VectorXd w(2);
  w << 1, 2;
  const auto r = oracle::lp_vertex_min(b, w, Eigen::VectorXd::Ones(1), 1e-12);
  ASSERT_TRUE(r.has_value());
  EXPECT_DOUBLE_EQ(r->objective, 1.0);
  EXPECT_DOUBLE_EQ(r->z(0), 1.0);

  Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(2, 2);
  EXPECT_FALSE(oracle::lp_vertex_min(zero, Eigen::VectorXd::Ones(2), Eigen::VectorXd::Ones(2), 1e-12).has_value());
  const auto trivial = oracle::lp_vertex_min(zero, Eigen::VectorXd::Ones(2), Eigen::VectorXd::Zero(2), 1e-12);
  ASSERT_TRUE(trivial.has_value());
  EXPECT_EQ(trivial->objective, 0.0);
}

TEST(SupportOracles, SpectralNorm) {
  Eigen::MatrixXd m(2, 2);
  m << 3, 0, 0, -4;
  EXPECT_NEAR(oracle::spectral_norm(m), 4.0, 1e-14);
}

TEST(SupportOracles, ExactCover) {
  EXPECT_TRUE(oracle::exact_cover_exists(6, {{1, 2, 3}, {4, 5, 6}}));
  EXPECT_FALSE(oracle::exact_cover_exists(6, {{1, 2, 3}, {3, 4, 5}}));
  EXPECT_TRUE(oracle::exact_cover_exists(6, {{1, 2, 4}, {1, 2, 3}, {3, 5, 6}, {4, 5, 6}}));
}

TEST(SupportOracles, EqualSumPartition) {
  EXPECT_TRUE(oracle::equal_sum_partition_exists({3, 1, 2}));
  EXPECT_FALSE(oracle::equal_sum_partition_exists({1, 2}));
  EXPECT_TRUE(oracle::equal_sum_partition_exists({1, 1}));
  EXPECT_FALSE(oracle::equal_sum_partition_exists({5}));
}

TEST(SupportOracles, LimitRatioLongDouble) {
  // 1 - (1 - 0.5)^2 = 0.75, divided by 0.5/0.5 = 1.
  EXPECT_NEAR(static_cast<double>(oracle::limit_ratio_ld(0.5L, 0.5L)), 0.75, 1e-15);
}

TEST(SupportOracles, KronAndVec) {
  Eigen::MatrixXd a(1, 2), b(2, 1);
  a << 1, 2;
  b << 3, 4;
  Eigen::MatrixXd expected(2, 2);
  expected << 3, 6, 4, 8;
  EXPECT_TRUE(oracle::kron(a, b) == expected);
  Eigen::VectorXd v(4);
  v << 3, 4, 6, 8;
  EXPECT_TRUE(oracle::vec_cols(expected) == v);
}
