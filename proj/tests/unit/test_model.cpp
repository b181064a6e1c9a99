#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "sempath/error.hpp"
#include "sempath/model.hpp"

using namespace sempath;
using sempath::testing::Rng;

namespace {

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

}  // namespace

TEST(ZeroPattern, DiagonalAlwaysPresent) {
  const std::vector<ZeroPattern::Index> pairs{{0, 1}, {0, 1}, {2, 0}};
  const ZeroPattern p(3, pairs);
  for (int i = 0; i < 3; ++i) EXPECT_TRUE(p.contains(i, i));
  EXPECT_TRUE(p.contains(0, 1));
  EXPECT_FALSE(p.contains(1, 0));
  EXPECT_EQ(p.size(), 5u);  // duplicates collapse
  EXPECT_EQ(p.free_count(), 4u);
}

TEST(ZeroPattern, RejectsOutOfRange) {
  const std::vector<ZeroPattern::Index> bad{{0, 3}};
  EXPECT_THROW(ZeroPattern(3, bad), std::out_of_range);
  const std::vector<ZeroPattern::Index> negative{{-1, 0}};
  EXPECT_THROW(ZeroPattern(3, negative), std::out_of_range);
}

TEST(ZeroPattern, FullAndUnion) {
  const ZeroPattern full = ZeroPattern::full(4);
  EXPECT_EQ(full.size(), 16u);
  EXPECT_EQ(full.free_count(), 0u);
  const std::vector<ZeroPattern::Index> a{{0, 1}};
  const std::vector<ZeroPattern::Index> b{{1, 0}};
  const ZeroPattern u = ZeroPattern(2, a).united(ZeroPattern(2, b));
  EXPECT_EQ(u, ZeroPattern::full(2));
  EXPECT_TRUE(u.includes(ZeroPattern(2, a)));
  EXPECT_FALSE(ZeroPattern(2, a).includes(u));
}

TEST(ProjectPattern, HandExample) {
  const std::vector<ZeroPattern::Index> pairs{{0, 1}};
  const Matrix p = project_pattern(mat2(1, 2, 3, 4), ZeroPattern(2, pairs));
  EXPECT_EQ(p, mat2(1, 2, 0, 4));
}

TEST(ProjectPattern, FullIsIdentityDiagonalKeepsDiagonal) {
  Rng rng(1);
  const Matrix m = sempath::testing::random_matrix(5, 5, rng);
  EXPECT_EQ(project_pattern(m, ZeroPattern::full(5)), m);
  const Matrix d = m.diagonal().asDiagonal();
  EXPECT_EQ(project_pattern(m, ZeroPattern(5)), d);
}

TEST(ProjectPattern, DimensionMismatchThrows) {
  EXPECT_THROW(project_pattern(Matrix::Zero(3, 3), ZeroPattern(2)), std::invalid_argument);
}

TEST(ProjectPattern, AlgebraicProperties) {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 6;
    const ZeroPattern pat = sempath::testing::random_pattern(n, 0.4, rng);
    const Matrix x = sempath::testing::random_matrix(n, n, rng);
    const Matrix y = sempath::testing::random_matrix(n, n, rng);
    const Matrix px = project_pattern(x, pat);
    EXPECT_EQ(project_pattern(px, pat), px);
    EXPECT_EQ(px + project_complement(x, pat), x);
    EXPECT_EQ(project_complement(px, pat), Matrix::Zero(n, n));
    // self-adjoint in the trace inner product
    EXPECT_NEAR((y.transpose() * px).trace(), (project_pattern(y, pat).transpose() * x).trace(), 1e-12);
  }
}

TEST(PathModel, ValidatesInvariants) {
  const Matrix eye = Matrix::Identity(2, 2);
  EXPECT_NO_THROW(PathModel(mat2(0, 0, 0.5, 0), eye, ZeroPattern(2)));
  EXPECT_THROW(PathModel(mat2(1, 0, 0, 0), eye, ZeroPattern(2)), std::invalid_argument);  // diagonal
  const std::vector<ZeroPattern::Index> pairs{{1, 0}};
  EXPECT_THROW(PathModel(mat2(0, 0, 0.5, 0), eye, ZeroPattern(2, pairs)), std::invalid_argument);
  EXPECT_THROW(PathModel(Matrix::Zero(2, 2), mat2(1, 0.5, 0, 1), ZeroPattern(2)), std::invalid_argument);
  EXPECT_THROW(PathModel(Matrix::Zero(2, 2), mat2(1, 0, 0, -0.1), ZeroPattern(2)), std::invalid_argument);
  // I - A singular: A = [[0,1],[1,0]]
  EXPECT_THROW(PathModel(mat2(0, 1, 1, 0), eye, ZeroPattern(2)), NumericalError);
}

TEST(PathModel, AcceptsTinyNegativeEigenvalueWithinTolerance) {
  EXPECT_NO_THROW(PathModel(Matrix::Zero(2, 2), mat2(1, 0, 0, -1e-10), ZeroPattern(2)));
}

TEST(ImpliedCovariance, Examples) {
  const Matrix eye = Matrix::Identity(3, 3);
  EXPECT_TRUE(implied_covariance(PathModel(Matrix::Zero(3, 3), eye, ZeroPattern(3))).isApprox(eye, 1e-15));

  const Matrix sigma = implied_covariance(PathModel(mat2(0, 0, 0.5, 0), Matrix::Identity(2, 2), ZeroPattern(2)));
  EXPECT_NEAR((sigma - mat2(1, 0.5, 0.5, 1.25)).norm(), 0.0, 1e-14);

  Matrix d = Matrix::Zero(3, 3);
  d.diagonal() << 0.5, 2.0, 3.0;
  EXPECT_NEAR((implied_covariance(PathModel(Matrix::Zero(3, 3), d, ZeroPattern(3))) - d).norm(), 0.0, 1e-15);
}

TEST(ImpliedCovariance, PsiPassesThroughWhenAIsZero) {
  Rng rng(3);
  const Matrix psi = sempath::testing::random_spd(4, rng);
  EXPECT_NEAR((implied_covariance(PathModel(Matrix::Zero(4, 4), psi, ZeroPattern(4))) - psi).norm(), 0.0, 1e-13);
}

TEST(KlDivergence, Examples) {
  Matrix s(1, 1);
  s << 1.0;
  Matrix sigma(1, 1);
  sigma << 2.0;
  // log 2 + 1/2 - 1
  EXPECT_NEAR(kl_divergence(s, sigma), 0.19314718055994531, 1e-14);
  Rng rng(4);
  const Matrix a = sempath::testing::random_spd(5, rng);
  EXPECT_NEAR(kl_divergence(a, a), 0.0, 1e-12);
}

TEST(KlDivergence, NonnegativeOnRandomPairs) {
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    const Matrix a = sempath::testing::random_spd(4, rng);
    const Matrix b = sempath::testing::random_spd(4, rng);
    EXPECT_GE(kl_divergence(a, b), 0.0);
  }
}

TEST(KlDivergence, ZeroWhenModelReproducesS) {
  const PathModel model(mat2(0, 0.3, 0, 0), mat2(0.5, 0, 0, 2.0), ZeroPattern(2));
  const Matrix s = implied_covariance(model);
  EXPECT_NEAR(kl_divergence(s, implied_covariance(model)), 0.0, 1e-13);
}

TEST(KlDivergence, RejectsNonPd) {
  EXPECT_THROW(kl_divergence(mat2(1, 0, 0, -1), Matrix::Identity(2, 2)), NumericalError);
}

TEST(DegreesOfFreedom, Examples) {
  EXPECT_EQ(degrees_of_freedom(ZeroPattern(2), true), -3);
  for (int n : {2, 3, 7}) {
    EXPECT_EQ(degrees_of_freedom(ZeroPattern::full(n), true), n * (n - 1) / 2 - n);
  }
  // n = 11 with 55 imposed zeros plus the diagonal
  std::vector<ZeroPattern::Index> lower;
  for (int i = 0; i < 11; ++i)
    for (int j = 0; j < i; ++j) lower.emplace_back(i, j);
  const ZeroPattern p(11, lower);
  ASSERT_EQ(p.size(), 66u);
  EXPECT_EQ(degrees_of_freedom(p, true), -11);
  EXPECT_EQ(degrees_of_freedom(p, true, KnownCount::covariance_entries), 0);
  EXPECT_EQ(degrees_of_freedom(ZeroPattern(2), false), 1 - (2 + 3));
}

TEST(SampleCovariance, MatchesDefinition) {
  Matrix y(4, 2);
  y << 1, 2, 3, 4, 5, 7, 7, 11;
  // column means 4, 6; deviations (-3,-1,1,3), (-4,-2,1,5)
  const Matrix s = sample_covariance(y);
  EXPECT_NEAR(s(0, 0), 20.0 / 3.0, 1e-14);
  EXPECT_NEAR(s(0, 1), 10.0, 1e-14);
  EXPECT_NEAR(s(1, 1), 46.0 / 3.0, 1e-14);
  const Matrix raw = sample_covariance(y, false);
  EXPECT_NEAR(raw(0, 0), (1 + 9 + 25 + 49) / 3.0, 1e-14);
}

TEST(LowrankGap, ZeroForRankNConstruction) {
  Rng rng(6);
  const Matrix x2 = Matrix::Identity(3, 3) + 0.3 * sempath::testing::random_matrix(3, 3, rng);
  const Matrix x4 = sempath::testing::random_spd(3, rng);
  const BlockVariable x{x2.transpose() * x4.inverse() * x2, x2, x4};
  EXPECT_LT(lowrank_gap(x), 1e-14);
  BlockVariable y = x;
  y.x1 += Matrix::Identity(3, 3);
  EXPECT_GT(lowrank_gap(y), 0.01);
  y.x4.setZero();
  EXPECT_THROW(lowrank_gap(y), NumericalError);
}

TEST(BlockVariable, NormCountsOffDiagonalBlockTwice) {
  Rng rng(7);
  const BlockVariable a = sempath::testing::random_block(3, rng);
  const BlockVariable b = sempath::testing::random_block(3, rng);
  EXPECT_NEAR(a.norm(), a.assemble().norm(), 1e-12);
  EXPECT_NEAR(a.dot(b), (a.assemble().array() * b.assemble().array()).sum(), 1e-12);
  const BlockVariable round = BlockVariable::from_full(a.assemble());
  EXPECT_NEAR((round - a).x2.norm(), 0.0, 1e-15);
}
