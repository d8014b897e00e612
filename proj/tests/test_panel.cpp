#include "oracles.hpp"
#include "panelur/error.hpp"
#include "panelur/panel.hpp"

#include <gtest/gtest.h>

#include <limits>

namespace panelur {
namespace {

TEST(Difference, SingleUnit) {
  MatrixXd v(1, 3);
  v << 1, 3, 6;
  const DiffPanel d = difference(Panel(v));
  ASSERT_EQ(d.periods(), 2);
  EXPECT_EQ(d(0, 0), 2.0);
  EXPECT_EQ(d(0, 1), 3.0);
}

TEST(Difference, ConstantPanelVanishes) {
  const DiffPanel d = difference(Panel(MatrixXd::Constant(2, 3, 4.5)));
  EXPECT_TRUE(d.values().isZero(0.0));
}

TEST(Difference, CumulatingFromTheFirstLevelRecoversThePanel) {
  std::mt19937_64 rng(1);
  const Panel p(oracle::gaussian_matrix(3, 5, rng));
  const DiffPanel d = difference(p);
  for (Index i = 0; i < 3; ++i) {
    double level = p(i, 0);
    for (Index t = 1; t < 5; ++t) {
      level += d(i, t - 1);
      EXPECT_NEAR(level, p(i, t), 1e-12);
    }
  }
}

TEST(CumsumMatrix, SmallCases) {
  MatrixXd expected(3, 3);
  expected << 0, 0, 0, 1, 0, 0, 1, 1, 0;
  EXPECT_EQ(cumsum_matrix(3), expected);
  EXPECT_EQ(cumsum_matrix(1), MatrixXd::Zero(1, 1));
}

TEST(CumsumMatrix, SymmetrizedIsOnesMinusIdentity) {
  for (Index T = 2; T <= 8; ++T) {
    const MatrixXd a = cumsum_matrix(T);
    const MatrixXd target = MatrixXd::Ones(T, T) - MatrixXd::Identity(T, T);
    EXPECT_EQ(a + a.transpose(), target) << "T = " << T;
  }
}

TEST(ApplyCumsum, LaggedPartialSums) {
  MatrixXd v(1, 2);
  v << 2, 3;
  const Panel p = apply_cumsum(DiffPanel(v));
  EXPECT_EQ(p(0, 0), 0.0);
  EXPECT_EQ(p(0, 1), 2.0);
  EXPECT_TRUE(apply_cumsum(DiffPanel(MatrixXd::Zero(2, 4))).values().isZero(0.0));
}

TEST(ApplyCumsum, MatchesExplicitMatrixProduct) {
  std::mt19937_64 rng(2);
  const MatrixXd d = oracle::gaussian_matrix(2, 4, rng);
  const MatrixXd expected = d * oracle::lower_ones(4).transpose();
  EXPECT_LE((apply_cumsum(DiffPanel(d)).values() - expected).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((lagged_partial_sums(d) - expected).cwiseAbs().maxCoeff(), 1e-12);
}

// apply_cumsum drops the final difference (its output has one level per
// difference), so the round trip returns every column except the last.
TEST(ApplyCumsum, DifferencingTheCumulatedPathReturnsTheLeadingDifferences) {
  std::mt19937_64 rng(3);
  const MatrixXd d = oracle::gaussian_matrix(3, 6, rng);
  const DiffPanel back = difference(apply_cumsum(DiffPanel(d)));
  EXPECT_LE((back.values() - d.leftCols(5)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ApplyCumsum, UndoesDifferencingUpToTheInitialLevel) {
  std::mt19937_64 rng(4);
  const MatrixXd z = oracle::gaussian_matrix(3, 7, rng);
  const MatrixXd rebuilt = apply_cumsum(difference(Panel(z))).values();
  const MatrixXd expected = z.leftCols(6).colwise() - z.col(0);
  EXPECT_LE((rebuilt - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Panel, RejectsInvalidShapesAndValues) {
  EXPECT_THROW(Panel(MatrixXd::Zero(2, 1)), Error);
  EXPECT_THROW(Panel(MatrixXd::Zero(0, 3)), Error);
  MatrixXd bad = MatrixXd::Zero(2, 3);
  bad(1, 2) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(Panel{bad}, Error);
  EXPECT_THROW(Panel(MatrixXd::Zero(2, 3), {"a", "a"}, {"1", "2", "3"}), Error);
  EXPECT_THROW(Panel(MatrixXd::Zero(2, 3), {"a", "b"}, {"1", "2", "2"}), Error);
  EXPECT_THROW(Panel(MatrixXd::Zero(2, 3), {"a"}, {"1", "2", "3"}), Error);
  EXPECT_THROW(Series(std::vector<double>{}), Error);
  EXPECT_THROW(DiffPanel(MatrixXd::Zero(2, 0)), Error);
}

TEST(Panel, DefaultLabelsAreOneBased) {
  const Panel p(MatrixXd::Zero(2, 3));
  EXPECT_EQ(p.unit_ids(), (std::vector<std::string>{"1", "2"}));
  EXPECT_EQ(p.time_ids(), (std::vector<std::string>{"1", "2", "3"}));
  EXPECT_EQ(p.unit(1).size(), 3u);
}

}  // namespace
}  // namespace panelur
