#include "oracles.hpp"
#include "panelur/covariance.hpp"
#include "panelur/dgp.hpp"
#include "panelur/error.hpp"
#include "panelur/lan.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

namespace panelur::lan {
namespace {

double max_abs(const MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

MatrixXd row(std::initializer_list<double> values) {
  MatrixXd m(1, static_cast<Index>(values.size()));
  Index t = 0;
  for (double v : values) m(0, t++) = v;
  return m;
}

std::vector<Covariance> whites(Index n, Index T, double var = 1.0) {
  return std::vector<Covariance>(static_cast<std::size_t>(n), Covariance::white(T, var));
}

// Random nuisance with one covariance shape shared by every series.
OracleNuisance random_nuisance(Index n, Index T, Index K, CovarianceShape shape, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> var(0.4, 2.5);
  auto make = [&](double v) {
    switch (shape) {
      case CovarianceShape::Ma1: return Covariance::ma1(T, 0.4, v);
      case CovarianceShape::Ar1: return Covariance::ar1(T, -0.3, v);
      default: return Covariance::white(T, v);
    }
  };
  std::vector<Covariance> eta, f;
  for (Index i = 0; i < n; ++i) eta.push_back(make(var(rng)));
  for (Index k = 0; k < K; ++k) f.push_back(make(var(rng)));
  return OracleNuisance::make(std::move(eta), std::move(f), oracle::gaussian_matrix(n, K, rng));
}

// Null draw of the simulation design used by the convergence report, with
// differences that include the first level.
struct NullDraw {
  OracleNuisance nu;
  MatrixXd dE, dY;
};

MatrixXd full_differences(const MatrixXd& levels) {
  MatrixXd d(levels.rows(), levels.cols());
  d.col(0) = levels.col(0);
  for (Index t = 1; t < levels.cols(); ++t) d.col(t) = levels.col(t) - levels.col(t - 1);
  return d;
}

NullDraw null_draw(Index n, Index T, std::uint64_t seed) {
  DgpConfig c;
  c.n = n;
  c.T = T;
  c.K = 1;
  c.lrv_ratio = 0.8;
  c.factor_spec = {InnovationKind::Ma1, 0.4, Distribution::Gaussian, 1.0};
  c.idio_spec = c.factor_spec;
  c.seed = seed;
  const SimulatedPanel sim = simulate(c);
  std::vector<Covariance> eta;
  for (double w : sim.true_lrvs) {
    InnovationSpec spec = c.idio_spec;
    spec.target_lrv = w;
    eta.push_back(Covariance::of(spec, T));
  }
  std::vector<Covariance> f{Covariance::of(c.factor_spec, T)};
  return {OracleNuisance::make(std::move(eta), std::move(f), sim.true_loadings),
          full_differences(sim.idiosyncratic), full_differences(sim.panel.values())};
}

TEST(Covariance, StructuredShapesMatchTheirDenseMatrices) {
  const Index T = 7;
  const MatrixXd ma = Covariance::ma1(T, 0.4, 2.0).dense();
  EXPECT_DOUBLE_EQ(ma(0, 0), 2.0 * 1.16);
  EXPECT_DOUBLE_EQ(ma(3, 4), 2.0 * 0.4);
  EXPECT_EQ(ma(0, 2), 0.0);
  const MatrixXd ar = Covariance::ar1(T, 0.5, 1.5).dense();
  EXPECT_NEAR(ar(0, 0), 1.5 / 0.75, 1e-14);
  EXPECT_NEAR(ar(2, 5), 1.5 / 0.75 * 0.125, 1e-14);
  EXPECT_EQ(Covariance::white(T, 3.0).dense(), 3.0 * MatrixXd::Identity(T, T));
}

TEST(Covariance, SolvesAgreeWithDenseInverses) {
  std::mt19937_64 rng(1);
  const Index T = 30;
  const MatrixXd rhs = oracle::gaussian_matrix(T, 3, rng);
  const MatrixXd spd = [&] {
    const MatrixXd g = oracle::gaussian_matrix(T, T, rng);
    return MatrixXd(g * g.transpose() + MatrixXd::Identity(T, T));
  }();
  for (const Covariance& c : {Covariance::white(T, 2.0), Covariance::ma1(T, 0.4, 0.7), Covariance::ma1(T, -0.9, 1.0),
                              Covariance::ar1(T, 0.6, 1.3), Covariance::ar1(T, -0.4, 0.5), Covariance::from_matrix(spd)}) {
    const MatrixXd expected = c.dense().inverse() * rhs;
    EXPECT_LE(max_abs(c.solve(rhs) - expected), 1e-9 * std::max(1.0, max_abs(expected)));
    EXPECT_NEAR(c.approximate_lrv(), c.dense().sum() / static_cast<double>(T), 1e-10);
    EXPECT_NEAR(c.approximate_one_sided_lrv(),
                (oracle::lower_ones(T).cwiseProduct(c.dense())).sum() / static_cast<double>(T), 1e-10);
    for (Index m = 0; m < 3; ++m) EXPECT_NEAR(c.autocovariance(m), c.dense()(0, m), 1e-12);
  }
}

TEST(Covariance, OfMatchesTheSimulatedLaw) {
  InnovationSpec spec{InnovationKind::Ma1, 0.4, Distribution::Gaussian, 1.0};
  const Covariance c = Covariance::of(spec, 500);
  EXPECT_EQ(c.shape(), CovarianceShape::Ma1);
  // The approximate long-run variance tends to the target.
  EXPECT_NEAR(c.approximate_lrv(), 1.0, 0.01);
  spec.kind = InnovationKind::Iid;
  spec.target_lrv = 2.0;
  EXPECT_LE((Covariance::of(spec, 5).dense() - 2.0 * MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Covariance, ProportionalityAndErrors) {
  EXPECT_TRUE(Covariance::ma1(5, 0.4, 1.0).proportional_to(Covariance::ma1(5, 0.4, 3.0)));
  EXPECT_FALSE(Covariance::ma1(5, 0.4, 1.0).proportional_to(Covariance::ma1(5, 0.3, 1.0)));
  EXPECT_FALSE(Covariance::ma1(5, 0.4, 1.0).proportional_to(Covariance::ar1(5, 0.4, 1.0)));
  MatrixXd asym = MatrixXd::Identity(3, 3);
  asym(0, 1) = 0.5;
  EXPECT_THROW(Covariance::from_matrix(asym), Error);
  EXPECT_THROW(Covariance::from_matrix(-MatrixXd::Identity(3, 3)), Error);
  EXPECT_THROW(Covariance::ar1(4, 1.0, 1.0), Error);
}

TEST(DeltaPanic, HandExample) {
  const OracleNuisance nu = OracleNuisance::make(whites(1, 3), {}, MatrixXd(1, 0));
  const CentralSequence cs = delta_panic_exact(row({1, 2, 3}), nu);
  EXPECT_NEAR(cs.delta, 11.0 / 3.0, 1e-14);
  EXPECT_NEAR(cs.information, 10.0 / 9.0, 1e-14);
  EXPECT_NEAR(delta_simplified(row({1, 2, 3}), nu), 11.0 / 3.0, 1e-14);
  const CentralSequence zero = delta_panic_exact(MatrixXd::Zero(1, 3), nu);
  EXPECT_EQ(zero.delta, 0.0);
  EXPECT_EQ(zero.information, 0.0);
}

TEST(DeltaPanic, BlockwiseMatchesKroneckerConstruction) {
  std::mt19937_64 rng(2);
  for (CovarianceShape shape : {CovarianceShape::White, CovarianceShape::Ma1, CovarianceShape::Ar1}) {
    const OracleNuisance nu = random_nuisance(2, 4, 0, shape, rng);
    const MatrixXd d = oracle::gaussian_matrix(2, 4, rng);
    const CentralSequence fast = delta_panic_exact(d, nu);
    const CentralSequence slow = oracle::kron_central_sequence(d, oracle::dense_sigma_eps(nu));
    EXPECT_NEAR(fast.delta, slow.delta, 1e-10);
    EXPECT_NEAR(fast.information, slow.information, 1e-10);
  }
}

TEST(DeltaPanic, WhiteNoiseFormIsSymmetrizable) {
  std::mt19937_64 rng(3);
  const Index n = 3, T = 9;
  const OracleNuisance nu = OracleNuisance::make(whites(n, T, 2.0), {}, MatrixXd(n, 0));
  const MatrixXd d = oracle::gaussian_matrix(n, T, rng);
  const MatrixXd a = oracle::lower_ones(T);
  const MatrixXd sym = 0.5 * (a + a.transpose());
  double form = 0.0;
  for (Index i = 0; i < n; ++i) form += d.row(i) * sym * d.row(i).transpose();
  EXPECT_NEAR(delta_panic_exact(d, nu).delta, form / (2.0 * std::sqrt(3.0) * 9.0), 1e-12);
  // Equivalently ((sum y)^2 - sum y^2) / 2 per unit.
  double sums = 0.0;
  for (Index i = 0; i < n; ++i) sums += 0.5 * (std::pow(d.row(i).sum(), 2) - d.row(i).squaredNorm());
  EXPECT_NEAR(form, sums, 1e-12);
}

TEST(DeltaSimplified, WhiteNoiseEqualsExact) {
  std::mt19937_64 rng(4);
  const OracleNuisance nu = random_nuisance(5, 20, 0, CovarianceShape::White, rng);
  const MatrixXd d = oracle::gaussian_matrix(5, 20, rng);
  for (double o : nu.oslrv_eta) EXPECT_EQ(o, 0.0);
  EXPECT_NEAR(delta_simplified(d, nu), delta_panic_exact(d, nu).delta, 1e-12);
}

TEST(DeltaMp, SixBySixExample) {
  const OracleNuisance nu = OracleNuisance::make(whites(2, 3), {Covariance::white(3, 1.0)}, MatrixXd::Ones(2, 1));
  const MatrixXd sigma = oracle::kron(MatrixXd::Ones(2, 2), MatrixXd::Identity(3, 3)) + MatrixXd::Identity(6, 6);
  EXPECT_LE(max_abs(oracle::dense_sigma_eps(nu) - sigma), 0.0);
  MatrixXd d(2, 3);
  d << 1, -2, 0.5, 0.3, 2, -1;
  const CentralSequence slow = oracle::kron_central_sequence(d, sigma);
  const CentralSequence exact = delta_mp_exact(d, nu);
  EXPECT_NEAR(exact.delta, slow.delta, 1e-12);
  EXPECT_NEAR(exact.information, slow.information, 1e-12);
  ASSERT_TRUE(has_common_shape(nu));
  const CentralSequence structured = delta_mp_common_shape(d, nu);
  EXPECT_NEAR(structured.delta, slow.delta, 1e-12);
  EXPECT_NEAR(structured.information, slow.information, 1e-12);
}

TEST(DeltaMp, ExactAndStructuredPathsAgreeWithKronecker) {
  std::mt19937_64 rng(5);
  for (CovarianceShape shape : {CovarianceShape::White, CovarianceShape::Ma1, CovarianceShape::Ar1}) {
    for (Index K : {1, 2}) {
      const OracleNuisance nu = random_nuisance(3, 6, K, shape, rng);
      const MatrixXd d = oracle::gaussian_matrix(3, 6, rng);
      const CentralSequence slow = oracle::kron_central_sequence(d, oracle::dense_sigma_eps(nu));
      const CentralSequence exact = delta_mp_exact(d, nu);
      const CentralSequence structured = delta_mp_common_shape(d, nu);
      EXPECT_NEAR(exact.delta, slow.delta, 1e-10);
      EXPECT_NEAR(exact.information, slow.information, 1e-10);
      EXPECT_NEAR(structured.delta, slow.delta, 1e-10);
      EXPECT_NEAR(structured.information, slow.information, 1e-10);
    }
  }
}

TEST(DeltaMp, MixedShapesHaveNoCommonShape) {
  const OracleNuisance nu = OracleNuisance::make({Covariance::ma1(4, 0.4, 1.0), Covariance::white(4, 1.0)},
                                                 {Covariance::ma1(4, 0.4, 1.0)}, MatrixXd::Ones(2, 1));
  EXPECT_FALSE(has_common_shape(nu));
  EXPECT_THROW(delta_mp_common_shape(MatrixXd::Zero(2, 4), nu), Error);
}

TEST(DeltaMp, NoFactorsCollapseToPanic) {
  std::mt19937_64 rng(6);
  for (CovarianceShape shape : {CovarianceShape::White, CovarianceShape::Ma1}) {
    const OracleNuisance nu = random_nuisance(4, 15, 0, shape, rng);
    const MatrixXd d = oracle::gaussian_matrix(4, 15, rng);
    const CentralSequence panic = delta_panic_exact(d, nu);
    const CentralSequence mp = delta_mp_exact(d, nu);
    EXPECT_NEAR(mp.delta, panic.delta, 1e-12);
    EXPECT_NEAR(mp.information, panic.information, 1e-12);
    EXPECT_NEAR(delta_mp_common_shape(d, nu).delta, panic.delta, 1e-12);
    EXPECT_NEAR(delta_mp_tilde(d, nu), delta_simplified(d, nu), 1e-12);
    EXPECT_NEAR(delta_star(d, nu), delta_simplified(d, nu), 1e-12);
  }
}

TEST(DeltaMp, ResourceGuard) {
  const OracleNuisance nu = OracleNuisance::make(whites(50, 100), {}, MatrixXd(50, 0));
  try {
    delta_mp_exact(MatrixXd::Zero(50, 100), nu);
    FAIL() << "expected a resource error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Resource);
  }
}

TEST(PsiEpsilon, WoodburyMatchesDirectInversion) {
  std::mt19937_64 rng(7);
  for (Index n : {2, 5, 20, 50}) {
    for (Index K : {1, 3}) {
      const OracleNuisance nu = random_nuisance(n, 10, K, CovarianceShape::Ma1, rng);
      EXPECT_LE(max_abs(psi_epsilon_inverse_smw(nu) - psi_epsilon_inverse_direct(nu)), 1e-9) << n << ' ' << K;
    }
  }
}

TEST(DeltaStar, RotationInvariance) {
  std::mt19937_64 rng(8);
  for (Index K : {1, 2, 3}) {
    OracleNuisance nu = random_nuisance(8, 12, K, CovarianceShape::Ma1, rng);
    const MatrixXd d = oracle::gaussian_matrix(8, 12, rng);
    const double before = delta_star(d, nu);
    MatrixXd h;
    do h = oracle::gaussian_matrix(K, K, rng);
    while (std::abs(h.determinant()) < 0.2);
    nu.loadings = nu.loadings * h;
    EXPECT_NEAR(delta_star(d, nu), before, 1e-9);
  }
}

TEST(DeltaStar, AnnihilatesFactorDirections) {
  std::mt19937_64 rng(9);
  const OracleNuisance nu = random_nuisance(6, 10, 2, CovarianceShape::Ma1, rng);
  const MatrixXd p = projection_precision(nu.lrv_eta, nu.loadings);
  EXPECT_LE(max_abs(p * nu.loadings), 1e-10);
  // Adding any factor component to the data leaves the statistic unchanged.
  const MatrixXd d = oracle::gaussian_matrix(6, 10, rng);
  const MatrixXd with_factors = d + nu.loadings * oracle::gaussian_matrix(2, 10, rng);
  EXPECT_NEAR(delta_star(with_factors, nu), delta_star(d, nu), 1e-10);
}

TEST(CentralSequenceChain, SimplifiedTracksExactPanicAndShrinks) {
  std::vector<double> small, large;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const NullDraw a = null_draw(50, 200, 10000 + seed);
    small.push_back(std::abs(delta_simplified(a.dE, a.nu) - delta_panic_exact(a.dE, a.nu).delta));
    const NullDraw b = null_draw(50, 400, 20000 + seed);
    large.push_back(std::abs(delta_simplified(b.dE, b.nu) - delta_panic_exact(b.dE, b.nu).delta));
  }
  EXPECT_LT(oracle::median(small), 0.15);
  EXPECT_LT(oracle::median(large), oracle::median(small));
}

TEST(CentralSequenceChain, MpIsCloseToStar) {
  std::vector<double> gaps;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const NullDraw draw = null_draw(25, 100, 30000 + seed);
    gaps.push_back(std::abs(delta_mp_common_shape(draw.dY, draw.nu).delta - delta_star(draw.dY, draw.nu)));
  }
  EXPECT_LT(oracle::median(gaps), 0.2);
}

TEST(CentralSequenceChain, StarIsCloseToSimplified) {
  std::vector<double> gaps;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const NullDraw draw = null_draw(50, 200, 40000 + seed);
    gaps.push_back(std::abs(delta_star(draw.dY, draw.nu) - delta_simplified(draw.dE, draw.nu)));
  }
  EXPECT_LT(oracle::median(gaps), 0.15);
}

TEST(LanReport, ZeroSeedsGiveAnEmptyTable) {
  LanReportConfig cfg;
  cfg.seeds = 0;
  EXPECT_TRUE(lan_convergence_report(cfg).empty());
}

TEST(LanReport, RowsAndCsv) {
  LanReportConfig cfg;
  cfg.sizes = {{5, 20}, {10, 40}};
  cfg.seeds = 8;
  const auto rows = lan_convergence_report(cfg);
  ASSERT_EQ(rows.size(), 22u);
  EXPECT_EQ(rows[0].quantity, "delta_panic");
  EXPECT_TRUE(std::isnan(rows[0].median_abs_diff));
  EXPECT_EQ(rows[10].quantity, "star_vs_delta");
  EXPECT_GE(rows[10].median_abs_diff, 0.0);
  EXPECT_EQ(rows[11].n, 10);
  for (const auto& r : rows) EXPECT_EQ(r.seeds, 8);

  std::ostringstream csv;
  write_lan_report_csv(csv, rows);
  std::string header;
  std::istringstream in(csv.str());
  std::getline(in, header);
  EXPECT_EQ(header, "n,T,quantity,median_abs_diff,mean,variance,skew,kurtosis,seeds");
  std::string first;
  std::getline(in, first);
  EXPECT_EQ(first.rfind("5,20,delta_panic,NA,", 0), 0u);

  // Worker count does not change the numbers.
  cfg.workers = 3;
  const auto parallel = lan_convergence_report(cfg);
  for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(parallel[i].mean, rows[i].mean);
}

}  // namespace
}  // namespace panelur::lan
