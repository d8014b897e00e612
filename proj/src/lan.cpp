#include "panelur/lan.hpp"

#include "panelur/dgp.hpp"
#include "panelur/error.hpp"
#include "panelur/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>

namespace panelur::lan {
namespace {

constexpr Index kDenseLimit = 4000;

void check_shape(const MatrixXd& d, const OracleNuisance& nu) {
  require(d.rows() == nu.units() && d.cols() == nu.periods(), ErrorKind::Dimension,
          "differences do not match the nuisance dimensions");
}

double correction(const OracleNuisance& nu) {
  double total = 0.0;
  for (std::size_t i = 0; i < nu.lrv_eta.size(); ++i) {
    require(nu.lrv_eta[i] > 0.0, ErrorKind::Numerical, "approximate long-run variance is zero");
    total += nu.oslrv_eta[i] / nu.lrv_eta[i];
  }
  return total / std::sqrt(static_cast<double>(nu.units()));
}

double scale(const OracleNuisance& nu) {
  return std::sqrt(static_cast<double>(nu.units())) * static_cast<double>(nu.periods());
}

// sum_ij P_ij (A y_i)' y_j / (sqrt(n) T) - correction, the common form of the
// simplified central sequences with precision P kron I.
double kron_identity_form(const MatrixXd& dY, const MatrixXd& precision, const OracleNuisance& nu) {
  const MatrixXd cross = lagged_partial_sums(dY) * dY.transpose();
  return precision.cwiseProduct(cross).sum() / scale(nu) - correction(nu);
}

VectorXd diagonal_lrv(const OracleNuisance& nu) {
  VectorXd out(nu.units());
  for (Index i = 0; i < nu.units(); ++i) out(i) = nu.lrv_eta[static_cast<std::size_t>(i)];
  return out;
}

Covariance unit_shape(const Covariance& c) {
  switch (c.shape()) {
    case CovarianceShape::White: return Covariance::white(c.size(), 1.0);
    case CovarianceShape::Ma1: return Covariance::ma1(c.size(), c.parameter(), 1.0);
    case CovarianceShape::Ar1: return Covariance::ar1(c.size(), c.parameter(), 1.0);
    case CovarianceShape::Dense: break;
  }
  fail(ErrorKind::Config, "dense covariances have no common shape");
}

struct Moments {
  double mean = 0.0, variance = 0.0, skew = 0.0, kurtosis = 0.0;
};

Moments moments(const std::vector<double>& x) {
  Moments m;
  const double count = static_cast<double>(x.size());
  if (x.empty()) return m;
  for (double v : x) m.mean += v;
  m.mean /= count;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double c = v - m.mean;
    m2 += c * c;
    m3 += c * c * c;
    m4 += c * c * c * c;
  }
  m2 /= count;
  m3 /= count;
  m4 /= count;
  m.variance = x.size() > 1 ? m2 * count / (count - 1.0) : 0.0;
  m.skew = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
  m.kurtosis = m2 > 0.0 ? m4 / (m2 * m2) : 0.0;
  return m;
}

double median(std::vector<double> x) {
  if (x.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t mid = x.size() / 2;
  std::nth_element(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(mid), x.end());
  const double upper = x[mid];
  if (x.size() % 2 == 1) return upper;
  return 0.5 * (upper + *std::max_element(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(mid)));
}

// Full differences x_1..x_T of levels whose value before the sample is zero.
MatrixXd full_differences(const MatrixXd& levels) {
  MatrixXd d(levels.rows(), levels.cols());
  d.col(0) = levels.col(0);
  d.rightCols(levels.cols() - 1) = levels.rightCols(levels.cols() - 1) - levels.leftCols(levels.cols() - 1);
  return d;
}

}  // namespace

OracleNuisance OracleNuisance::make(std::vector<Covariance> sigma_eta, std::vector<Covariance> sigma_f,
                                    MatrixXd loadings) {
  require(!sigma_eta.empty(), ErrorKind::Dimension, "need at least one unit");
  require(loadings.rows() == static_cast<Index>(sigma_eta.size()) &&
              loadings.cols() == static_cast<Index>(sigma_f.size()),
          ErrorKind::Dimension, "loadings must be n x K");
  const Index T = sigma_eta.front().size();
  OracleNuisance nu;
  for (const auto& c : sigma_eta) {
    require(c.size() == T, ErrorKind::Dimension, "covariances must share T");
    nu.lrv_eta.push_back(c.approximate_lrv());
    nu.oslrv_eta.push_back(c.approximate_one_sided_lrv());
  }
  for (const auto& c : sigma_f) {
    require(c.size() == T, ErrorKind::Dimension, "covariances must share T");
    nu.lrv_f.push_back(c.approximate_lrv());
  }
  nu.sigma_eta = std::move(sigma_eta);
  nu.sigma_f = std::move(sigma_f);
  nu.loadings = std::move(loadings);
  return nu;
}

CentralSequence delta_panic_exact(const MatrixXd& dE, const OracleNuisance& nu) {
  check_shape(dE, nu);
  const MatrixXd lagged = lagged_partial_sums(dE);
  double delta = 0.0, info = 0.0;
  for (Index i = 0; i < nu.units(); ++i) {
    const auto& sigma = nu.sigma_eta[static_cast<std::size_t>(i)];
    MatrixXd rhs(nu.periods(), 2);
    rhs.col(0) = dE.row(i).transpose();
    rhs.col(1) = lagged.row(i).transpose();
    const MatrixXd solved = sigma.solve(rhs);
    require(solved.allFinite(), ErrorKind::Numerical, "singular idiosyncratic covariance");
    delta += lagged.row(i).dot(solved.col(0));
    info += lagged.row(i).dot(solved.col(1));
  }
  const double s = scale(nu);
  return {delta / s, info / (s * s)};
}

double delta_simplified(const MatrixXd& dE, const OracleNuisance& nu) {
  check_shape(dE, nu);
  const VectorXd lrv = diagonal_lrv(nu);
  require((lrv.array() > 0.0).all(), ErrorKind::Numerical, "approximate long-run variance is zero");
  return kron_identity_form(dE, lrv.cwiseInverse().asDiagonal().toDenseMatrix(), nu);
}

CentralSequence delta_mp_exact(const MatrixXd& dY, const OracleNuisance& nu) {
  check_shape(dY, nu);
  const Index n = nu.units();
  const Index T = nu.periods();
  require(n * T <= kDenseLimit, ErrorKind::Resource,
          "dense MP central sequence needs n*T <= 4000, got " + std::to_string(n * T));
  MatrixXd sigma = MatrixXd::Zero(n * T, n * T);
  for (Index k = 0; k < nu.factors(); ++k) {
    const MatrixXd block = nu.sigma_f[static_cast<std::size_t>(k)].dense();
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        sigma.block(i * T, j * T, T, T) += nu.loadings(i, k) * nu.loadings(j, k) * block;
  }
  for (Index i = 0; i < n; ++i) sigma.block(i * T, i * T, T, T) += nu.sigma_eta[static_cast<std::size_t>(i)].dense();

  Eigen::LLT<MatrixXd> llt(sigma);
  require(llt.info() == Eigen::Success, ErrorKind::Numerical, "covariance of eps is singular");
  const MatrixXd lagged = lagged_partial_sums(dY);
  MatrixXd vectors(n * T, 2);
  for (Index i = 0; i < n; ++i) {
    vectors.block(i * T, 0, T, 1) = dY.row(i).transpose();
    vectors.block(i * T, 1, T, 1) = lagged.row(i).transpose();
  }
  const MatrixXd solved = llt.solve(vectors);
  const double s = scale(nu);
  return {vectors.col(1).dot(solved.col(0)) / s, vectors.col(1).dot(solved.col(1)) / (s * s)};
}

bool has_common_shape(const OracleNuisance& nu) {
  const Covariance& first = nu.sigma_eta.front();
  if (first.shape() == CovarianceShape::Dense) return false;
  for (const auto& c : nu.sigma_eta)
    if (!first.proportional_to(c)) return false;
  for (const auto& c : nu.sigma_f)
    if (!first.proportional_to(c)) return false;
  return true;
}

CentralSequence delta_mp_common_shape(const MatrixXd& dY, const OracleNuisance& nu) {
  check_shape(dY, nu);
  require(has_common_shape(nu), ErrorKind::Config, "covariances do not share a structured shape");
  const Index n = nu.units();
  const Covariance shape = unit_shape(nu.sigma_eta.front());

  MatrixXd m = MatrixXd::Zero(n, n);
  for (Index k = 0; k < nu.factors(); ++k)
    m += nu.sigma_f[static_cast<std::size_t>(k)].innovation_variance() * nu.loadings.col(k) *
         nu.loadings.col(k).transpose();
  for (Index i = 0; i < n; ++i) m(i, i) += nu.sigma_eta[static_cast<std::size_t>(i)].innovation_variance();
  Eigen::LLT<MatrixXd> llt(m);
  require(llt.info() == Eigen::Success, ErrorKind::Numerical, "cross-sectional covariance is singular");
  const MatrixXd m_inverse = llt.solve(MatrixXd::Identity(n, n));

  const MatrixXd lagged = lagged_partial_sums(dY);
  const MatrixXd solved_y = shape.solve(dY.transpose());       // T x n
  const MatrixXd solved_lag = shape.solve(lagged.transpose());  // T x n
  const MatrixXd cross = lagged * solved_y;                     // (A y_i)' S^{-1} y_j
  const MatrixXd gram = lagged * solved_lag;                    // (A y_i)' S^{-1} (A y_j)
  const double s = scale(nu);
  return {m_inverse.cwiseProduct(cross).sum() / s, m_inverse.cwiseProduct(gram).sum() / (s * s)};
}

MatrixXd psi_epsilon_inverse_smw(const OracleNuisance& nu) {
  const VectorXd inv = diagonal_lrv(nu).cwiseInverse();
  const Index K = nu.factors();
  MatrixXd out = inv.asDiagonal();
  if (K == 0) return out;
  const MatrixXd weighted = inv.asDiagonal() * nu.loadings;  // Omega^{-1} Lambda
  MatrixXd inner = nu.loadings.transpose() * weighted;
  for (Index k = 0; k < K; ++k) inner(k, k) += 1.0 / nu.lrv_f[static_cast<std::size_t>(k)];
  Eigen::LLT<MatrixXd> llt(inner);
  require(llt.info() == Eigen::Success, ErrorKind::Numerical, "Woodbury inner matrix is singular");
  out -= weighted * llt.solve(weighted.transpose());
  return out;
}

MatrixXd psi_epsilon_inverse_direct(const OracleNuisance& nu) {
  MatrixXd psi = diagonal_lrv(nu).asDiagonal();
  for (Index k = 0; k < nu.factors(); ++k)
    psi += nu.lrv_f[static_cast<std::size_t>(k)] * nu.loadings.col(k) * nu.loadings.col(k).transpose();
  Eigen::FullPivLU<MatrixXd> lu(psi);
  require(lu.isInvertible(), ErrorKind::Numerical, "Psi_eps is singular");
  return lu.inverse();
}

MatrixXd projection_precision(const std::vector<double>& lrv, const MatrixXd& loadings) {
  const Index n = static_cast<Index>(lrv.size());
  require(loadings.rows() == n, ErrorKind::Dimension, "loadings must have n rows");
  VectorXd inv(n);
  for (Index i = 0; i < n; ++i) {
    require(lrv[static_cast<std::size_t>(i)] > 0.0, ErrorKind::Numerical, "long-run variance is zero");
    inv(i) = 1.0 / lrv[static_cast<std::size_t>(i)];
  }
  MatrixXd out = inv.asDiagonal();
  if (loadings.cols() == 0) return out;
  const MatrixXd weighted = inv.asDiagonal() * loadings;
  Eigen::FullPivLU<MatrixXd> lu(loadings.transpose() * weighted);
  require(lu.isInvertible(), ErrorKind::Numerical, "projection inner matrix is singular");
  out -= weighted * lu.solve(weighted.transpose());
  return out;
}

double delta_mp_tilde(const MatrixXd& dY, const OracleNuisance& nu) {
  check_shape(dY, nu);
  return kron_identity_form(dY, psi_epsilon_inverse_smw(nu), nu);
}

double delta_star(const MatrixXd& dY, const OracleNuisance& nu) {
  check_shape(dY, nu);
  return kron_identity_form(dY, projection_precision(nu.lrv_eta, nu.loadings), nu);
}

std::vector<LanReportRow> lan_convergence_report(const LanReportConfig& config) {
  std::vector<LanReportRow> rows;
  if (config.seeds <= 0) return rows;

  enum Stat { Panic, Simple, Mp, MpTilde, Star, JPanic, JMp, kStats };
  static const char* kNames[kStats] = {"delta_panic", "delta", "delta_mp", "delta_mp_tilde",
                                       "delta_star", "j_panic", "j_mp"};
  struct Gap {
    const char* name;
    Stat a, b;
  };
  static const Gap kGaps[] = {{"panic_vs_delta", Panic, Simple},
                              {"mp_vs_mp_tilde", Mp, MpTilde},
                              {"mp_tilde_vs_star", MpTilde, Star},
                              {"star_vs_delta", Star, Simple}};

  for (std::size_t size_index = 0; size_index < config.sizes.size(); ++size_index) {
    const auto [n, T] = config.sizes[size_index];
    const auto seeds = static_cast<std::size_t>(config.seeds);
    std::vector<std::array<double, kStats>> values(seeds);

    parallel_for(seeds, config.workers, [&](std::size_t r) {
      DgpConfig dgp;
      dgp.framework = Framework::Panic;
      dgp.n = n;
      dgp.T = T;
      dgp.h = 0.0;
      dgp.K = config.K;
      dgp.factor_spec = {InnovationKind::Ma1, config.theta, Distribution::Gaussian, 1.0};
      dgp.idio_spec = {InnovationKind::Ma1, config.theta, Distribution::Gaussian, 1.0};
      dgp.lrv_ratio = config.lrv_ratio;
      dgp.seed = mix64(config.base_seed ^ mix64(size_index * 0x100000001ULL + r));
      const SimulatedPanel sim = simulate(dgp);

      std::vector<Covariance> sigma_eta;
      for (double w : sim.true_lrvs) {
        InnovationSpec spec = dgp.idio_spec;
        spec.target_lrv = w;
        sigma_eta.push_back(Covariance::of(spec, T));
      }
      std::vector<Covariance> sigma_f(static_cast<std::size_t>(config.K), Covariance::of(dgp.factor_spec, T));
      const OracleNuisance nu = OracleNuisance::make(std::move(sigma_eta), std::move(sigma_f), sim.true_loadings);

      const MatrixXd dE = full_differences(sim.idiosyncratic);
      const MatrixXd dY = full_differences(sim.panel.values());
      const CentralSequence panic = delta_panic_exact(dE, nu);
      const CentralSequence mp = delta_mp_common_shape(dY, nu);
      auto& v = values[r];
      v[Panic] = panic.delta;
      v[Simple] = delta_simplified(dE, nu);
      v[Mp] = mp.delta;
      v[MpTilde] = delta_mp_tilde(dY, nu);
      v[Star] = delta_star(dY, nu);
      v[JPanic] = panic.information;
      v[JMp] = mp.information;
    });

    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (int s = 0; s < kStats; ++s) {
      std::vector<double> column;
      for (const auto& v : values) column.push_back(v[static_cast<std::size_t>(s)]);
      const Moments m = moments(column);
      rows.push_back({n, T, kNames[s], nan, m.mean, m.variance, m.skew, m.kurtosis, config.seeds});
    }
    for (const auto& gap : kGaps) {
      std::vector<double> diff, abs_diff;
      for (const auto& v : values) {
        diff.push_back(v[gap.a] - v[gap.b]);
        abs_diff.push_back(std::abs(diff.back()));
      }
      const Moments m = moments(diff);
      rows.push_back({n, T, gap.name, median(abs_diff), m.mean, m.variance, m.skew, m.kurtosis, config.seeds});
    }
  }
  return rows;
}

void write_lan_report_csv(std::ostream& out, const std::vector<LanReportRow>& rows) {
  out << "n,T,quantity,median_abs_diff,mean,variance,skew,kurtosis,seeds\n";
  auto field = [&](double x) -> std::ostream& {
    if (std::isnan(x)) return out << "NA";
    return out << x;
  };
  const auto precision = out.precision(10);
  for (const auto& r : rows) {
    out << r.n << ',' << r.T << ',' << r.quantity << ',';
    field(r.median_abs_diff) << ',';
    field(r.mean) << ',';
    field(r.variance) << ',';
    field(r.skew) << ',';
    field(r.kurtosis) << ',' << r.seeds << '\n';
  }
  out.precision(precision);
}

}  // namespace panelur::lan
