#pragma once

#include "panelur/covariance.hpp"
#include "panelur/panel.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace panelur::lan {

/// Known nuisance parameters of the Gaussian model: serial covariances of the
/// idiosyncratic and factor innovations, loadings, and the implied approximate
/// (one-sided) long-run variances.
struct OracleNuisance {
  std::vector<Covariance> sigma_eta;  ///< n covariances, each T x T
  std::vector<Covariance> sigma_f;    ///< K covariances, each T x T
  MatrixXd loadings;                  ///< n x K
  std::vector<double> lrv_eta;        ///< 1' Sigma_eta,i 1 / T
  std::vector<double> oslrv_eta;      ///< tr(A Sigma_eta,i) / T
  std::vector<double> lrv_f;          ///< 1' Sigma_f,k 1 / T

  static OracleNuisance make(std::vector<Covariance> sigma_eta, std::vector<Covariance> sigma_f,
                             MatrixXd loadings);

  Index units() const { return static_cast<Index>(sigma_eta.size()); }
  Index factors() const { return static_cast<Index>(sigma_f.size()); }
  Index periods() const { return sigma_eta.empty() ? 0 : sigma_eta.front().size(); }
};

struct CentralSequence {
  double delta = 0.0;
  double information = 0.0;
};

/// Exact PANIC central sequence and information: Sigma_eta is block diagonal, so
/// the quadratic forms are summed unit by unit.
CentralSequence delta_panic_exact(const MatrixXd& dE, const OracleNuisance& nu);

/// PANIC central sequence with Sigma_eta,i replaced by omega^2_i I and the
/// one-sided correction subtracted.
double delta_simplified(const MatrixXd& dE, const OracleNuisance& nu);

/// Exact MP central sequence built from the dense nT x nT covariance of eps.
/// Refuses problems with nT > 4000.
CentralSequence delta_mp_exact(const MatrixXd& dY, const OracleNuisance& nu);

/// True when every factor and idiosyncratic covariance is a multiple of one
/// structured shape, so Sigma_eps = M kron S.
bool has_common_shape(const OracleNuisance& nu);

/// Exact MP central sequence through Sigma_eps^{-1} = M^{-1} kron S^{-1}; needs has_common_shape.
CentralSequence delta_mp_common_shape(const MatrixXd& dY, const OracleNuisance& nu);

/// MP central sequence with the covariances replaced by long-run variances.
double delta_mp_tilde(const MatrixXd& dY, const OracleNuisance& nu);

/// Central sequence with the factor-projecting precision of Omega_eta and Lambda.
double delta_star(const MatrixXd& dY, const OracleNuisance& nu);

/// (Lambda Omega_F Lambda' + Omega_eta)^{-1} by the Woodbury identity.
MatrixXd psi_epsilon_inverse_smw(const OracleNuisance& nu);
/// The same matrix by a direct LU inversion.
MatrixXd psi_epsilon_inverse_direct(const OracleNuisance& nu);

/// Omega^{-1} - Omega^{-1} L (L' Omega^{-1} L)^{-1} L' Omega^{-1}.
MatrixXd projection_precision(const std::vector<double>& lrv, const MatrixXd& loadings);

struct LanReportConfig {
  std::vector<std::pair<Index, Index>> sizes{{25, 100}, {50, 400}, {100, 1600}};
  Index seeds = 200;
  Index K = 1;
  double theta = 0.4;       ///< MA(1) coefficient of both innovation series
  double lrv_ratio = 0.8;
  std::uint64_t base_seed = 20240101;
  std::size_t workers = 1;
};

struct LanReportRow {
  Index n = 0;
  Index T = 0;
  std::string quantity;
  double median_abs_diff = 0.0;  ///< NaN for rows that describe a single statistic
  double mean = 0.0;
  double variance = 0.0;
  double skew = 0.0;
  double kurtosis = 0.0;
  Index seeds = 0;
};

/// Null simulations of every central sequence variant per size. Rows per size:
/// the statistics delta_panic, delta, delta_mp, delta_mp_tilde, delta_star,
/// j_panic, j_mp, followed by the gaps panic_vs_delta, mp_vs_mp_tilde,
/// mp_tilde_vs_star, star_vs_delta.
std::vector<LanReportRow> lan_convergence_report(const LanReportConfig& config);

void write_lan_report_csv(std::ostream& out, const std::vector<LanReportRow>& rows);

}  // namespace panelur::lan
