#pragma once

#include <span>
#include <string>
#include <vector>

namespace panelur {

enum class ArmaModel { WhiteNoise, Ar1, Ma1, Arma11 };

std::string to_string(ArmaModel m);

/// Low-order ARMA filter used to whiten a series before kernel smoothing.
struct ArmaFit {
  ArmaModel model = ArmaModel::WhiteNoise;
  double ar = 0.0;
  double ma = 0.0;
  double sigma2 = 0.0;  ///< mean squared filter residual
  double bic = 0.0;     ///< T log(sigma2) + p log(T)
  std::vector<double> residuals;

  /// psi(1) = (1 + ma) / (1 - ar): the filter gain at frequency zero.
  double recoloring_gain() const { return (1.0 + ma) / (1.0 - ar); }
};

/// Residuals of e_t = s_t - ar s_{t-1} - ma e_{t-1} with zero pre-sample values.
std::vector<double> arma_filter(std::span<const double> s, double ar, double ma);

/// Fits one model. AR(1) uses least squares; MA(1) and ARMA(1,1) use the
/// Hannan-Rissanen two-step regression on long-autoregression residuals.
/// Returns false when the estimate is explosive or non-invertible.
bool fit_arma(std::span<const double> s, ArmaModel model, ArmaFit& out);

/// Fits all four candidates and keeps the smallest BIC. White noise is always admissible.
ArmaFit select_prewhitening_model(std::span<const double> s);

}  // namespace panelur
