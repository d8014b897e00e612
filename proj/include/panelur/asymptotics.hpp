#pragma once

#include <vector>

namespace panelur {

/// Limiting Fisher information of the common central sequence.
inline constexpr double kFisherInformation = 0.5;

/// Standard normal CDF.
double normal_cdf(double x);

/// Standard normal quantile; p must lie in (0, 1).
double normal_quantile(double p);

/// Largest attainable local power of a level-alpha test at |h|:
/// Phi(Phi^{-1}(alpha) + |h| / sqrt(2)).
double power_envelope(double alpha, double h_abs);

/// Local power of the pooled Bai-Ng / Moon-Perron tests, which lose efficiency
/// when long-run variances are heterogeneous. ratio = sqrt(omega^4 / phi^4).
double local_power_mp_bn(double alpha, double h_abs, double ratio);

struct PowerCurve {
  double alpha = 0.05;
  double ratio = 1.0;
  std::vector<double> h_grid;
  std::vector<double> envelope;
  std::vector<double> local_power;
};

/// Both analytic curves on a sorted, nonnegative |h| grid.
PowerCurve emit_power_curve(double alpha, const std::vector<double>& h_grid, double ratio);

}  // namespace panelur
