#include "panelur/asymptotics.hpp"

#include "panelur/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace panelur {

namespace {

// Acklam's rational approximation, relative error about 1.15e-9 before refinement.
double quantile_initial(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

void check_alpha(double alpha) {
  require(alpha > 0.0 && alpha < 1.0, ErrorKind::Domain, "alpha must lie in (0, 1)");
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  require(p > 0.0 && p < 1.0, ErrorKind::Domain, "normal quantile needs p in (0, 1)");
  double x = quantile_initial(p);
  // Halley steps on Phi(x) - p; two are enough for full double precision.
  for (int step = 0; step < 2; ++step) {
    const double err = normal_cdf(x) - p;
    const double density = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    if (density <= 0.0) break;
    const double u = err / density;
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

double power_envelope(double alpha, double h_abs) {
  check_alpha(alpha);
  require(h_abs >= 0.0, ErrorKind::Domain, "|h| must be nonnegative");
  return normal_cdf(normal_quantile(alpha) + h_abs / std::numbers::sqrt2);
}

double local_power_mp_bn(double alpha, double h_abs, double ratio) {
  check_alpha(alpha);
  require(h_abs >= 0.0, ErrorKind::Domain, "|h| must be nonnegative");
  require(ratio > 0.0 && ratio <= 1.0, ErrorKind::Domain, "variance ratio must lie in (0, 1]");
  return normal_cdf(normal_quantile(alpha) + ratio * h_abs / std::numbers::sqrt2);
}

PowerCurve emit_power_curve(double alpha, const std::vector<double>& h_grid, double ratio) {
  require(std::is_sorted(h_grid.begin(), h_grid.end()), ErrorKind::Domain,
          "|h| grid must be sorted ascending");
  PowerCurve curve;
  curve.alpha = alpha;
  curve.ratio = ratio;
  curve.h_grid = h_grid;
  curve.envelope.reserve(h_grid.size());
  curve.local_power.reserve(h_grid.size());
  for (double h : h_grid) {
    curve.envelope.push_back(power_envelope(alpha, h));
    curve.local_power.push_back(local_power_mp_bn(alpha, h, ratio));
  }
  return curve;
}

}  // namespace panelur
