#pragma once

#include "panelur/panel.hpp"

#include <span>
#include <string>
#include <vector>

namespace panelur {

enum class Kernel { Bartlett, QuadraticSpectral };
enum class BandwidthRule { Andrews, NeweyWest, Fixed };

struct LrvConfig {
  Kernel kernel = Kernel::Bartlett;
  BandwidthRule bandwidth = BandwidthRule::Andrews;
  double fixed_bandwidth = 1.0;  ///< used when bandwidth == Fixed; must be >= 1
  bool prewhiten = true;

  void validate() const;
};

std::string to_string(Kernel k);
std::string to_string(const LrvConfig& cfg);  ///< bandwidth label, e.g. "andrews" or "fixed=4"
Kernel parse_kernel(const std::string& s);
/// Accepts "andrews", "newey-west" / "newey_west" and "fixed=B".
void parse_bandwidth(const std::string& s, LrvConfig& cfg);

/// Long-run variance estimates for one series.
struct UnitLrv {
  double omega2 = 0.0;  ///< long-run variance, floored at 1e-8
  double delta = 0.0;   ///< one-sided long-run variance (omega2 - gamma0) / 2
  double gamma0 = 0.0;  ///< variance of the original series
  double bandwidth = 0.0;
};

struct LrvSet {
  std::vector<double> omega2;
  std::vector<double> delta;
  std::vector<double> gamma0;
  double pooled_omega2 = 0.0;  ///< mean of omega2
  double pooled_phi4 = 0.0;    ///< mean of omega2^2
  double pooled_delta = 0.0;   ///< mean of delta

  /// Builds the set and its pooled aggregates from per-unit values.
  static LrvSet from_units(std::vector<double> omega2, std::vector<double> delta,
                           std::vector<double> gamma0);
  std::size_t size() const { return omega2.size(); }
};

/// gamma(m) = (1/T) sum_t s_t s_{t+m}, m = 0..max_lag, without demeaning.
std::vector<double> autocovariances(std::span<const double> s, std::size_t max_lag);

/// Kernel weight k(x) for x >= 0.
double kernel_weight(Kernel kernel, double x);

/// Andrews (1991) AR(1) plug-in bandwidth for the given kernel.
double andrews_bandwidth(std::span<const double> s, Kernel kernel);

/// Deterministic Newey-West truncation floor(4 (T/100)^(2/9)).
double newey_west_bandwidth(std::size_t T);

/// Sum_{|m| <= B} k(m/B) gamma(m); the quadratic-spectral kernel uses every lag.
double kernel_sum(std::span<const double> s, Kernel kernel, double bandwidth);

UnitLrv kernel_lrv(std::span<const double> s, const LrvConfig& cfg);

/// Per-unit estimation over the rows of a residual panel.
LrvSet estimate_lrv_set(const DiffPanel& residuals, const LrvConfig& cfg);

}  // namespace panelur
