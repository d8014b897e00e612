#include "panelur/lrv.hpp"

#include "panelur/error.hpp"
#include "panelur/prewhiten.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace panelur {

namespace {

constexpr double kOmegaFloor = 1e-8;
constexpr double kAndrewsRhoClamp = 0.97;
constexpr std::size_t kMinLength = 8;

double lag_one_coefficient(std::span<const double> s) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t t = 1; t < s.size(); ++t) {
    num += s[t] * s[t - 1];
    den += s[t - 1] * s[t - 1];
  }
  if (den <= 0.0) return 0.0;
  return std::clamp(num / den, -kAndrewsRhoClamp, kAndrewsRhoClamp);
}

double choose_bandwidth(std::span<const double> s, const LrvConfig& cfg) {
  switch (cfg.bandwidth) {
    case BandwidthRule::Andrews: return andrews_bandwidth(s, cfg.kernel);
    case BandwidthRule::NeweyWest: return newey_west_bandwidth(s.size());
    case BandwidthRule::Fixed: return cfg.fixed_bandwidth;
  }
  return cfg.fixed_bandwidth;
}

}  // namespace

void LrvConfig::validate() const {
  if (bandwidth == BandwidthRule::Fixed) {
    require(fixed_bandwidth >= 1.0 && std::isfinite(fixed_bandwidth), ErrorKind::Config,
            "fixed bandwidth must be at least 1");
  }
}

std::string to_string(Kernel k) {
  return k == Kernel::Bartlett ? "bartlett" : "quadratic_spectral";
}

std::string to_string(const LrvConfig& cfg) {
  switch (cfg.bandwidth) {
    case BandwidthRule::Andrews: return "andrews";
    case BandwidthRule::NeweyWest: return "newey-west";
    case BandwidthRule::Fixed: {
      std::string value = std::to_string(cfg.fixed_bandwidth);
      value.erase(value.find_last_not_of('0') + 1);
      if (!value.empty() && value.back() == '.') value.pop_back();
      return "fixed=" + value;
    }
  }
  return "andrews";
}

Kernel parse_kernel(const std::string& s) {
  if (s == "bartlett") return Kernel::Bartlett;
  if (s == "quadratic_spectral" || s == "qs" || s == "quadratic-spectral")
    return Kernel::QuadraticSpectral;
  fail(ErrorKind::Config, "unknown kernel '" + s + "' (expected bartlett or quadratic_spectral)");
}

void parse_bandwidth(const std::string& s, LrvConfig& cfg) {
  if (s == "andrews") {
    cfg.bandwidth = BandwidthRule::Andrews;
  } else if (s == "newey-west" || s == "newey_west") {
    cfg.bandwidth = BandwidthRule::NeweyWest;
  } else if (s.rfind("fixed=", 0) == 0) {
    cfg.bandwidth = BandwidthRule::Fixed;
    try {
      std::size_t used = 0;
      cfg.fixed_bandwidth = std::stod(s.substr(6), &used);
      require(used == s.size() - 6, ErrorKind::Config, "trailing characters");
    } catch (const std::exception&) {
      fail(ErrorKind::Config, "bad fixed bandwidth in '" + s + "'");
    }
  } else {
    fail(ErrorKind::Config,
         "unknown bandwidth rule '" + s + "' (expected andrews, newey-west or fixed=B)");
  }
  cfg.validate();
}

LrvSet LrvSet::from_units(std::vector<double> omega2, std::vector<double> delta,
                          std::vector<double> gamma0) {
  require(!omega2.empty() && omega2.size() == delta.size() && omega2.size() == gamma0.size(),
          ErrorKind::Dimension, "long-run variance vectors must be non-empty and equally long");
  LrvSet set;
  const double n = static_cast<double>(omega2.size());
  for (std::size_t i = 0; i < omega2.size(); ++i) {
    require(omega2[i] > 0.0, ErrorKind::Numerical, "long-run variances must be positive");
    set.pooled_omega2 += omega2[i];
    set.pooled_phi4 += omega2[i] * omega2[i];
    set.pooled_delta += delta[i];
  }
  set.pooled_omega2 /= n;
  set.pooled_phi4 /= n;
  set.pooled_delta /= n;
  set.omega2 = std::move(omega2);
  set.delta = std::move(delta);
  set.gamma0 = std::move(gamma0);
  return set;
}

std::vector<double> autocovariances(std::span<const double> s, std::size_t max_lag) {
  require(max_lag < s.size(), ErrorKind::Dimension, "max_lag must be below the series length");
  const double T = static_cast<double>(s.size());
  std::vector<double> gamma(max_lag + 1, 0.0);
  for (std::size_t m = 0; m <= max_lag; ++m) {
    double acc = 0.0;
    for (std::size_t t = 0; t + m < s.size(); ++t) acc += s[t] * s[t + m];
    gamma[m] = acc / T;
  }
  return gamma;
}

double kernel_weight(Kernel kernel, double x) {
  x = std::abs(x);
  if (kernel == Kernel::Bartlett) return x < 1.0 ? 1.0 - x : 0.0;
  if (x == 0.0) return 1.0;
  const double z = 6.0 * std::numbers::pi * x / 5.0;
  return 25.0 / (12.0 * std::numbers::pi * std::numbers::pi * x * x) *
         (std::sin(z) / z - std::cos(z));
}

double andrews_bandwidth(std::span<const double> s, Kernel kernel) {
  const double rho = lag_one_coefficient(s);
  const double T = static_cast<double>(s.size());
  if (kernel == Kernel::Bartlett) {
    const double alpha1 =
        4.0 * rho * rho / (std::pow(1.0 - rho, 2) * std::pow(1.0 + rho, 2));
    return 1.1447 * std::cbrt(alpha1 * T);
  }
  const double alpha2 = 4.0 * rho * rho / std::pow(1.0 - rho, 4);
  return 1.3221 * std::pow(alpha2 * T, 0.2);
}

double newey_west_bandwidth(std::size_t T) {
  return std::floor(4.0 * std::pow(static_cast<double>(T) / 100.0, 2.0 / 9.0));
}

double kernel_sum(std::span<const double> s, Kernel kernel, double bandwidth) {
  const std::size_t T = s.size();
  std::size_t max_lag = 0;
  if (bandwidth > 0.0) {
    max_lag = kernel == Kernel::Bartlett
                  ? static_cast<std::size_t>(std::floor(bandwidth))
                  : T - 1;
  }
  max_lag = std::min(max_lag, T - 1);
  const auto gamma = autocovariances(s, max_lag);
  double total = gamma[0];
  for (std::size_t m = 1; m <= max_lag; ++m)
    total += 2.0 * kernel_weight(kernel, static_cast<double>(m) / bandwidth) * gamma[m];
  return total;
}

UnitLrv kernel_lrv(std::span<const double> s, const LrvConfig& cfg) {
  require(s.size() >= kMinLength, ErrorKind::Data,
          "long-run variance estimation needs at least 8 observations");
  double gain = 1.0;
  std::vector<double> filtered;
  std::span<const double> work = s;
  if (cfg.prewhiten) {
    ArmaFit fit = select_prewhitening_model(s);
    gain = fit.recoloring_gain();
    filtered = std::move(fit.residuals);
    work = filtered;
  }
  UnitLrv out;
  out.bandwidth = choose_bandwidth(work, cfg);
  const double raw = kernel_sum(work, cfg.kernel, out.bandwidth);
  out.omega2 = std::max(gain * gain * raw, kOmegaFloor);
  out.gamma0 = autocovariances(s, 0)[0];
  out.delta = 0.5 * (out.omega2 - out.gamma0);
  return out;
}

LrvSet estimate_lrv_set(const DiffPanel& residuals, const LrvConfig& cfg) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(residuals.units());
  std::vector<double> omega2(n), delta(n), gamma0(n);
  std::vector<double> row(static_cast<std::size_t>(residuals.periods()));
  for (std::size_t i = 0; i < n; ++i) {
    for (Index t = 0; t < residuals.periods(); ++t)
      row[static_cast<std::size_t>(t)] = residuals(static_cast<Index>(i), t);
    const UnitLrv unit = kernel_lrv(row, cfg);
    omega2[i] = unit.omega2;
    delta[i] = unit.delta;
    gamma0[i] = unit.gamma0;
  }
  return LrvSet::from_units(std::move(omega2), std::move(delta), std::move(gamma0));
}

}  // namespace panelur
