#include "panelur/prewhiten.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace panelur {

namespace {

// Roots closer to the unit circle than this are treated as explosive or non-invertible.
constexpr double kMaxRoot = 0.97;

std::size_t long_ar_order(std::size_t T) {
  const auto by_length = T / 4;
  const auto by_log = static_cast<std::size_t>(std::ceil(2.0 * std::log(static_cast<double>(T))));
  return std::max<std::size_t>(1, std::min(by_length, by_log));
}

// Yule-Walker AR(p) via Levinson-Durbin on uncentered autocovariances.
std::vector<double> yule_walker(std::span<const double> s, std::size_t p) {
  const std::size_t T = s.size();
  std::vector<double> gamma(p + 1, 0.0);
  for (std::size_t m = 0; m <= p; ++m) {
    double acc = 0.0;
    for (std::size_t t = m; t < T; ++t) acc += s[t] * s[t - m];
    gamma[m] = acc / static_cast<double>(T);
  }
  std::vector<double> a(p, 0.0);
  if (gamma[0] <= 0.0) return a;
  std::vector<double> prev(p, 0.0);
  double err = gamma[0];
  for (std::size_t k = 0; k < p; ++k) {
    double acc = gamma[k + 1];
    for (std::size_t j = 0; j < k; ++j) acc -= prev[j] * gamma[k - j];
    const double reflection = acc / err;
    a[k] = reflection;
    for (std::size_t j = 0; j < k; ++j) a[j] = prev[j] - reflection * prev[k - 1 - j];
    err *= (1.0 - reflection * reflection);
    if (err <= 0.0) break;
    std::copy(a.begin(), a.end(), prev.begin());
  }
  return a;
}

std::vector<double> long_ar_residuals(std::span<const double> s, std::size_t p) {
  const auto a = yule_walker(s, p);
  std::vector<double> e(s.size());
  for (std::size_t t = 0; t < s.size(); ++t) {
    double v = s[t];
    for (std::size_t j = 0; j < p && j < t; ++j) v -= a[j] * s[t - 1 - j];
    e[t] = v;
  }
  return e;
}

bool finalize(std::span<const double> s, ArmaModel model, double ar, double ma, int params,
              ArmaFit& out) {
  if (!std::isfinite(ar) || !std::isfinite(ma) || std::abs(ar) >= kMaxRoot ||
      std::abs(ma) >= kMaxRoot)
    return false;
  out.model = model;
  out.ar = ar;
  out.ma = ma;
  out.residuals = arma_filter(s, ar, ma);
  double ss = 0.0;
  for (double e : out.residuals) ss += e * e;
  const double T = static_cast<double>(s.size());
  out.sigma2 = ss / T;
  const double floor = std::numeric_limits<double>::min();
  out.bic = T * std::log(std::max(out.sigma2, floor)) + params * std::log(T);
  return true;
}

}  // namespace

std::string to_string(ArmaModel m) {
  switch (m) {
    case ArmaModel::WhiteNoise: return "white_noise";
    case ArmaModel::Ar1: return "ar1";
    case ArmaModel::Ma1: return "ma1";
    case ArmaModel::Arma11: return "arma11";
  }
  return "white_noise";
}

std::vector<double> arma_filter(std::span<const double> s, double ar, double ma) {
  std::vector<double> e(s.size());
  double prev_s = 0.0;
  double prev_e = 0.0;
  for (std::size_t t = 0; t < s.size(); ++t) {
    e[t] = s[t] - ar * prev_s - ma * prev_e;
    prev_s = s[t];
    prev_e = e[t];
  }
  return e;
}

bool fit_arma(std::span<const double> s, ArmaModel model, ArmaFit& out) {
  const std::size_t T = s.size();
  if (model == ArmaModel::WhiteNoise) return finalize(s, model, 0.0, 0.0, 0, out);
  if (T < 4) return false;

  if (model == ArmaModel::Ar1) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t t = 1; t < T; ++t) {
      num += s[t] * s[t - 1];
      den += s[t - 1] * s[t - 1];
    }
    if (den <= 0.0) return false;
    return finalize(s, model, num / den, 0.0, 1, out);
  }

  const std::size_t p = long_ar_order(T);
  const auto e = long_ar_residuals(s, p);
  // Regress s_t on (s_{t-1}, e_{t-1}) over periods where e_{t-1} uses a full lag window.
  double sxx = 0.0, sxe = 0.0, see = 0.0, sys = 0.0, sye = 0.0;
  for (std::size_t t = p + 1; t < T; ++t) {
    sxx += s[t - 1] * s[t - 1];
    sxe += s[t - 1] * e[t - 1];
    see += e[t - 1] * e[t - 1];
    sys += s[t] * s[t - 1];
    sye += s[t] * e[t - 1];
  }
  if (model == ArmaModel::Ma1) {
    if (see <= 0.0) return false;
    return finalize(s, model, 0.0, sye / see, 1, out);
  }
  const double det = sxx * see - sxe * sxe;
  if (!(det > 1e-12 * sxx * see)) return false;
  const double ar = (see * sys - sxe * sye) / det;
  const double ma = (sxx * sye - sxe * sys) / det;
  return finalize(s, model, ar, ma, 2, out);
}

ArmaFit select_prewhitening_model(std::span<const double> s) {
  ArmaFit best;
  fit_arma(s, ArmaModel::WhiteNoise, best);
  for (auto model : {ArmaModel::Ar1, ArmaModel::Ma1, ArmaModel::Arma11}) {
    ArmaFit candidate;
    if (fit_arma(s, model, candidate) && candidate.bic < best.bic) best = std::move(candidate);
  }
  return best;
}

}  // namespace panelur
