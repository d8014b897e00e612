#pragma once

#include "panelur/panel.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace panelur {

enum class Framework { MoonPerron, Panic };
enum class InnovationKind { Iid, Ar1, Ma1 };
enum class Distribution { Gaussian, StudentT5 };

std::string to_string(Framework f);
std::string to_string(InnovationKind k);
std::string to_string(Distribution d);
Framework parse_framework(const std::string& s);
InnovationKind parse_innovation_kind(const std::string& s);
Distribution parse_distribution(const std::string& s);

/// Law of a stationary innovation series, scaled to hit a target long-run variance.
struct InnovationSpec {
  InnovationKind kind = InnovationKind::Iid;
  double parameter = 0.4;  ///< AR or MA coefficient; ignored for iid
  Distribution distribution = Distribution::Gaussian;
  double target_lrv = 1.0;

  void validate() const;
};

struct DgpConfig {
  Framework framework = Framework::Panic;
  Index n = 25;
  Index T = 25;
  double h = 0.0;  ///< local parameter, rho = 1 + h / (sqrt(n) T); h <= 0
  Index K = 1;
  InnovationSpec factor_spec;  ///< target_lrv is forced to 1
  InnovationSpec idio_spec;    ///< target_lrv is replaced by the per-unit draws
  double lrv_ratio = 1.0;      ///< target sqrt(omega^4 / phi^4), in (0, 1]
  bool heterogeneous_alternatives = false;
  bool panic_stationary_factors = false;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SimulatedPanel {
  Panel panel;                  ///< Z, n x T
  MatrixXd true_loadings;       ///< Lambda, n x K
  std::vector<double> true_lrvs;  ///< omega^2_i of the idiosyncratic innovations
  std::vector<double> rho_used;   ///< autoregressive root per unit
  MatrixXd idiosyncratic;       ///< E, n x T, with E_0 = 0 implied
  MatrixXd factors;             ///< F, K x T, with F_0 = 0 implied
};

/// 1 + h / (sqrt(n) T).
double local_rho(Index n, Index T, double h);

/// (mu, sigma^2) of a mean-one lognormal with sqrt(E[X]^2 / E[X^2]) = ratio.
std::pair<double, double> lognormal_heterogeneity_params(double ratio);

/// Standard deviation of the driving noise so the series has the target long-run variance.
double innovation_scale(const InnovationSpec& spec);

/// Stable 64-bit mixer (splitmix64 finalizer).
std::uint64_t mix64(std::uint64_t x);

/// Seed of an independent sub-stream of a base seed.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream);

/// Stationary innovation path of length T drawn from rng.
std::vector<double> draw_innovations(const InnovationSpec& spec, Index T, std::mt19937_64& rng);

SimulatedPanel simulate(const DgpConfig& config);

}  // namespace panelur
