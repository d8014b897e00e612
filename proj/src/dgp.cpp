#include "panelur/dgp.hpp"

#include "panelur/error.hpp"

#include <cmath>

namespace panelur {

namespace {

// Sub-stream identifiers; the draw order is fixed so that every framework and
// every value of h consumes identical random numbers.
enum Stream : std::uint64_t {
  kLoadings = 1,
  kLongRunVariances = 2,
  kAlternatives = 3,
  kFactorInnovations = 4,
  kIdiosyncraticInnovations = 5,
};

double draw_noise(Distribution distribution, std::mt19937_64& rng) {
  if (distribution == Distribution::Gaussian) {
    std::normal_distribution<double> normal;
    return normal(rng);
  }
  // t(5) has variance 5/3; rescale to unit variance.
  std::student_t_distribution<double> student(5.0);
  return student(rng) * std::sqrt(3.0 / 5.0);
}

}  // namespace

std::string to_string(Framework f) { return f == Framework::MoonPerron ? "MP" : "PANIC"; }

std::string to_string(InnovationKind k) {
  switch (k) {
    case InnovationKind::Iid: return "iid";
    case InnovationKind::Ar1: return "ar1";
    case InnovationKind::Ma1: return "ma1";
  }
  return "iid";
}

std::string to_string(Distribution d) {
  return d == Distribution::Gaussian ? "gaussian" : "student_t5";
}

Framework parse_framework(const std::string& s) {
  if (s == "MP" || s == "mp") return Framework::MoonPerron;
  if (s == "PANIC" || s == "panic") return Framework::Panic;
  fail(ErrorKind::Config, "unknown framework '" + s + "' (expected MP or PANIC)");
}

InnovationKind parse_innovation_kind(const std::string& s) {
  if (s == "iid") return InnovationKind::Iid;
  if (s == "ar1") return InnovationKind::Ar1;
  if (s == "ma1") return InnovationKind::Ma1;
  fail(ErrorKind::Config, "unknown innovation kind '" + s + "' (expected iid, ar1 or ma1)");
}

Distribution parse_distribution(const std::string& s) {
  if (s == "gaussian") return Distribution::Gaussian;
  if (s == "student_t5") return Distribution::StudentT5;
  fail(ErrorKind::Config, "unknown distribution '" + s + "' (expected gaussian or student_t5)");
}

void InnovationSpec::validate() const {
  if (kind != InnovationKind::Iid) {
    require(parameter > -1.0 && parameter < 1.0, ErrorKind::Config,
            "innovation parameter must lie in (-1, 1)");
  }
  require(target_lrv > 0.0 && std::isfinite(target_lrv), ErrorKind::Config,
          "target long-run variance must be positive");
}

void DgpConfig::validate() const {
  require(n >= 1, ErrorKind::Config, "n must be at least 1");
  require(T >= 2, ErrorKind::Config, "T must be at least 2");
  require(K >= 0, ErrorKind::Config, "K must be nonnegative");
  require(h <= 0.0 && std::isfinite(h), ErrorKind::Config, "h must be nonpositive");
  require(lrv_ratio > 0.0 && lrv_ratio <= 1.0, ErrorKind::Config, "lrv_ratio must lie in (0, 1]");
  require(!(panic_stationary_factors && framework != Framework::Panic), ErrorKind::Config,
          "panic_stationary_factors requires the PANIC framework");
  factor_spec.validate();
  idio_spec.validate();
}

double local_rho(Index n, Index T, double h) {
  return 1.0 + h / (std::sqrt(static_cast<double>(n)) * static_cast<double>(T));
}

std::pair<double, double> lognormal_heterogeneity_params(double ratio) {
  require(ratio > 0.0 && ratio <= 1.0, ErrorKind::Domain, "variance ratio must lie in (0, 1]");
  const double mu = std::log(ratio);
  return {mu, -2.0 * mu};
}

double innovation_scale(const InnovationSpec& spec) {
  const double root = std::sqrt(spec.target_lrv);
  switch (spec.kind) {
    case InnovationKind::Iid: return root;
    case InnovationKind::Ar1: return root * (1.0 - spec.parameter);
    case InnovationKind::Ma1: return root / (1.0 + spec.parameter);
  }
  return root;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(mix64(seed) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

std::vector<double> draw_innovations(const InnovationSpec& spec, Index T, std::mt19937_64& rng) {
  const double sigma = innovation_scale(spec);
  std::vector<double> x(static_cast<std::size_t>(T));
  switch (spec.kind) {
    case InnovationKind::Iid:
      for (auto& v : x) v = sigma * draw_noise(spec.distribution, rng);
      break;
    case InnovationKind::Ar1: {
      const double phi = spec.parameter;
      // Start in the stationary law so no burn-in is needed.
      double prev = sigma * draw_noise(spec.distribution, rng) / std::sqrt(1.0 - phi * phi);
      for (auto& v : x) {
        prev = phi * prev + sigma * draw_noise(spec.distribution, rng);
        v = prev;
      }
      break;
    }
    case InnovationKind::Ma1: {
      const double theta = spec.parameter;
      double lagged = draw_noise(spec.distribution, rng);  // one pre-sample shock
      for (auto& v : x) {
        const double e = draw_noise(spec.distribution, rng);
        v = sigma * (e + theta * lagged);
        lagged = e;
      }
      break;
    }
  }
  return x;
}

SimulatedPanel simulate(const DgpConfig& config) {
  config.validate();
  const Index n = config.n;
  const Index T = config.T;
  const Index K = config.K;

  MatrixXd loadings(n, K);
  {
    std::mt19937_64 rng(substream_seed(config.seed, kLoadings));
    std::normal_distribution<double> normal;
    const double mean = K > 0 ? 1.0 / std::sqrt(static_cast<double>(K)) : 0.0;
    const double sd = mean;
    for (Index i = 0; i < n; ++i)
      for (Index k = 0; k < K; ++k) loadings(i, k) = mean + sd * normal(rng);
  }

  std::vector<double> lrvs(static_cast<std::size_t>(n), 1.0);
  {
    const auto [mu, sigma2] = lognormal_heterogeneity_params(config.lrv_ratio);
    std::mt19937_64 rng(substream_seed(config.seed, kLongRunVariances));
    std::normal_distribution<double> normal;
    for (auto& w : lrvs) w = std::exp(mu + std::sqrt(sigma2) * normal(rng));
  }

  const double rho = local_rho(n, T, config.h);
  std::vector<double> rhos(static_cast<std::size_t>(n), rho);
  if (config.heterogeneous_alternatives) {
    std::mt19937_64 rng(substream_seed(config.seed, kAlternatives));
    std::uniform_real_distribution<double> uniform(0.2, 1.8);
    for (auto& r : rhos) r = local_rho(n, T, config.h * uniform(rng));
  }

  MatrixXd f(K, T);
  {
    std::mt19937_64 rng(substream_seed(config.seed, kFactorInnovations));
    InnovationSpec spec = config.factor_spec;
    spec.target_lrv = 1.0;
    for (Index k = 0; k < K; ++k) {
      const auto path = draw_innovations(spec, T, rng);
      for (Index t = 0; t < T; ++t) f(k, t) = path[static_cast<std::size_t>(t)];
    }
  }

  MatrixXd eta(n, T);
  {
    std::mt19937_64 rng(substream_seed(config.seed, kIdiosyncraticInnovations));
    InnovationSpec spec = config.idio_spec;
    for (Index i = 0; i < n; ++i) {
      spec.target_lrv = lrvs[static_cast<std::size_t>(i)];
      const auto path = draw_innovations(spec, T, rng);
      for (Index t = 0; t < T; ++t) eta(i, t) = path[static_cast<std::size_t>(t)];
    }
  }

  MatrixXd E(n, T);
  for (Index i = 0; i < n; ++i) {
    const double r = rhos[static_cast<std::size_t>(i)];
    double prev = 0.0;
    for (Index t = 0; t < T; ++t) {
      prev = r * prev + eta(i, t);
      E(i, t) = prev;
    }
  }

  MatrixXd F(K, T);
  const bool stationary = config.framework == Framework::Panic && config.panic_stationary_factors;
  const double factor_rho = config.framework == Framework::Panic ? 1.0 : rho;
  for (Index k = 0; k < K; ++k) {
    double prev = 0.0;
    for (Index t = 0; t < T; ++t) {
      prev = stationary ? f(k, t) : factor_rho * prev + f(k, t);
      F(k, t) = prev;
    }
  }

  MatrixXd Z(n, T);
  if (config.framework == Framework::MoonPerron && config.heterogeneous_alternatives) {
    // Unit-specific roots act on the whole error eps = Lambda f + eta.
    const MatrixXd eps = loadings * f + eta;
    for (Index i = 0; i < n; ++i) {
      const double r = rhos[static_cast<std::size_t>(i)];
      double prev = 0.0;
      for (Index t = 0; t < T; ++t) {
        prev = r * prev + eps(i, t);
        Z(i, t) = prev;
      }
    }
  } else {
    Z = E;
    for (Index k = 0; k < K; ++k) Z += loadings.col(k) * F.row(k);
  }

  return SimulatedPanel{Panel(std::move(Z)), std::move(loadings), std::move(lrvs), std::move(rhos),
                        std::move(E), std::move(F)};
}

}  // namespace panelur
