#include "panelur/pipeline.hpp"

#include "panelur/error.hpp"

#include <algorithm>

namespace panelur {

const TestOutcome* PipelineResult::find(TestName name) const {
  for (const auto& outcome : outcomes)
    if (outcome.name == name) return &outcome;
  return nullptr;
}

PipelineResult run_pipeline(const Panel& panel, const PipelineOptions& options) {
  const DiffPanel d = difference(panel);
  const Index limit = std::min(d.units(), d.periods());
  Index k = 0;
  if (options.k) {
    k = *options.k;
  } else {
    k = select_num_factors(d, std::clamp<Index>(options.k_max, 0, limit));
  }

  FactorFit fit = estimate_factors(d, k);
  LrvSet lrvs = estimate_lrv_set(fit.residuals, options.lrv);

  auto wants = [&](TestName name) {
    return std::find(options.tests.begin(), options.tests.end(), name) != options.tests.end();
  };

  PipelineResult result{k, std::move(fit), std::move(lrvs), {}, {}};
  std::vector<TestOutcome> computed;
  if (wants(TestName::TUmp) || wants(TestName::TUmpEmp)) {
    const PrecisionMatrix psi = precision_matrix(result.lrvs, result.fit.loadings_hat);
    result.ump = ump_statistics(d, psi, result.lrvs);
    if (wants(TestName::TUmp)) computed.push_back(t_ump(result.ump, options.alpha));
    if (wants(TestName::TUmpEmp)) computed.push_back(t_ump_emp(result.ump, options.alpha));
  }
  if (wants(TestName::Pa) || wants(TestName::Pb)) {
    const auto [pa, pb] = bn_tests(result.fit, result.lrvs, options.alpha);
    computed.push_back(pa);
    computed.push_back(pb);
  }
  if (wants(TestName::Ta) || wants(TestName::Tb)) {
    const auto [ta, tb] = mp_tests(panel, result.fit.loadings_hat, result.lrvs, options.alpha);
    computed.push_back(ta);
    computed.push_back(tb);
  }

  for (TestName name : options.tests) {
    auto it = std::find_if(computed.begin(), computed.end(),
                           [&](const TestOutcome& o) { return o.name == name; });
    require(it != computed.end(), ErrorKind::Config, "test was not computed");
    result.outcomes.push_back(*it);
  }
  return result;
}

}  // namespace panelur
