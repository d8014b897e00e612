#pragma once

#include "panelur/factors.hpp"
#include "panelur/lrv.hpp"
#include "panelur/panel.hpp"
#include "panelur/unit_root_tests.hpp"

#include <optional>
#include <vector>

namespace panelur {

struct PipelineOptions {
  std::optional<Index> k;  ///< known number of factors; selected by IC_p2 when empty
  Index k_max = 8;         ///< clipped to min(n, T-1)
  LrvConfig lrv;
  double alpha = 0.05;
  std::vector<TestName> tests{std::begin(kAllTests), std::end(kAllTests)};
};

struct PipelineResult {
  Index k = 0;
  FactorFit fit;
  LrvSet lrvs;
  UmpIntermediates ump;
  std::vector<TestOutcome> outcomes;  ///< in the order of PipelineOptions::tests

  const TestOutcome* find(TestName name) const;
};

/// Difference, choose K, fit principal components, estimate long-run variances
/// from the residuals, and compute the requested statistics.
PipelineResult run_pipeline(const Panel& panel, const PipelineOptions& options);

}  // namespace panelur
