#pragma once

#include "panelur/dgp.hpp"
#include "panelur/lrv.hpp"
#include "panelur/unit_root_tests.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace panelur::mc {

/// A grid of data-generating processes plus the testing configuration applied
/// to every simulated panel.
struct Experiment {
  std::vector<Framework> frameworks{Framework::Panic};
  std::vector<Index> n_values{50};
  std::vector<Index> T_values{100};
  std::vector<double> ratios{1.0};
  std::vector<InnovationKind> innovations{InnovationKind::Iid};
  std::vector<Distribution> distributions{Distribution::Gaussian};
  std::vector<double> h_values{0.0};
  double innovation_parameter = 0.4;
  Index K = 1;
  bool heterogeneous_alternatives = false;
  bool panic_stationary_factors = false;

  LrvConfig lrv;
  std::vector<TestName> tests{std::begin(kAllTests), std::end(kAllTests)};
  double alpha = 0.05;
  Index replications = 1000;
  std::uint64_t base_seed = 1;
  bool k_known = true;
  Index k_max = 8;

  void validate() const;

  /// Reads a JSON object; absent fields keep their defaults, unknown fields and
  /// ill-typed values raise a Config error naming the field.
  static Experiment from_json(const std::string& text);
  static Experiment load(const std::string& path);
};

/// Coordinates of one grid cell.
struct Cell {
  Framework framework = Framework::Panic;
  Index n = 0;
  Index T = 0;
  double ratio = 1.0;
  InnovationKind innovation = InnovationKind::Iid;
  Distribution distribution = Distribution::Gaussian;
  double h = 0.0;
  std::size_t data_key = 0;  ///< shared by cells that differ only in framework and h
};

/// Cells in row-major order over framework, n, T, ratio, innovation, distribution, h.
std::vector<Cell> enumerate_cells(const Experiment& exp);

/// Seed of replication r of a cell. Cells with the same data key share seeds, so
/// frameworks and local alternatives are compared on common random numbers.
std::uint64_t replication_seed(std::uint64_t base_seed, std::size_t data_key, Index replication);

/// Statistics of every replication of a cell; failed replications hold NaN.
struct CellStatistics {
  Cell cell;
  std::vector<TestName> tests;
  std::vector<std::vector<double>> statistics;  ///< [test][replication]
  Index errors = 0;
};

struct ResultRow {
  Cell cell;
  TestName test = TestName::TUmp;
  double rejection_rate = 0.0;
  double mc_std_err = 0.0;  ///< sqrt(r (1 - r) / R)
  Index replications = 0;   ///< successful replications
  Index errors = 0;
};

std::vector<CellStatistics> run_detailed(const Experiment& exp, std::size_t workers);
std::vector<ResultRow> summarize(const Experiment& exp, const std::vector<CellStatistics>& cells);
std::vector<ResultRow> run(const Experiment& exp, std::size_t workers);

void write_results_csv(std::ostream& out, const Experiment& exp, const std::vector<ResultRow>& rows);

/// Power against |h| for one test in one cell family, with the analytic curves.
struct PowerRow {
  Cell cell;
  TestName test = TestName::TUmp;
  double h_abs = 0.0;
  double power = 0.0;           ///< rejection rate at the nominal critical value
  double adjusted_power = 0.0;  ///< rejection rate at the empirical alpha-quantile under h = 0
  double mc_std_err = 0.0;
  double envelope = 0.0;
  double asymptote = 0.0;       ///< pooled-test local power at the cell's ratio
  Index replications = 0;
};

/// Requires h = 0 in the grid; every cell is paired with its h = 0 sibling.
std::vector<PowerRow> power_figure_data(const Experiment& exp, const std::vector<CellStatistics>& cells);
std::vector<PowerRow> power_figure_data(const Experiment& exp, std::size_t workers);

void write_power_csv(std::ostream& out, const std::vector<PowerRow>& rows);

}  // namespace panelur::mc
