#include "panelur/panel.hpp"

#include "panelur/error.hpp"

#include <cmath>
#include <unordered_set>

namespace panelur {

namespace {

bool all_finite(const MatrixXd& m) { return m.allFinite(); }

std::vector<std::string> default_labels(Index count) {
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(count));
  for (Index k = 1; k <= count; ++k) labels.push_back(std::to_string(k));
  return labels;
}

void require_unique(const std::vector<std::string>& labels, const char* what) {
  std::unordered_set<std::string> seen;
  for (const auto& label : labels) {
    require(seen.insert(label).second, ErrorKind::Data,
            std::string("duplicate ") + what + " label '" + label + "'");
  }
}

Series row_series(const MatrixXd& values, Index i) {
  std::vector<double> row(static_cast<std::size_t>(values.cols()));
  for (Index t = 0; t < values.cols(); ++t) row[static_cast<std::size_t>(t)] = values(i, t);
  return Series(std::move(row));
}

}  // namespace

Series::Series(std::vector<double> data) : data_(std::move(data)) {
  require(!data_.empty(), ErrorKind::Dimension, "series must contain at least one value");
  for (double x : data_) require(std::isfinite(x), ErrorKind::Data, "series contains a non-finite value");
}

Panel::Panel(MatrixXd values)
    : Panel(values, default_labels(values.rows()), default_labels(values.cols())) {}

Panel::Panel(MatrixXd values, std::vector<std::string> unit_ids, std::vector<std::string> time_ids)
    : values_(std::move(values)), unit_ids_(std::move(unit_ids)), time_ids_(std::move(time_ids)) {
  require(values_.rows() >= 1, ErrorKind::Dimension, "panel needs at least one unit");
  require(values_.cols() >= 2, ErrorKind::Dimension, "panel needs at least two periods");
  require(all_finite(values_), ErrorKind::Data, "panel contains a non-finite value");
  require(static_cast<Index>(unit_ids_.size()) == values_.rows(), ErrorKind::Dimension,
          "unit label count does not match panel rows");
  require(static_cast<Index>(time_ids_.size()) == values_.cols(), ErrorKind::Dimension,
          "time label count does not match panel columns");
  require_unique(unit_ids_, "unit");
  require_unique(time_ids_, "time");
}

Series Panel::unit(Index i) const { return row_series(values_, i); }

DiffPanel::DiffPanel(MatrixXd values) : values_(std::move(values)) {
  require(values_.rows() >= 1 && values_.cols() >= 1, ErrorKind::Dimension,
          "difference panel must be non-empty");
  require(all_finite(values_), ErrorKind::Data, "difference panel contains a non-finite value");
}

Series DiffPanel::unit(Index i) const { return row_series(values_, i); }

DiffPanel difference(const Panel& p) {
  const Index T = p.periods();
  return DiffPanel(p.values().rightCols(T - 1) - p.values().leftCols(T - 1));
}

MatrixXd cumsum_matrix(Index T) {
  require(T >= 1, ErrorKind::Dimension, "cumsum matrix needs T >= 1");
  MatrixXd a = MatrixXd::Zero(T, T);
  for (Index s = 1; s < T; ++s) a.row(s).head(s).setOnes();
  return a;
}

MatrixXd lagged_partial_sums(const MatrixXd& rows) {
  MatrixXd out(rows.rows(), rows.cols());
  if (rows.cols() == 0) return out;
  out.col(0).setZero();
  for (Index t = 1; t < rows.cols(); ++t) out.col(t) = out.col(t - 1) + rows.col(t - 1);
  return out;
}

Panel apply_cumsum(const DiffPanel& d) {
  require(d.periods() >= 2, ErrorKind::Dimension,
          "cumulating needs at least two difference columns");
  return Panel(lagged_partial_sums(d.values()));
}

}  // namespace panelur
