#pragma once

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace panelur {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// A single time series. Entries are finite and there is at least one.
class Series {
 public:
  explicit Series(std::vector<double> data);

  std::span<const double> data() const { return data_; }
  std::size_t size() const { return data_.size(); }
  double operator[](std::size_t t) const { return data_[t]; }

 private:
  std::vector<double> data_;
};

/// Balanced panel of observations, one row per unit and one column per period.
///
/// Invariants: n >= 1, T >= 2, all entries finite, labels unique.
class Panel {
 public:
  /// Labels default to "1".."n" and "1".."T".
  explicit Panel(MatrixXd values);
  Panel(MatrixXd values, std::vector<std::string> unit_ids, std::vector<std::string> time_ids);

  Index units() const { return values_.rows(); }
  Index periods() const { return values_.cols(); }
  const MatrixXd& values() const { return values_; }
  double operator()(Index i, Index t) const { return values_(i, t); }
  Series unit(Index i) const;

  const std::vector<std::string>& unit_ids() const { return unit_ids_; }
  const std::vector<std::string>& time_ids() const { return time_ids_; }

 private:
  MatrixXd values_;
  std::vector<std::string> unit_ids_;
  std::vector<std::string> time_ids_;
};

/// First differences of a panel: n rows, one column fewer than the source.
class DiffPanel {
 public:
  explicit DiffPanel(MatrixXd values);

  Index units() const { return values_.rows(); }
  Index periods() const { return values_.cols(); }
  const MatrixXd& values() const { return values_; }
  double operator()(Index i, Index t) const { return values_(i, t); }
  Series unit(Index i) const;

 private:
  MatrixXd values_;
};

/// out(i, t) = p(i, t + 1) - p(i, t).
DiffPanel difference(const Panel& p);

/// Strictly lower-triangular ones: A(s, t) = 1 if s > t.
MatrixXd cumsum_matrix(Index T);

/// Lagged partial sums with a zero start: out(i, t) = sum_{s < t} d(i, s).
/// Requires at least two difference columns so the result is a valid Panel.
Panel apply_cumsum(const DiffPanel& d);

/// Lagged partial sums of each row of a raw matrix (no shape checks).
MatrixXd lagged_partial_sums(const MatrixXd& rows);

}  // namespace panelur
