#pragma once

#include "panelur/dgp.hpp"
#include "panelur/panel.hpp"

#include <memory>

namespace panelur::lan {

enum class CovarianceShape { White, Ma1, Ar1, Dense };

/// T x T covariance matrix of a stationary series.
///
/// White-noise, MA(1) and AR(1) covariances keep their banded structure so that
/// solves cost O(T); arbitrary matrices fall back to a dense Cholesky factor.
class Covariance {
 public:
  static Covariance white(Index T, double variance);
  static Covariance ma1(Index T, double theta, double innovation_variance);
  static Covariance ar1(Index T, double phi, double innovation_variance);
  static Covariance from_matrix(const MatrixXd& sigma);

  /// Covariance of a simulated innovation path with this spec (any distribution).
  static Covariance of(const InnovationSpec& spec, Index T);

  Index size() const { return size_; }
  CovarianceShape shape() const { return shape_; }
  double parameter() const { return parameter_; }
  double innovation_variance() const { return variance_; }

  /// gamma(m) for structured shapes; the dense case reads the first column.
  double autocovariance(Index m) const;

  /// Sigma^{-1} rhs, column by column.
  MatrixXd solve(const MatrixXd& rhs) const;
  MatrixXd dense() const;

  /// 1' Sigma 1 / T.
  double approximate_lrv() const;
  /// tr(A Sigma) / T: the strictly lower triangle summed, over T.
  double approximate_one_sided_lrv() const;

  /// True when both are structured with the same shape and parameter, so that
  /// other = (other.innovation_variance() / innovation_variance()) * this.
  bool proportional_to(const Covariance& other) const;

 private:
  Covariance() = default;

  CovarianceShape shape_ = CovarianceShape::White;
  Index size_ = 0;
  double parameter_ = 0.0;
  double variance_ = 1.0;
  // MA(1): LDL' factor of the tridiagonal matrix.
  VectorXd ldl_diagonal_;
  VectorXd ldl_lower_;
  // Dense case.
  std::shared_ptr<const MatrixXd> matrix_;
  std::shared_ptr<const Eigen::LLT<MatrixXd>> cholesky_;
};

}  // namespace panelur::lan
