#include "panelur/covariance.hpp"

#include "panelur/error.hpp"

#include <cmath>

namespace panelur::lan {

Covariance Covariance::white(Index T, double variance) {
  require(T >= 1 && variance > 0.0, ErrorKind::Domain, "white-noise covariance needs T >= 1, variance > 0");
  Covariance c;
  c.shape_ = CovarianceShape::White;
  c.size_ = T;
  c.variance_ = variance;
  return c;
}

Covariance Covariance::ma1(Index T, double theta, double innovation_variance) {
  require(T >= 1 && innovation_variance > 0.0 && std::abs(theta) < 1.0, ErrorKind::Domain,
          "MA(1) covariance needs T >= 1, |theta| < 1, variance > 0");
  Covariance c;
  c.shape_ = CovarianceShape::Ma1;
  c.size_ = T;
  c.parameter_ = theta;
  c.variance_ = innovation_variance;
  const double diag = innovation_variance * (1.0 + theta * theta);
  const double off = innovation_variance * theta;
  c.ldl_diagonal_.resize(T);
  c.ldl_lower_.setZero(T);
  c.ldl_diagonal_(0) = diag;
  for (Index t = 1; t < T; ++t) {
    c.ldl_lower_(t) = off / c.ldl_diagonal_(t - 1);
    c.ldl_diagonal_(t) = diag - c.ldl_lower_(t) * off;
  }
  return c;
}

Covariance Covariance::ar1(Index T, double phi, double innovation_variance) {
  require(T >= 1 && innovation_variance > 0.0 && std::abs(phi) < 1.0, ErrorKind::Domain,
          "AR(1) covariance needs T >= 1, |phi| < 1, variance > 0");
  Covariance c;
  c.shape_ = CovarianceShape::Ar1;
  c.size_ = T;
  c.parameter_ = phi;
  c.variance_ = innovation_variance;
  return c;
}

Covariance Covariance::from_matrix(const MatrixXd& sigma) {
  require(sigma.rows() == sigma.cols() && sigma.rows() >= 1, ErrorKind::Dimension,
          "covariance must be square");
  require((sigma - sigma.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + sigma.cwiseAbs().maxCoeff()),
          ErrorKind::Numerical, "covariance must be symmetric");
  auto llt = std::make_shared<Eigen::LLT<MatrixXd>>(sigma);
  require(llt->info() == Eigen::Success, ErrorKind::Numerical,
          "covariance is not positive definite");
  Covariance c;
  c.shape_ = CovarianceShape::Dense;
  c.size_ = sigma.rows();
  c.matrix_ = std::make_shared<MatrixXd>(sigma);
  c.cholesky_ = std::move(llt);
  return c;
}

Covariance Covariance::of(const InnovationSpec& spec, Index T) {
  const double sigma = innovation_scale(spec);
  switch (spec.kind) {
    case InnovationKind::Iid: return white(T, sigma * sigma);
    case InnovationKind::Ar1: return ar1(T, spec.parameter, sigma * sigma);
    case InnovationKind::Ma1: return ma1(T, spec.parameter, sigma * sigma);
  }
  return white(T, sigma * sigma);
}

double Covariance::autocovariance(Index m) const {
  m = std::abs(m);
  switch (shape_) {
    case CovarianceShape::White: return m == 0 ? variance_ : 0.0;
    case CovarianceShape::Ma1:
      if (m == 0) return variance_ * (1.0 + parameter_ * parameter_);
      return m == 1 ? variance_ * parameter_ : 0.0;
    case CovarianceShape::Ar1:
      return variance_ * std::pow(parameter_, static_cast<double>(m)) /
             (1.0 - parameter_ * parameter_);
    case CovarianceShape::Dense: return m < size_ ? (*matrix_)(m, 0) : 0.0;
  }
  return 0.0;
}

MatrixXd Covariance::solve(const MatrixXd& rhs) const {
  require(rhs.rows() == size_, ErrorKind::Dimension, "right-hand side has the wrong length");
  switch (shape_) {
    case CovarianceShape::White: return rhs / variance_;
    case CovarianceShape::Ar1: {
      // The AR(1) precision matrix is tridiagonal.
      const double phi = parameter_;
      MatrixXd out(rhs.rows(), rhs.cols());
      const Index T = size_;
      for (Index t = 0; t < T; ++t) {
        const bool edge = (t == 0 || t == T - 1);
        const double diag = edge ? 1.0 : 1.0 + phi * phi;
        out.row(t) = diag * rhs.row(t);
        if (t > 0) out.row(t) -= phi * rhs.row(t - 1);
        if (t + 1 < T) out.row(t) -= phi * rhs.row(t + 1);
      }
      if (T == 1) out = rhs * (1.0 - phi * phi);
      return out / variance_;
    }
    case CovarianceShape::Ma1: {
      MatrixXd out = rhs;
      const Index T = size_;
      for (Index t = 1; t < T; ++t) out.row(t) -= ldl_lower_(t) * out.row(t - 1);
      for (Index t = 0; t < T; ++t) out.row(t) /= ldl_diagonal_(t);
      for (Index t = T - 2; t >= 0; --t) out.row(t) -= ldl_lower_(t + 1) * out.row(t + 1);
      return out;
    }
    case CovarianceShape::Dense: return cholesky_->solve(rhs);
  }
  return rhs;
}

MatrixXd Covariance::dense() const {
  if (shape_ == CovarianceShape::Dense) return *matrix_;
  MatrixXd out(size_, size_);
  for (Index s = 0; s < size_; ++s)
    for (Index t = 0; t < size_; ++t) out(s, t) = autocovariance(s - t);
  return out;
}

double Covariance::approximate_lrv() const {
  const double T = static_cast<double>(size_);
  if (shape_ == CovarianceShape::Dense) return matrix_->sum() / T;
  double total = autocovariance(0);
  for (Index m = 1; m < size_; ++m)
    total += 2.0 * (1.0 - static_cast<double>(m) / T) * autocovariance(m);
  return total;
}

double Covariance::approximate_one_sided_lrv() const {
  const double T = static_cast<double>(size_);
  if (shape_ == CovarianceShape::Dense) {
    double total = 0.0;
    for (Index t = 0; t < size_; ++t)
      for (Index s = t + 1; s < size_; ++s) total += (*matrix_)(s, t);
    return total / T;
  }
  double total = 0.0;
  for (Index m = 1; m < size_; ++m)
    total += (1.0 - static_cast<double>(m) / T) * autocovariance(m);
  return total;
}

bool Covariance::proportional_to(const Covariance& other) const {
  if (shape_ == CovarianceShape::Dense || other.shape_ == CovarianceShape::Dense) return false;
  return shape_ == other.shape_ && size_ == other.size_ && parameter_ == other.parameter_;
}

}  // namespace panelur::lan
