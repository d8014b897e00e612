#pragma once

// Independent reference computations for the unit and acceptance tests. Each
// one evaluates the literal formula, however slowly.

#include "panelur/lan.hpp"
#include "panelur/lrv.hpp"
#include "panelur/panel.hpp"
#include "panelur/unit_root_tests.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace panelur::oracle {

inline MatrixXd gaussian_matrix(Index rows, Index cols, std::mt19937_64& rng, double sd = 1.0) {
  std::normal_distribution<double> normal(0.0, sd);
  MatrixXd m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  return m;
}

inline LrvSet random_lrvs(Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> omega(0.3, 3.0);
  std::uniform_real_distribution<double> delta(-0.3, 0.6);
  std::vector<double> w, d, g;
  for (Index i = 0; i < n; ++i) {
    w.push_back(omega(rng));
    d.push_back(delta(rng));
    g.push_back(w.back() - 2.0 * d.back());
  }
  return LrvSet::from_units(w, d, g);
}

/// Explicit strictly-lower-triangular ones matrix.
inline MatrixXd lower_ones(Index T) {
  MatrixXd a = MatrixXd::Zero(T, T);
  for (Index s = 0; s < T; ++s)
    for (Index t = 0; t < s; ++t) a(s, t) = 1.0;
  return a;
}

/// The feasible central sequence and information by the literal double and
/// triple sums over difference columns, normalized by (columns + 1).
inline UmpIntermediates naive_ump(const MatrixXd& x, const MatrixXd& psi, const LrvSet& lrvs) {
  const Index n = x.rows();
  const Index cols = x.cols();
  const double T = static_cast<double>(cols + 1);
  double quadratic = 0.0;
  for (Index t = 0; t < cols; ++t)
    for (Index s = 0; s < t; ++s)
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) quadratic += x(i, s) * psi(i, j) * x(j, t);
  double information = 0.0;
  for (Index t = 0; t < cols; ++t) {
    for (Index s = 0; s < t; ++s)
      for (Index u = 0; u < t; ++u)
        for (Index i = 0; i < n; ++i)
          for (Index j = 0; j < n; ++j) information += x(i, s) * psi(i, j) * x(j, u);
  }
  double correction = 0.0;
  for (std::size_t i = 0; i < lrvs.size(); ++i) correction += lrvs.delta[i] / lrvs.omega2[i];
  correction /= std::sqrt(static_cast<double>(n));
  UmpIntermediates out;
  out.correction = correction;
  out.delta_hat = quadratic / (std::sqrt(static_cast<double>(n)) * T) - correction;
  out.j_hat = information / (static_cast<double>(n) * T * T);
  return out;
}

/// Unit-major vectorization (x_1', ..., x_n')'.
inline VectorXd vectorize(const MatrixXd& rows) {
  VectorXd v(rows.size());
  for (Index i = 0; i < rows.rows(); ++i) v.segment(i * rows.cols(), rows.cols()) = rows.row(i).transpose();
  return v;
}

/// Kronecker product by definition.
inline MatrixXd kron(const MatrixXd& a, const MatrixXd& b) {
  MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Full nT x nT covariance of eps = (Lambda kron I) f + eta.
inline MatrixXd dense_sigma_eps(const lan::OracleNuisance& nu) {
  const Index n = nu.units();
  const Index T = nu.periods();
  MatrixXd sigma = MatrixXd::Zero(n * T, n * T);
  for (Index k = 0; k < nu.factors(); ++k)
    sigma += kron(nu.loadings.col(k) * nu.loadings.col(k).transpose(), nu.sigma_f[static_cast<std::size_t>(k)].dense());
  for (Index i = 0; i < n; ++i) {
    MatrixXd e = MatrixXd::Zero(n, n);
    e(i, i) = 1.0;
    sigma += kron(e, nu.sigma_eta[static_cast<std::size_t>(i)].dense());
  }
  return sigma;
}

/// (Delta, J) = (y' calA' Sigma^{-1} y / (sqrt(n) T), y' calA' Sigma^{-1} calA y / (n T^2))
/// with calA = I_n kron A and an explicit inverse.
inline lan::CentralSequence kron_central_sequence(const MatrixXd& d, const MatrixXd& sigma) {
  const Index n = d.rows();
  const Index T = d.cols();
  const MatrixXd cal_a = kron(MatrixXd::Identity(n, n), lower_ones(T));
  const MatrixXd inverse = sigma.inverse();
  const VectorXd y = vectorize(d);
  const VectorXd ay = cal_a * y;
  const double scale = std::sqrt(static_cast<double>(n)) * static_cast<double>(T);
  return {ay.dot(inverse * y) / scale, ay.dot(inverse * ay) / (scale * scale)};
}

/// Largest eigenpairs of a symmetric positive semidefinite matrix by power
/// iteration with deflation.
inline std::vector<std::pair<double, VectorXd>> power_iteration(MatrixXd s, Index k, int iterations = 20000) {
  std::vector<std::pair<double, VectorXd>> out;
  for (Index c = 0; c < k; ++c) {
    VectorXd v = VectorXd::Ones(s.rows());
    for (Index i = 0; i < v.size(); ++i) v(i) += 0.1 * static_cast<double>(i);
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < iterations; ++it) {
      VectorXd w = s * v;
      lambda = v.dot(w);
      if (w.norm() == 0.0) break;
      v = w.normalized();
    }
    out.emplace_back(lambda, v);
    s -= lambda * v * v.transpose();
  }
  return out;
}

/// Sample autocovariance (1/T) sum s_t s_{t+m} by the literal loop.
inline double autocovariance(const std::vector<double>& s, std::size_t m) {
  double total = 0.0;
  for (std::size_t t = 0; t + m < s.size(); ++t) total += s[t] * s[t + m];
  return total / static_cast<double>(s.size());
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

inline double mean(const std::vector<double>& v) {
  double total = 0.0;
  for (double x : v) total += x;
  return total / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double total = 0.0;
  for (double x : v) total += (x - m) * (x - m);
  return total / static_cast<double>(v.size() - 1);
}

}  // namespace panelur::oracle
