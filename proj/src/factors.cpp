#include "panelur/factors.hpp"

#include "panelur/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace panelur {

namespace {

struct Spectrum {
  MatrixXd moment;   // S
  VectorXd values;   // descending
  MatrixXd vectors;  // matching columns
};

Spectrum second_moment_spectrum(const MatrixXd& d) {
  const double scale = static_cast<double>(d.rows()) * static_cast<double>(d.cols());
  MatrixXd S = MatrixXd::Zero(d.rows(), d.rows());
  S.selfadjointView<Eigen::Lower>().rankUpdate(d, 1.0 / scale);
  S.triangularView<Eigen::StrictlyUpper>() = S.transpose();
  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(S);
  require(solver.info() == Eigen::Success, ErrorKind::Numerical,
          "eigendecomposition of the cross-sectional moment matrix failed");
  // Eigen returns ascending order.
  return Spectrum{S, solver.eigenvalues().reverse(), solver.eigenvectors().rowwise().reverse()};
}

void fix_sign(Eigen::Ref<VectorXd> v) {
  Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v(arg) < 0.0) v = -v;
}

void check_input(const DiffPanel& d) {
  require(d.values().allFinite(), ErrorKind::Data, "differenced panel contains a non-finite value");
}

}  // namespace

FactorFit estimate_factors(const DiffPanel& d, Index k) {
  check_input(d);
  const Index n = d.units();
  const Index periods = d.periods();
  require(k >= 0 && k <= std::min(n, periods), ErrorKind::Dimension,
          "number of factors " + std::to_string(k) + " exceeds min(n, T-1) = " +
              std::to_string(std::min(n, periods)));

  const MatrixXd& x = d.values();
  const Spectrum spectrum = second_moment_spectrum(x);
  const double nd = static_cast<double>(n);

  MatrixXd bar = std::sqrt(nd) * spectrum.vectors.leftCols(k);
  for (Index j = 0; j < k; ++j) fix_sign(bar.col(j));

  MatrixXd hat = spectrum.moment * bar;

  MatrixXd factor_diffs = x.transpose() * bar / nd;
  MatrixXd residuals = x - bar * (bar.transpose() * x) / nd;

  return FactorFit{std::move(bar), std::move(hat), std::move(factor_diffs),
                   DiffPanel(std::move(residuals)), spectrum.values, k};
}

Index select_num_factors(const DiffPanel& d, Index k_max) {
  check_input(d);
  const Index n = d.units();
  const Index periods = d.periods();
  require(k_max >= 0 && k_max <= std::min(n, periods), ErrorKind::Dimension,
          "k_max exceeds min(n, T-1)");
  if (k_max == 0) return 0;

  const Spectrum spectrum = second_moment_spectrum(d.values());
  const double nd = static_cast<double>(n);
  const double td = static_cast<double>(periods);
  const double penalty = (nd + td) / (nd * td) * std::log(std::min(nd, td));

  // V(k) is the mean squared residual: the trace left after k components.
  double remaining = d.values().squaredNorm() / (nd * td);
  Index best = 0;
  double best_ic = std::log(std::max(remaining, std::numeric_limits<double>::min()));
  for (Index k = 1; k <= k_max; ++k) {
    remaining -= spectrum.values(k - 1);
    const double v = std::max(remaining, std::numeric_limits<double>::min());
    const double ic = std::log(v) + static_cast<double>(k) * penalty;
    if (ic < best_ic) {
      best_ic = ic;
      best = k;
    }
  }
  return best;
}

}  // namespace panelur
