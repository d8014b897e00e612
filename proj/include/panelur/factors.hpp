#pragma once

#include "panelur/panel.hpp"

namespace panelur {

/// Principal-components fit of the differenced panel.
struct FactorFit {
  MatrixXd loadings_bar;  ///< sqrt(n) times the leading eigenvectors, n x k
  MatrixXd loadings_hat;  ///< S * loadings_bar, n x k
  MatrixXd factor_diffs;  ///< estimated factor differences, (T-1) x k
  DiffPanel residuals;    ///< idiosyncratic difference residuals, n x (T-1)
  VectorXd eigenvalues;   ///< all eigenvalues of S, descending
  Index k = 0;
};

/// Fits k principal components to the cross-sectional second-moment matrix
/// S = d d' / (n T') of the differenced panel. k = 0 returns the data as residuals.
FactorFit estimate_factors(const DiffPanel& d, Index k);

/// Number of factors minimizing the IC_p2 criterion over 0..k_max.
Index select_num_factors(const DiffPanel& d, Index k_max);

}  // namespace panelur
