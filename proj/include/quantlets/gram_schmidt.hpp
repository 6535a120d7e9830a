#pragma once

#include <Eigen/Dense>
#include <vector>

#include "quantlets/quadrature.hpp"

namespace quantlets {

struct GramSchmidtResult {
  Eigen::MatrixXd q;          // orthonormal columns under the grid measure
  std::vector<int> kept;      // input column index per output column
  std::vector<int> dropped;   // numerically dependent inputs
};

// Modified Gram-Schmidt with one re-orthogonalization pass per column.
// Columns whose residual norm falls below 1e-10 times their original norm are
// dropped.  Columns that are already orthonormal pass through unchanged.
GramSchmidtResult gram_schmidt(const GridMeasure& measure,
                               const Eigen::MatrixXd& columns);

}  // namespace quantlets
