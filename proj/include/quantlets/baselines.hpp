#pragma once

#include <Eigen/Dense>
#include <vector>

#include "quantlets/eqf.hpp"
#include "quantlets/gibbs.hpp"
#include "quantlets/quantlet_basis.hpp"

namespace quantlets {

// Fits any in-scope method and returns the method-agnostic PosteriorFit:
//   E  spike-slab Gibbs on the quantlet coefficients
//   D  same sampler with a flat prior
//   F  first two quantlet coefficients only
//   C  principal-component basis (mean function + PCs covering 1 - epsilon
//      of the variance), spike-slab Gibbs on the scores
//   B  independent conjugate regression per grid point of the common grid
//   G  per-subject distributional moments regressed on X (moments-direct)
// `n_clusters` 0 means the default prior-cluster count for the basis.
PosteriorFit fit_baseline(FitMethod method,
                          const std::vector<EmpiricalQuantileFunction>& subjects,
                          const QuantletBasis& basis,
                          const Eigen::MatrixXd& qstar,
                          const DesignMatrix& design, const GibbsConfig& config,
                          double epsilon = 0.01, int n_clusters = 0);

}  // namespace quantlets
