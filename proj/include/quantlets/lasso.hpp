#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace quantlets {

struct LassoFit {
  Eigen::VectorXd beta;
  bool converged = true;
  int sweeps = 0;
};

// Minimizes ||y - X beta||^2 + lambda * sum_{k >= n_unpenalized} |beta_k|
// by cyclic coordinate descent with an active-set strategy.  The first
// n_unpenalized columns (the Gaussian pair in this library) are updated by
// plain least squares.  Convergence: max coefficient change < 1e-7, hard cap
// 1e4 sweeps (converged flag cleared at the cap, no throw).
LassoFit lasso_fit(const Eigen::Ref<const Eigen::MatrixXd>& X,
                   const Eigen::Ref<const Eigen::VectorXd>& y, double lambda,
                   int n_unpenalized = 2,
                   const Eigen::VectorXd* warm_start = nullptr,
                   std::vector<double>* objective_trace = nullptr);

// Geometric grid of `length` values from lambda_max (smallest lambda with all
// penalized coefficients zero) down to min_ratio * lambda_max.
Eigen::VectorXd lambda_path(const Eigen::Ref<const Eigen::MatrixXd>& X,
                            const Eigen::Ref<const Eigen::VectorXd>& y,
                            int n_unpenalized = 2, int length = 100,
                            double min_ratio = 1e-4);

struct CvChoice {
  double lambda = 0.0;
  int index = 0;                // position in path
  Eigen::VectorXd path;
  Eigen::VectorXd cv_error;     // mean held-out SSE per path entry
};

// K-fold cross validation over a descending lambda path, folds formed by
// interleaving grid points (row j goes to fold j mod n_folds).  Warm starts
// along the path within each fold.  Ties resolved toward the larger lambda.
CvChoice cv_lambda(const Eigen::Ref<const Eigen::MatrixXd>& X,
                   const Eigen::Ref<const Eigen::VectorXd>& y,
                   int n_folds = 10,
                   const Eigen::VectorXd& path = Eigen::VectorXd(),
                   std::uint64_t seed = 0, int n_unpenalized = 2);

}  // namespace quantlets
