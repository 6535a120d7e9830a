#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "quantlets/quadrature.hpp"

namespace quantlets {

// One element of the overcomplete dictionary.  The first two span the space
// of Gaussian quantile functions; every other element is a standardized Beta
// CDF projected onto their orthogonal complement.  An element is a fixed
// function of p: the standardization constants are computed once, on the
// construction grid, and reused when the element is evaluated elsewhere.
struct DictionaryElement {
  enum class Kind { Constant, Gaussian, Beta };
  Kind kind = Kind::Beta;
  double a = 0.0, b = 0.0;   // Beta(a, b) parameters
  double mu = 0.0;           // int F_theta dp on the construction grid
  double sigma = 1.0;        // sqrt(int (F_theta - mu)^2 dp)
  double c1 = 0.0, c2 = 0.0; // coefficients removed by the Gaussian projection
  double post_norm = 1.0;    // norm after projection, divides the result
};

struct Dictionary {
  std::vector<DictionaryElement> elements;  // [constant, gaussian, betas...]
  Eigen::VectorXd grid;                     // construction grid
  Eigen::MatrixXd values;                   // grid.size() x elements.size()
  std::uint64_t seed = 0;
  double theta_lo = 0.0, theta_hi = 0.0;
  int redraws = 0;  // degenerate thetas redrawn during construction

  Eigen::Index size() const { return static_cast<Eigen::Index>(elements.size()); }

  // Evaluate every element on an arbitrary grid inside (0,1).
  Eigen::MatrixXd evaluate(const Eigen::VectorXd& p) const;
};

// Overcomplete dictionary {xi_1, xi_2} + k_over Beta-CDF elements with
// parameters sampled uniformly from [theta_lo, theta_hi]^2.
Dictionary make_dictionary(int k_over, double theta_lo, double theta_hi,
                           const Eigen::VectorXd& grid, std::uint64_t seed);

// Residual of f after removing its components along the (grid-orthonormalized)
// Gaussian pair.
Eigen::VectorXd project_out_gaussian(const GridMeasure& measure,
                                     const Eigen::VectorXd& f);

// Order-n Bernstein-type approximation of a quantile function from samples of
// its derivative q at k/n, k = 0..n, expressed as a Beta-CDF mixture.  Used as
// a convergence oracle only.
double bernstein_quantile_approx(const Eigen::VectorXd& q_at_knots, double p);
double bernstein_quantile_approx(const std::function<double(double)>& q, int n,
                                 double p);

}  // namespace quantlets
