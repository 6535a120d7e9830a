#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace quantlets {

struct SampleSet {
  std::string subject_id;
  Eigen::VectorXd values;  // unordered repeated measurements, length >= 2
};

// One subject's empirical quantile function: order statistics placed on the
// grid p_j = j/(m+1), j = 1..m, interpolated linearly in between.
struct EmpiricalQuantileFunction {
  std::string subject_id;
  Eigen::VectorXd grid;    // p_j = j/(m+1), strictly increasing in (0,1)
  Eigen::VectorXd values;  // Q(p_j) = Y_(j), non-decreasing

  int m() const { return static_cast<int>(values.size()); }
  double delta() const { return 1.0 / (m() + 1.0); }
};

struct MomentSummary {
  double mean = 0.0;
  double variance = 0.0;
  std::optional<double> skewness;  // undefined when variance ~ 0
  std::optional<double> kurtosis;
};

EmpiricalQuantileFunction build_eqf(const SampleSet& samples);

// Linear interpolation between order statistics; valid for
// p in [1/(m+1), m/(m+1)], errors outside.
double eval_eqf(const EmpiricalQuantileFunction& q, double p);

Eigen::VectorXd resample_to_grid(const EmpiricalQuantileFunction& q,
                                 const Eigen::VectorXd& grid);

// Distributional moments of a quantile function sampled on a grid,
// trapezoid quadrature over the grid.
MomentSummary moments_of_qf(const Eigen::VectorXd& grid,
                            const Eigen::VectorXd& values);

}  // namespace quantlets
