#include "quantlets/eqf.hpp"

#include <algorithm>
#include <cmath>

#include "quantlets/errors.hpp"
#include "quantlets/quadrature.hpp"

namespace quantlets {

EmpiricalQuantileFunction build_eqf(const SampleSet& samples) {
  const Eigen::Index m = samples.values.size();
  if (m < 2)
    throw ValidationError("build_eqf: subject '" + samples.subject_id +
                          "' has fewer than 2 values");
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!std::isfinite(samples.values[i]))
      throw ValidationError("build_eqf: non-finite value for subject '" +
                            samples.subject_id + "'");
  }
  EmpiricalQuantileFunction q;
  q.subject_id = samples.subject_id;
  q.values = samples.values;
  std::sort(q.values.begin(), q.values.end());
  q.grid = Eigen::VectorXd::LinSpaced(m, 1.0 / (m + 1.0),
                                      static_cast<double>(m) / (m + 1.0));
  return q;
}

double eval_eqf(const EmpiricalQuantileFunction& q, double p) {
  const int m = q.m();
  const double lo = 1.0 / (m + 1.0);
  const double hi = static_cast<double>(m) / (m + 1.0);
  // tolerate rounding right at the boundary
  const double slack = 1e-12;
  if (p < lo - slack || p > hi + slack)
    throw OutOfRangeError("eval_eqf: p outside [1/(m+1), m/(m+1)]");
  const double t = (m + 1.0) * std::min(std::max(p, lo), hi);
  const int j = std::min(static_cast<int>(t), m);  // floor, [(m+1)p] >= 1
  const double w = t - j;
  if (j >= m) return q.values[m - 1];
  return (1.0 - w) * q.values[j - 1] + w * q.values[j];
}

Eigen::VectorXd resample_to_grid(const EmpiricalQuantileFunction& q,
                                 const Eigen::VectorXd& grid) {
  Eigen::VectorXd out(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) out[i] = eval_eqf(q, grid[i]);
  return out;
}

MomentSummary moments_of_qf(const Eigen::VectorXd& grid,
                            const Eigen::VectorXd& values) {
  if (grid.size() < 4)
    throw ValidationError("moments_of_qf: need at least 4 grid points");
  const GridMeasure mu(grid);
  MomentSummary s;
  s.mean = mu.mean(values);
  const Eigen::ArrayXd c = values.array() - s.mean;
  const Eigen::ArrayXd w = mu.weights().array();
  s.variance = (w * c.square()).sum();
  if (s.variance >= 1e-12) {
    s.skewness = (w * c.cube()).sum() / std::pow(s.variance, 1.5);
    s.kurtosis = (w * c.square().square()).sum() / (s.variance * s.variance);
  }
  return s;
}

}  // namespace quantlets
