#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>

namespace quantlets {

// All functional inner products, norms and moments in this library are taken
// with respect to the uniform probability measure on the evaluation grid,
// estimated by the trapezoid rule with weights normalized to sum to one.
// With that convention the constant function 1 has unit norm on any grid.
inline Eigen::VectorXd trapezoid_weights(const Eigen::VectorXd& grid) {
  const Eigen::Index n = grid.size();
  if (n < 2) throw std::invalid_argument("trapezoid_weights: need >= 2 points");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  for (Eigen::Index j = 0; j + 1 < n; ++j) {
    const double h = grid[j + 1] - grid[j];
    if (!(h > 0.0))
      throw std::invalid_argument("trapezoid_weights: grid must be increasing");
    w[j] += 0.5 * h;
    w[j + 1] += 0.5 * h;
  }
  w /= w.sum();
  return w;
}

// Uniform grid of n points on [delta, 1-delta].
inline Eigen::VectorXd probability_grid(int n, double delta) {
  if (n < 2) throw std::invalid_argument("probability_grid: n < 2");
  if (!(delta > 0.0 && delta < 0.5))
    throw std::invalid_argument("probability_grid: delta outside (0, 0.5)");
  return Eigen::VectorXd::LinSpaced(n, delta, 1.0 - delta);
}

class GridMeasure {
 public:
  explicit GridMeasure(Eigen::VectorXd grid)
      : grid_(std::move(grid)), w_(trapezoid_weights(grid_)) {}

  const Eigen::VectorXd& grid() const { return grid_; }
  const Eigen::VectorXd& weights() const { return w_; }
  Eigen::Index size() const { return grid_.size(); }

  double integrate(const Eigen::VectorXd& f) const { return w_.dot(f); }

  double inner(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const {
    return (w_.array() * f.array() * g.array()).sum();
  }

  double norm(const Eigen::VectorXd& f) const {
    return std::sqrt(inner(f, f));
  }

  double mean(const Eigen::VectorXd& f) const { return integrate(f); }

  double variance(const Eigen::VectorXd& f) const {
    const double m = mean(f);
    return (w_.array() * (f.array() - m).square()).sum();
  }

  double covariance(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const {
    return inner(f, g) - mean(f) * mean(g);
  }

 private:
  Eigen::VectorXd grid_;
  Eigen::VectorXd w_;
};

// Linear interpolation of (x, y) samples at query points; x strictly
// increasing, queries clamped to [x.front(), x.back()].
inline double interp1(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                      double q) {
  const Eigen::Index n = x.size();
  if (q <= x[0]) return y[0];
  if (q >= x[n - 1]) return y[n - 1];
  // binary search for the bracketing interval
  Eigen::Index lo = 0, hi = n - 1;
  while (hi - lo > 1) {
    const Eigen::Index mid = (lo + hi) / 2;
    (x[mid] <= q ? lo : hi) = mid;
  }
  const double t = (q - x[lo]) / (x[lo + 1] - x[lo]);
  return (1.0 - t) * y[lo] + t * y[lo + 1];
}

inline Eigen::VectorXd interp1(const Eigen::VectorXd& x,
                               const Eigen::VectorXd& y,
                               const Eigen::VectorXd& queries) {
  Eigen::VectorXd out(queries.size());
  for (Eigen::Index i = 0; i < queries.size(); ++i)
    out[i] = interp1(x, y, queries[i]);
  return out;
}

}  // namespace quantlets
