#include "quantlets/dictionary.hpp"

#include <cmath>

#include "quantlets/errors.hpp"
#include "quantlets/parallel.hpp"
#include "quantlets/rng.hpp"
#include "quantlets/special.hpp"

namespace quantlets {

namespace {

Eigen::VectorXd gaussian_unit(const GridMeasure& measure) {
  Eigen::VectorXd xi2 = norm_quantile(measure.grid());
  // orthonormalize against the constant under the grid measure
  xi2.array() -= measure.mean(xi2);
  xi2 /= measure.norm(xi2);
  return xi2;
}

// evaluate one element on an arbitrary grid, given the unit-norm Gaussian
// direction on that grid is not available: recompute locally
Eigen::VectorXd eval_element(const DictionaryElement& e,
                             const Eigen::VectorXd& p,
                             const Eigen::VectorXd& xi2_unit_ref,
                             const Eigen::VectorXd& phi_inv) {
  switch (e.kind) {
    case DictionaryElement::Kind::Constant:
      return Eigen::VectorXd::Ones(p.size());
    case DictionaryElement::Kind::Gaussian:
      return phi_inv;
    case DictionaryElement::Kind::Beta: {
      Eigen::VectorXd f(p.size());
      for (Eigen::Index j = 0; j < p.size(); ++j)
        f[j] = (beta_cdf(e.a, e.b, p[j]) - e.mu) / e.sigma;
      f.noalias() -= e.c1 * Eigen::VectorXd::Ones(p.size());
      f.noalias() -= e.c2 * xi2_unit_ref;
      return f / e.post_norm;
    }
  }
  return {};
}

}  // namespace

Eigen::MatrixXd Dictionary::evaluate(const Eigen::VectorXd& p) const {
  const GridMeasure measure(p);
  const Eigen::VectorXd phi_inv = norm_quantile(p);
  Eigen::VectorXd xi2_unit = phi_inv;
  xi2_unit.array() -= measure.mean(xi2_unit);
  xi2_unit /= measure.norm(xi2_unit);

  Eigen::MatrixXd out(p.size(), size());
  parallel_for(static_cast<std::size_t>(size()), [&](std::size_t k) {
    out.col(static_cast<Eigen::Index>(k)) =
        eval_element(elements[k], p, xi2_unit, phi_inv);
  });
  return out;
}

Dictionary make_dictionary(int k_over, double theta_lo, double theta_hi,
                           const Eigen::VectorXd& grid, std::uint64_t seed) {
  if (k_over < 0) throw ConfigError("make_dictionary: k_over < 0");
  if (!(theta_lo > 0.0) || !(theta_lo < theta_hi))
    throw ConfigError("make_dictionary: need 0 < theta_lo < theta_hi");

  Dictionary dict;
  dict.grid = grid;
  dict.seed = seed;
  dict.theta_lo = theta_lo;
  dict.theta_hi = theta_hi;

  const GridMeasure measure(grid);
  const Eigen::VectorXd phi_inv = norm_quantile(grid);
  const Eigen::VectorXd xi2_unit = gaussian_unit(measure);

  dict.elements.reserve(k_over + 2);
  dict.elements.push_back({DictionaryElement::Kind::Constant});
  dict.elements.push_back({DictionaryElement::Kind::Gaussian});

  // Draw all thetas first (sequential, so the stream is stable), then fill the
  // per-element constants in parallel.  Degenerate draws - Beta CDFs that are
  // numerically constant on the modeling range - are redrawn from the same
  // stream.
  Rng rng = Rng::from_label(seed, "dictionary-theta");
  std::vector<std::pair<double, double>> thetas;
  thetas.reserve(k_over);

  auto standardize = [&](double a, double b, DictionaryElement* e) -> bool {
    Eigen::VectorXd f(grid.size());
    for (Eigen::Index j = 0; j < grid.size(); ++j)
      f[j] = beta_cdf(a, b, grid[j]);
    const double mu = measure.mean(f);
    const double sigma = std::sqrt(measure.variance(f));
    if (sigma < 1e-10) return false;
    f = (f.array() - mu) / sigma;
    const double c1 = measure.mean(f);
    const double c2 = measure.inner(f, xi2_unit);
    f.noalias() -= c1 * Eigen::VectorXd::Ones(grid.size());
    f.noalias() -= c2 * xi2_unit;
    const double nrm = measure.norm(f);
    if (nrm < 1e-8) return false;
    if (e) *e = {DictionaryElement::Kind::Beta, a, b, mu, sigma, c1, c2, nrm};
    return true;
  };

  for (int k = 0; k < k_over; ++k) {
    for (;;) {
      const double a = rng.uniform(theta_lo, theta_hi);
      const double b = rng.uniform(theta_lo, theta_hi);
      DictionaryElement e;
      if (standardize(a, b, &e)) {
        dict.elements.push_back(e);
        break;
      }
      ++dict.redraws;
    }
  }

  dict.values.resize(grid.size(), dict.size());
  parallel_for(static_cast<std::size_t>(dict.size()), [&](std::size_t k) {
    dict.values.col(static_cast<Eigen::Index>(k)) =
        eval_element(dict.elements[k], grid, xi2_unit, phi_inv);
  });
  return dict;
}

Eigen::VectorXd project_out_gaussian(const GridMeasure& measure,
                                     const Eigen::VectorXd& f) {
  const Eigen::VectorXd xi2_unit = gaussian_unit(measure);
  Eigen::VectorXd out = f;
  out.array() -= measure.mean(f);
  out.noalias() -= measure.inner(out, xi2_unit) * xi2_unit;
  return out;
}

double bernstein_quantile_approx(const Eigen::VectorXd& q_at_knots, double p) {
  const Eigen::Index n1 = q_at_knots.size();  // n + 1 samples
  if (n1 < 1) throw ValidationError("bernstein_quantile_approx: empty q");
  const int n = static_cast<int>(n1) - 1;
  double acc = 0.0;
  for (int k = 0; k <= n; ++k)
    acc += q_at_knots[k] * beta_cdf(k + 1.0, n - k + 1.0, p);
  return acc / (n + 1.0);
}

double bernstein_quantile_approx(const std::function<double(double)>& q, int n,
                                 double p) {
  Eigen::VectorXd samples(n + 1);
  for (int k = 0; k <= n; ++k)
    samples[k] = q(n == 0 ? 0.0 : static_cast<double>(k) / n);
  return bernstein_quantile_approx(samples, p);
}

}  // namespace quantlets
