#include "quantlets/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "quantlets/errors.hpp"
#include "quantlets/quadrature.hpp"

namespace quantlets {

namespace {

double nearest_rank(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size();
  const std::size_t k =
      std::min(m, std::max<std::size_t>(1, static_cast<std::size_t>(
                                              std::ceil(q * m))));
  return v[k - 1];
}

}  // namespace

FunctionalPosterior to_data_space(const PosteriorFit& fit,
                                  const Eigen::VectorXd& grid) {
  if (fit.moments_direct)
    throw ConfigError("to_data_space: feature-extraction fit has no basis");
  if (fit.basis_grid.size() == 0)
    throw ConfigError("to_data_space: fit carries no basis grid");
  const double lo = fit.basis_grid[0];
  const double hi = fit.basis_grid[fit.basis_grid.size() - 1];
  const double slack = 1e-9;
  if (grid.minCoeff() < lo - slack || grid.maxCoeff() > hi + slack)
    throw OutOfRangeError("to_data_space: grid outside basis support");

  FunctionalPosterior fp;
  fp.grid = grid;
  fp.beta.reserve(fit.bstar.size());

  if (fit.basis_rows.size() == 0) {
    // identity basis (naive per-p fit): coefficient k lives at grid point k
    for (const auto& B : fit.bstar) {
      Eigen::MatrixXd out(B.rows(), grid.size());
      for (Eigen::Index a = 0; a < B.rows(); ++a)
        out.row(a) =
            interp1(fit.basis_grid, B.row(a).transpose(), grid).transpose();
      fp.beta.push_back(std::move(out));
    }
    return fp;
  }

  const bool same = grid.size() == fit.basis_grid.size() &&
                    grid == fit.basis_grid;
  Eigen::MatrixXd rows;
  if (same) {
    rows = fit.basis_rows;
  } else {
    rows.resize(fit.basis_rows.rows(), grid.size());
    for (Eigen::Index k = 0; k < fit.basis_rows.rows(); ++k)
      rows.row(k) =
          interp1(fit.basis_grid, fit.basis_rows.row(k).transpose(), grid)
              .transpose();
  }
  for (const auto& B : fit.bstar) fp.beta.emplace_back(B * rows);
  return fp;
}

BandSet joint_bands(const FunctionalPosterior& fp, int a, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ConfigError("joint_bands: alpha outside (0,1)");
  const int M = fp.n_draws();
  if (M < 100) throw ValidationError("joint_bands: need at least 100 draws");
  const Eigen::Index J = fp.grid.size();

  BandSet bs;
  bs.alpha = alpha;
  bs.grid = fp.grid;
  bs.mean = Eigen::VectorXd::Zero(J);
  for (const auto& B : fp.beta) bs.mean += B.row(a).transpose();
  bs.mean /= M;
  Eigen::VectorXd ss = Eigen::VectorXd::Zero(J);
  for (const auto& B : fp.beta)
    ss += (B.row(a).transpose() - bs.mean).array().square().matrix();
  bs.sd = (ss / std::max(M - 1, 1)).array().sqrt();

  std::vector<double> z(M, 0.0);
  for (int m = 0; m < M; ++m) {
    double zmax = 0.0;
    for (Eigen::Index j = 0; j < J; ++j) {
      if (bs.sd[j] <= 0.0) continue;
      zmax = std::max(zmax,
                      std::fabs((fp.beta[m](a, j) - bs.mean[j]) / bs.sd[j]));
    }
    z[m] = zmax;
  }
  bs.sd_zero_count = static_cast<int>((bs.sd.array() <= 0.0).count());
  bs.q_joint = nearest_rank(z, 1.0 - alpha);
  bs.joint_lo = bs.mean - bs.q_joint * bs.sd;
  bs.joint_hi = bs.mean + bs.q_joint * bs.sd;

  bs.pointwise_lo.resize(J);
  bs.pointwise_hi.resize(J);
  std::vector<double> col(M);
  for (Eigen::Index j = 0; j < J; ++j) {
    for (int m = 0; m < M; ++m) col[m] = fp.beta[m](a, j);
    bs.pointwise_lo[j] = nearest_rank(col, alpha / 2.0);
    bs.pointwise_hi[j] = nearest_rank(col, 1.0 - alpha / 2.0);
  }
  return bs;
}

Eigen::VectorXd simbas(const FunctionalPosterior& fp, int a) {
  const int M = fp.n_draws();
  const Eigen::Index J = fp.grid.size();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(J);
  for (const auto& B : fp.beta) mean += B.row(a).transpose();
  mean /= M;
  Eigen::VectorXd ss = Eigen::VectorXd::Zero(J);
  for (const auto& B : fp.beta)
    ss += (B.row(a).transpose() - mean).array().square().matrix();
  const Eigen::VectorXd sd = (ss / std::max(M - 1, 1)).array().sqrt();

  std::vector<double> z(M, 0.0);
  for (int m = 0; m < M; ++m) {
    double zmax = 0.0;
    for (Eigen::Index j = 0; j < J; ++j) {
      if (sd[j] <= 0.0) continue;
      zmax =
          std::max(zmax, std::fabs((fp.beta[m](a, j) - mean[j]) / sd[j]));
    }
    z[m] = zmax;
  }

  Eigen::VectorXd curve(J);
  for (Eigen::Index j = 0; j < J; ++j) {
    double t;
    if (sd[j] <= 0.0) {
      t = mean[j] == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    } else {
      t = std::fabs(mean[j] / sd[j]);
    }
    int count = 0;
    for (int m = 0; m < M; ++m)
      if (t <= z[m]) ++count;
    curve[j] = std::max(static_cast<double>(count) / M, 1.0 / M);
  }
  return curve;
}

double gbpv(const Eigen::VectorXd& simbas_curve) {
  return simbas_curve.minCoeff();
}

MomentDraws conditional_moments(const FunctionalPosterior& fp,
                                const Eigen::VectorXd& x_row) {
  if (x_row.size() != fp.A())
    throw ValidationError("conditional_moments: covariate row size mismatch");
  const int M = fp.n_draws();
  const GridMeasure measure(fp.grid);
  MomentDraws md;
  md.mean.resize(M);
  md.variance.resize(M);
  md.sd.resize(M);
  md.skewness.setConstant(M, std::numeric_limits<double>::quiet_NaN());
  md.kurtosis.setConstant(M, std::numeric_limits<double>::quiet_NaN());
  for (int m = 0; m < M; ++m) {
    const Eigen::VectorXd q = fp.beta[m].transpose() * x_row;
    const double mu = measure.mean(q);
    const Eigen::ArrayXd c = q.array() - mu;
    const Eigen::ArrayXd w = measure.weights().array();
    const double v = (w * c.square()).sum();
    md.mean[m] = mu;
    md.variance[m] = v;
    md.sd[m] = std::sqrt(std::max(v, 0.0));
    if (v >= 1e-12) {
      md.skewness[m] = (w * c.cube()).sum() / std::pow(v, 1.5);
      md.kurtosis[m] = (w * c.square().square()).sum() / (v * v);
    } else {
      ++md.undefined_count;
    }
  }
  return md;
}

MomentDraws conditional_moments_direct(const PosteriorFit& fit,
                                       const Eigen::VectorXd& x_row) {
  if (!fit.moments_direct)
    throw ConfigError("conditional_moments_direct: not a moments fit");
  const int M = fit.n_draws();
  MomentDraws md;
  md.mean.resize(M);
  md.variance.resize(M);
  md.sd.resize(M);
  md.skewness.resize(M);
  md.kurtosis.resize(M);
  for (int m = 0; m < M; ++m) {
    const Eigen::VectorXd v = fit.bstar[m].transpose() * x_row;  // 4 moments
    md.mean[m] = v[0];
    md.sd[m] = v[1];
    md.variance[m] = v[1] * v[1];
    md.skewness[m] = v[2];
    md.kurtosis[m] = v[3];
  }
  return md;
}

double moment_prob_score(const Eigen::VectorXd& draws1,
                         const Eigen::VectorXd& draws2) {
  if (draws1.size() != draws2.size())
    throw ValidationError("moment_prob_score: unpaired draws");
  const Eigen::Index M = draws1.size();
  double pos = 0.0, neg = 0.0;
  for (Eigen::Index m = 0; m < M; ++m) {
    const double d = draws1[m] - draws2[m];
    if (std::isnan(d)) continue;
    if (d > 0.0)
      pos += 1.0;
    else if (d < 0.0)
      neg += 1.0;
    else {
      pos += 0.5;
      neg += 0.5;
    }
  }
  return 2.0 * std::min(pos, neg) / M;
}

GaussianityScore gaussianity_score(const PosteriorFit& fit,
                                   const Eigen::VectorXd& x_row) {
  if (fit.K() < 2)
    throw ConfigError("gaussianity_score: needs at least two coefficients");
  const int M = fit.n_draws();
  GaussianityScore gs;
  std::vector<double> vals;
  vals.reserve(M);
  for (int m = 0; m < M; ++m) {
    const Eigen::VectorXd c = fit.bstar[m].transpose() * x_row;  // K
    const double denom = c.squaredNorm();
    if (denom <= 0.0) {
      ++gs.excluded;
      continue;
    }
    vals.push_back(c.head(2).squaredNorm() / denom);
  }
  if (vals.empty()) return gs;
  gs.draws = Eigen::Map<Eigen::VectorXd>(vals.data(), vals.size());
  gs.mean = gs.draws.mean();
  gs.lo = nearest_rank(vals, 0.025);
  gs.hi = nearest_rank(vals, 0.975);
  return gs;
}

Eigen::VectorXd predicted_quantile_mean(const FunctionalPosterior& fp,
                                        const Eigen::VectorXd& x_row) {
  Eigen::VectorXd q = Eigen::VectorXd::Zero(fp.grid.size());
  for (const auto& B : fp.beta) q += B.transpose() * x_row;
  return q / fp.n_draws();
}

PdfCdfTables predicted_pdf_cdf(const FunctionalPosterior& fp,
                               const Eigen::VectorXd& x_row, double delta) {
  const Eigen::Index J = fp.grid.size();
  if (J < 2) throw ValidationError("predicted_pdf_cdf: trivial grid");
  const double h = fp.grid[1] - fp.grid[0];
  const int step = static_cast<int>(std::lround(delta / h));
  if (step < 1 || std::fabs(step * h - delta) > 1e-9 * std::max(1.0, delta))
    throw ConfigError(
        "predicted_pdf_cdf: delta must be a positive multiple of the grid "
        "spacing");

  PdfCdfTables t;
  t.cdf_p = fp.grid;
  t.cdf_x = predicted_quantile_mean(fp, x_row);
  t.degenerate = (t.cdf_x.maxCoeff() - t.cdf_x.minCoeff()) < 1e-9;

  const int M = fp.n_draws();
  std::vector<double> xs, fs;
  for (Eigen::Index j = step; j < J; j += step) {
    double acc = 0.0;
    int valid = 0;
    for (int m = 0; m < M; ++m) {
      const double dq = fp.beta[m].col(j).dot(x_row) -
                        fp.beta[m].col(j - step).dot(x_row);
      if (dq > 0.0) {
        acc += delta / dq;
        ++valid;
      }
    }
    if (valid == 0) {
      ++t.omitted;
      continue;
    }
    // the difference quotient estimates the density at the secant midpoint
    xs.push_back(0.5 * (t.cdf_x[j] + t.cdf_x[j - step]));
    fs.push_back(acc / valid);
  }
  t.pdf_x = Eigen::Map<Eigen::VectorXd>(xs.data(), xs.size());
  t.pdf_value = Eigen::Map<Eigen::VectorXd>(fs.data(), fs.size());
  return t;
}

double epsilon_monotonicity_violation(const Eigen::VectorXd& qhat,
                                      double epsilon) {
  if (epsilon < 0.0)
    throw ConfigError("epsilon_monotonicity: epsilon must be >= 0");
  const Eigen::Index J = qhat.size();
  double running_max = -std::numeric_limits<double>::infinity();
  int violations = 0;
  for (Eigen::Index j = 0; j < J; ++j) {
    if (j > 0 && running_max - qhat[j] > epsilon) ++violations;
    running_max = std::max(running_max, qhat[j]);
  }
  return static_cast<double>(violations) / J;
}

double epsilon_monotonicity_rate(const std::vector<Eigen::VectorXd>& qhats,
                                 double epsilon) {
  if (qhats.empty()) return 1.0;
  double acc = 0.0;
  for (const auto& q : qhats) acc += epsilon_monotonicity_violation(q, epsilon);
  return 1.0 - acc / qhats.size();
}

}  // namespace quantlets
