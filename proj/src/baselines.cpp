#include "quantlets/baselines.hpp"

#include <cmath>

#include "quantlets/errors.hpp"

namespace quantlets {

namespace {

Eigen::MatrixXd resample_all(
    const std::vector<EmpiricalQuantileFunction>& subjects,
    const Eigen::VectorXd& grid) {
  Eigen::MatrixXd out(subjects.size(), grid.size());
  for (std::size_t i = 0; i < subjects.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) =
        resample_to_grid(subjects[i], grid).transpose();
  return out;
}

PosteriorFit fit_quantlet_space(const Eigen::MatrixXd& qstar,
                                const QuantletBasis& basis,
                                const DesignMatrix& design,
                                GibbsConfig config, FitMethod method,
                                int n_clusters) {
  ClusterPartition part;
  if (qstar.cols() <= 2) {
    part = single_cluster(static_cast<int>(qstar.cols()));
  } else {
    if (n_clusters <= 0) n_clusters = default_cluster_count(basis);
    part = cluster_bases(basis, n_clusters);
  }
  PosteriorFit fit = gibbs_fit(qstar, design, part, config);
  fit.method = method;
  fit.basis_grid = basis.grid;
  fit.basis_rows = basis.psi.leftCols(qstar.cols()).transpose();
  return fit;
}

}  // namespace

PosteriorFit fit_baseline(FitMethod method,
                          const std::vector<EmpiricalQuantileFunction>& subjects,
                          const QuantletBasis& basis,
                          const Eigen::MatrixXd& qstar,
                          const DesignMatrix& design, const GibbsConfig& config,
                          double epsilon, int n_clusters) {
  switch (method) {
    case FitMethod::QuantletSparse:
      return fit_quantlet_space(qstar, basis, design, config, method,
                                n_clusters);

    case FitMethod::QuantletFlat: {
      GibbsConfig flat = config;
      flat.flat_prior = true;
      return fit_quantlet_space(qstar, basis, design, flat, method,
                                n_clusters);
    }

    case FitMethod::GaussianOnly:
      return fit_quantlet_space(qstar.leftCols(2), basis, design, config,
                                method, n_clusters);

    case FitMethod::PcaBasis: {
      // mean function plus principal components covering 1 - epsilon of the
      // variance of the centered resampled quantile functions
      const Eigen::MatrixXd Q = resample_all(subjects, basis.grid);
      const Eigen::RowVectorXd mean_fun = Q.colwise().mean();
      const Eigen::MatrixXd centered = Q.rowwise() - mean_fun;
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(
          centered, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const Eigen::VectorXd sv2 = svd.singularValues().array().square();
      const double total = sv2.sum();
      int n_pc = 0;
      double acc = 0.0;
      while (n_pc < sv2.size() && acc < (1.0 - epsilon) * total)
        acc += sv2[n_pc++];
      n_pc = std::max(n_pc, 1);

      Eigen::MatrixXd columns(basis.grid.size(), n_pc + 1);
      columns.col(0) = mean_fun.transpose();
      columns.rightCols(n_pc) = svd.matrixV().leftCols(n_pc);
      // per-subject coefficients by least squares on [mean, PCs]
      const Eigen::MatrixXd coef =
          columns.colPivHouseholderQr().solve(Q.transpose()).transpose();

      Eigen::VectorXd variability(n_pc + 1);
      for (Eigen::Index k = 0; k <= n_pc; ++k) {
        const auto col = coef.col(k);
        variability[k] = (col.array() - col.mean()).square().sum();
      }
      ClusterPartition part =
          n_pc + 1 <= 2
              ? single_cluster(n_pc + 1)
              : cluster_from_variability(
                    variability, 1,
                    std::min(n_pc, n_clusters > 0 ? n_clusters : 3) + 1);

      PosteriorFit fit = gibbs_fit(coef, design, part, config);
      fit.method = method;
      fit.basis_grid = basis.grid;
      fit.basis_rows = columns.transpose();
      return fit;
    }

    case FitMethod::NaivePerP: {
      // separate conjugate regression for each grid point
      const Eigen::MatrixXd Q = resample_all(subjects, basis.grid);
      GibbsConfig flat = config;
      flat.flat_prior = true;
      PosteriorFit fit = gibbs_fit(
          Q, design, single_cluster(static_cast<int>(Q.cols())), flat);
      fit.method = method;
      fit.basis_grid = basis.grid;
      fit.moments_direct = false;
      // basis is the identity on the grid; kept implicit
      return fit;
    }

    case FitMethod::FeatureExtraction: {
      Eigen::MatrixXd feats(subjects.size(), 4);
      for (std::size_t i = 0; i < subjects.size(); ++i) {
        const MomentSummary ms =
            moments_of_qf(subjects[i].grid, subjects[i].values);
        feats(static_cast<Eigen::Index>(i), 0) = ms.mean;
        feats(static_cast<Eigen::Index>(i), 1) = std::sqrt(ms.variance);
        feats(static_cast<Eigen::Index>(i), 2) = ms.skewness.value_or(0.0);
        feats(static_cast<Eigen::Index>(i), 3) = ms.kurtosis.value_or(0.0);
      }
      GibbsConfig flat = config;
      flat.flat_prior = true;
      PosteriorFit fit = gibbs_fit(feats, design, single_cluster(4), flat);
      fit.method = method;
      fit.moments_direct = true;
      return fit;
    }
  }
  throw ConfigError("fit_baseline: unsupported method");
}

}  // namespace quantlets
