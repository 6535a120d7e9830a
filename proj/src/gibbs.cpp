#include "quantlets/gibbs.hpp"

#include <cmath>

#include "quantlets/errors.hpp"
#include "quantlets/parallel.hpp"
#include "quantlets/quadrature.hpp"
#include "quantlets/rng.hpp"
#include "quantlets/special.hpp"

namespace quantlets {

const char* fit_method_name(FitMethod m) {
  switch (m) {
    case FitMethod::QuantletSparse: return "E";
    case FitMethod::QuantletFlat: return "D";
    case FitMethod::GaussianOnly: return "F";
    case FitMethod::PcaBasis: return "C";
    case FitMethod::NaivePerP: return "B";
    case FitMethod::FeatureExtraction: return "G";
  }
  return "?";
}

FitMethod fit_method_from_name(char c) {
  switch (c) {
    case 'B': return FitMethod::NaivePerP;
    case 'C': return FitMethod::PcaBasis;
    case 'D': return FitMethod::QuantletFlat;
    case 'E': return FitMethod::QuantletSparse;
    case 'F': return FitMethod::GaussianOnly;
    case 'G': return FitMethod::FeatureExtraction;
  }
  throw ConfigError(std::string("unknown fit method '") + c +
                    "' (A is out of scope; use one of B C D E F G)");
}

EbEstimates empirical_bayes_update(const Eigen::MatrixXd& gamma,
                                   const Eigen::MatrixXd& zeta,
                                   const ClusterPartition& partition) {
  const Eigen::Index A = gamma.rows();
  const Eigen::Index K = gamma.cols();
  const int H = partition.n_clusters;
  const auto members = partition.members();

  EbEstimates eb;
  eb.pi_hat.resize(A, H);
  eb.gamma_hat.resize(A, H);
  eb.odds.resize(A, K);
  eb.gamma_post.resize(A, K);

  for (Eigen::Index a = 0; a < A; ++a) {
    for (int h = 0; h < H; ++h) {
      const auto& ks = members[h];
      const double size = static_cast<double>(ks.size());
      double sum_g = 0.0, sum_z2g = 0.0;
      for (int k : ks) {
        sum_g += gamma(a, k);
        sum_z2g += zeta(a, k) * zeta(a, k) * gamma(a, k);
      }
      const double lo = 1.0 / (2.0 * size);
      const double pi = std::min(std::max(sum_g / size, lo), 1.0 - lo);
      const double G = sum_g > 0.0 ? std::max(0.0, sum_z2g / sum_g - 1.0) : 0.0;
      eb.pi_hat(a, h) = pi;
      eb.gamma_hat(a, h) = G;
      for (int k : ks) {
        const double z2 = zeta(a, k) * zeta(a, k);
        const double log_odds = std::log(pi) - std::log1p(-pi) -
                                0.5 * std::log1p(G) +
                                0.5 * z2 * G / (1.0 + G);
        const double odds = std::exp(std::min(log_odds, 700.0));
        eb.odds(a, k) = odds;
        eb.gamma_post(a, k) = odds / (1.0 + odds);
      }
    }
  }
  return eb;
}

PosteriorFit gibbs_fit(const Eigen::MatrixXd& qstar, const DesignMatrix& design,
                       const ClusterPartition& partition,
                       const GibbsConfig& config) {
  const Eigen::Index n = qstar.rows();
  const Eigen::Index K = qstar.cols();
  const Eigen::Index A = design.A();
  const Eigen::MatrixXd& X = design.X;
  if (X.rows() != n) throw ValidationError("gibbs_fit: n mismatch");
  if (static_cast<Eigen::Index>(partition.label.size()) != K)
    throw ValidationError("gibbs_fit: partition size mismatch");
  if (config.iterations <= 0)
    throw ConfigError("gibbs_fit: iterations must be positive");
  if (config.thin <= 0) throw ConfigError("gibbs_fit: thin must be positive");

  // fixed per-column pieces
  const Eigen::MatrixXd xtx = X.transpose() * X;
  const Eigen::LLT<Eigen::MatrixXd> xtx_llt(xtx);
  const Eigen::MatrixXd bhat_ols = xtx_llt.solve(X.transpose() * qstar);
  Eigen::VectorXd sxx(A);
  for (Eigen::Index a = 0; a < A; ++a) sxx[a] = X.col(a).squaredNorm();
  Eigen::VectorXd sse(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const Eigen::VectorXd r = qstar.col(k) - X * bhat_ols.col(k);
    sse[k] = r.squaredNorm();
  }

  // state
  Eigen::MatrixXd B = bhat_ols;  // A x K
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Ones(A, K);
  Eigen::MatrixXd zeta = Eigen::MatrixXd::Zero(A, K);
  Eigen::VectorXd sigma2(K);
  for (Eigen::Index k = 0; k < K; ++k)
    sigma2[k] = std::max(sse[k] / std::max<double>(n - A, 1), 1e-12);
  // residual per column, kept in sync with B
  Eigen::MatrixXd resid = qstar - X * B;

  // initial empirical-Bayes state from the OLS standardized effects
  for (Eigen::Index k = 0; k < K; ++k)
    for (Eigen::Index a = 0; a < A; ++a)
      zeta(a, k) = bhat_ols(a, k) / std::sqrt(sigma2[k] / sxx[a]);
  EbEstimates eb = empirical_bayes_update(gamma, zeta, partition);

  if (!config.stream_ids.empty() &&
      static_cast<Eigen::Index>(config.stream_ids.size()) != K)
    throw ConfigError("gibbs_fit: stream_ids size mismatch");
  std::vector<Rng> streams;
  streams.reserve(K);
  Rng root = Rng::from_label(config.seed, "gibbs");
  for (Eigen::Index k = 0; k < K; ++k)
    streams.push_back(root.stream(
        config.stream_ids.empty() ? k : config.stream_ids[k]));

  PosteriorFit fit;
  fit.config = config;
  fit.partition = partition;
  const int total = config.burn_in + config.iterations;
  const int n_keep = config.iterations / config.thin;
  fit.bstar.reserve(n_keep);
  fit.gamma.reserve(n_keep);
  fit.sigma2.resize(n_keep, K);
  fit.pi_hat.resize(n_keep, A * partition.n_clusters);
  fit.gamma_hat.resize(n_keep, A * partition.n_clusters);

  const double shape = 0.5 * (config.nu0 + n);
  int kept = 0;
  for (int t = 0; t < total; ++t) {
    parallel_for(
        static_cast<std::size_t>(K),
        [&](std::size_t kz) {
          const Eigen::Index k = static_cast<Eigen::Index>(kz);
          Rng& rng = streams[kz];
          const double s2 =
              rng.inverse_gamma(shape, 0.5 * (config.nu0 + sse[k]));
          sigma2[k] = s2;
          if (!std::isfinite(s2) || s2 <= 0.0)
            throw ValidationError("gibbs_fit: non-finite sigma2 draw");
          auto r = resid.col(k);
          for (Eigen::Index a = 0; a < A; ++a) {
            // conditional least squares on the partial residual
            const double bold = B(a, k);
            const double bhat =
                (X.col(a).dot(r) + sxx[a] * bold) / sxx[a];
            const double V = s2 / sxx[a];
            const double z = bhat / std::sqrt(V);
            zeta(a, k) = z;
            double bnew = 0.0;
            double gnew = 1.0;
            if (config.flat_prior) {
              bnew = bhat + std::sqrt(V) * rng.normal();
            } else {
              const int h = partition.label[k];
              const double pi = eb.pi_hat(a, h);
              const double G = eb.gamma_hat(a, h);
              const double log_odds = std::log(pi) - std::log1p(-pi) -
                                      0.5 * std::log1p(G) +
                                      0.5 * z * z * G / (1.0 + G);
              const double alpha =
                  log_odds > 36.0 ? 1.0
                                  : 1.0 / (1.0 + std::exp(-log_odds));
              gnew = rng.uniform() < alpha ? 1.0 : 0.0;
              if (gnew > 0.0 && G > 0.0) {
                const double shrink = G / (1.0 + G);
                bnew = bhat * shrink +
                       std::sqrt(V * shrink) * rng.normal();
              } else {
                bnew = 0.0;
              }
            }
            if (bnew != bold) {
              r.noalias() -= X.col(a) * (bnew - bold);
              B(a, k) = bnew;
            }
            gamma(a, k) = gnew;
          }
        },
        config.threads);

    if (!config.flat_prior)
      eb = empirical_bayes_update(gamma, zeta, partition);

    if (t >= config.burn_in && (t - config.burn_in) % config.thin == 0 &&
        kept < n_keep) {
      fit.bstar.push_back(B);
      Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> g(A, K);
      for (Eigen::Index a = 0; a < A; ++a)
        for (Eigen::Index k = 0; k < K; ++k)
          g(a, k) = static_cast<std::uint8_t>(gamma(a, k));
      fit.gamma.push_back(std::move(g));
      fit.sigma2.row(kept) = sigma2.transpose();
      for (Eigen::Index a = 0; a < A; ++a)
        for (int h = 0; h < partition.n_clusters; ++h) {
          fit.pi_hat(kept, a * partition.n_clusters + h) = eb.pi_hat(a, h);
          fit.gamma_hat(kept, a * partition.n_clusters + h) =
              eb.gamma_hat(a, h);
        }
      ++kept;
    }
  }
  return fit;
}

double wasserstein_risk(const Eigen::MatrixXd& qstar,
                        const Eigen::MatrixXd& X, const Eigen::MatrixXd& bstar,
                        const Eigen::MatrixXd& basis_rows,
                        const Eigen::VectorXd& grid) {
  const Eigen::MatrixXd err = (qstar - X * bstar) * basis_rows;  // n x J
  const Eigen::VectorXd w = trapezoid_weights(grid);
  return (err.array().square().rowwise() * w.transpose().array()).sum();
}

Eigen::MatrixXd geweke_pvalues(const PosteriorFit& fit) {
  const int M = fit.n_draws();
  const Eigen::Index A = fit.A();
  const Eigen::Index K = fit.K();
  Eigen::MatrixXd p(A, K);
  const int na = std::max(1, M / 10), nb = std::max(1, M / 2);
  for (Eigen::Index a = 0; a < A; ++a) {
    for (Eigen::Index k = 0; k < K; ++k) {
      double ma = 0.0, mb = 0.0, va = 0.0, vb = 0.0;
      for (int m = 0; m < na; ++m) ma += fit.bstar[m](a, k);
      for (int m = M - nb; m < M; ++m) mb += fit.bstar[m](a, k);
      ma /= na;
      mb /= nb;
      for (int m = 0; m < na; ++m)
        va += std::pow(fit.bstar[m](a, k) - ma, 2);
      for (int m = M - nb; m < M; ++m)
        vb += std::pow(fit.bstar[m](a, k) - mb, 2);
      va /= std::max(1, na - 1);
      vb /= std::max(1, nb - 1);
      const double se = std::sqrt(va / na + vb / nb);
      if (se <= 0.0) {
        p(a, k) = 1.0;  // constant chain (fully spiked coefficient)
        continue;
      }
      const double z = (ma - mb) / se;
      p(a, k) = 2.0 * (1.0 - norm_cdf(std::fabs(z)));
    }
  }
  return p;
}

}  // namespace quantlets
