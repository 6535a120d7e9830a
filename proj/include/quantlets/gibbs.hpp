#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "quantlets/clustering.hpp"
#include "quantlets/design.hpp"

namespace quantlets {

enum class FitMethod {
  QuantletSparse,     // E: spike-slab on quantlet coefficients
  QuantletFlat,       // D: flat prior on quantlet coefficients
  GaussianOnly,       // F: first two quantlets only
  PcaBasis,           // C: principal-component basis
  NaivePerP,          // B: independent regression per grid point
  FeatureExtraction,  // G: per-subject moments regressed on X
};

const char* fit_method_name(FitMethod m);
FitMethod fit_method_from_name(char c);  // 'B'..'G'

struct GibbsConfig {
  int iterations = 2000;  // retained draws (before thinning)
  int burn_in = 200;
  int thin = 1;
  double nu0 = 0.006;
  std::uint64_t seed = 0;
  int threads = 0;
  bool flat_prior = false;  // pi = 1, tau^2 -> inf; plain conjugate draws
  // RNG stream identity per column; empty means column position.  Lets a
  // caller permute columns without changing any chain.
  std::vector<int> stream_ids;
};

// Posterior draws in coefficient space plus everything inference needs to map
// back to the data space.  `basis_rows` holds the basis functions evaluated on
// `basis_grid` (K x J); row k is psi_k.  For the feature-extraction method the
// "coefficients" are moment-regression coefficients and basis_rows is empty.
struct PosteriorFit {
  FitMethod method = FitMethod::QuantletSparse;
  std::vector<Eigen::MatrixXd> bstar;  // M draws, each A x K
  Eigen::MatrixXd sigma2;              // M x K
  std::vector<Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>>
      gamma;                           // M draws, A x K (sparse methods only)
  Eigen::MatrixXd pi_hat;              // M x (A*H) empirical-Bayes trajectory
  Eigen::MatrixXd gamma_hat;           // M x (A*H)
  GibbsConfig config;
  ClusterPartition partition;

  Eigen::VectorXd basis_grid;          // J
  Eigen::MatrixXd basis_rows;          // K x J
  bool moments_direct = false;         // method G

  int n_draws() const { return static_cast<int>(bstar.size()); }
  Eigen::Index A() const { return bstar.empty() ? 0 : bstar[0].rows(); }
  Eigen::Index K() const { return bstar.empty() ? 0 : bstar[0].cols(); }
};

// Gibbs sampler for the per-column regressions Q*_{.k} = X B*_{.k} + E*_{.k}
// with spike-slab priors and per-iteration empirical-Bayes hyperparameter
// updates.  Columns are conditionally independent and run on per-k RNG
// streams; the empirical-Bayes pooling happens at an iteration barrier.
PosteriorFit gibbs_fit(const Eigen::MatrixXd& qstar, const DesignMatrix& X,
                       const ClusterPartition& partition,
                       const GibbsConfig& config);

struct EbEstimates {
  Eigen::MatrixXd pi_hat;     // A x H, clamped away from 0/1
  Eigen::MatrixXd gamma_hat;  // A x H, >= 0
  Eigen::MatrixXd odds;       // A x K
  Eigen::MatrixXd gamma_post; // A x K, odds/(1+odds)
};

// Marginal-likelihood MLEs of (pi, Gamma) per (covariate, cluster) from the
// current inclusion indicators and standardized effect sizes.
EbEstimates empirical_bayes_update(const Eigen::MatrixXd& gamma,
                                   const Eigen::MatrixXd& zeta,
                                   const ClusterPartition& partition);

// Empirical Wasserstein-2 risk of coefficients B* against data Q* on a basis
// evaluated on a grid: tr[(Q* Psi - X B* Psi)(...)^T] scaled by the grid
// measure weights.
double wasserstein_risk(const Eigen::MatrixXd& qstar,
                        const Eigen::MatrixXd& X, const Eigen::MatrixXd& bstar,
                        const Eigen::MatrixXd& basis_rows,
                        const Eigen::VectorXd& grid);

// Geweke convergence z-score p-values per (a, k) chain of B* draws.
Eigen::MatrixXd geweke_pvalues(const PosteriorFit& fit);

}  // namespace quantlets
