#pragma once

#include <Eigen/Dense>
#include <vector>

#include "quantlets/gibbs.hpp"

namespace quantlets {

struct FunctionalPosterior {
  Eigen::VectorXd grid;                // J inference grid
  std::vector<Eigen::MatrixXd> beta;   // M draws, each A x J

  int n_draws() const { return static_cast<int>(beta.size()); }
  Eigen::Index A() const { return beta.empty() ? 0 : beta[0].rows(); }
};

// Map coefficient-space draws to data-space functional coefficients on the
// requested grid (which must lie inside the basis support).
FunctionalPosterior to_data_space(const PosteriorFit& fit,
                                  const Eigen::VectorXd& grid);

struct BandSet {
  double alpha = 0.05;
  double q_joint = 0.0;  // (1-alpha) quantile of the max standardized deviation
  Eigen::VectorXd grid, mean, sd;
  Eigen::VectorXd pointwise_lo, pointwise_hi;
  Eigen::VectorXd joint_lo, joint_hi;
  int sd_zero_count = 0;  // grid points excluded from the max
};

BandSet joint_bands(const FunctionalPosterior& fp, int a, double alpha);

// Per-p minimum alpha at which zero leaves the joint band; floor 1/M.
Eigen::VectorXd simbas(const FunctionalPosterior& fp, int a);
double gbpv(const Eigen::VectorXd& simbas_curve);

struct MomentDraws {
  Eigen::VectorXd mean;      // M
  Eigen::VectorXd variance;  // M
  Eigen::VectorXd sd;        // M
  Eigen::VectorXd skewness;  // NaN where undefined
  Eigen::VectorXd kurtosis;
  int undefined_count = 0;
};

// Posterior draws of the distributional moments of the predicted quantile
// function at a covariate row.
MomentDraws conditional_moments(const FunctionalPosterior& fp,
                                const Eigen::VectorXd& x_row);
// Feature-extraction fits carry the moments directly.
MomentDraws conditional_moments_direct(const PosteriorFit& fit,
                                       const Eigen::VectorXd& x_row);

// Two-sided posterior probability score for a paired difference of draws;
// ties split evenly between the two sides.
double moment_prob_score(const Eigen::VectorXd& draws1,
                         const Eigen::VectorXd& draws2);

struct GaussianityScore {
  double mean = 0.0;
  double lo = 0.0, hi = 0.0;  // central 95% interval
  int excluded = 0;           // zero-denominator draws
  Eigen::VectorXd draws;
};

// Energy fraction of the predicted coefficient vector carried by the first
// two (Gaussian) quantlets.
GaussianityScore gaussianity_score(const PosteriorFit& fit,
                                   const Eigen::VectorXd& x_row);

struct PdfCdfTables {
  Eigen::VectorXd cdf_x, cdf_p;       // p vs posterior-mean predicted quantile
  Eigen::VectorXd pdf_x, pdf_value;   // density table on a delta-spaced grid
  int omitted = 0;                    // points with no valid finite difference
  bool degenerate = false;            // predicted quantile nearly constant
};

PdfCdfTables predicted_pdf_cdf(const FunctionalPosterior& fp,
                               const Eigen::VectorXd& x_row, double delta);

Eigen::VectorXd predicted_quantile_mean(const FunctionalPosterior& fp,
                                        const Eigen::VectorXd& x_row);

// Fraction of grid points whose running maximum exceeds the value by more
// than epsilon (0 for a monotone function).
double epsilon_monotonicity_violation(const Eigen::VectorXd& qhat,
                                      double epsilon);
// 1 - mean violation fraction across predicted rows.
double epsilon_monotonicity_rate(const std::vector<Eigen::VectorXd>& qhats,
                                 double epsilon);

}  // namespace quantlets
