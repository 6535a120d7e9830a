#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "quantlets/dictionary.hpp"
#include "quantlets/eqf.hpp"
#include "quantlets/selection.hpp"

namespace quantlets {

// Final orthonormal, denoised, standardized basis.  psi_1 is the constant,
// psi_2 the standardized Gaussian quantile; the rest are ordered by the share
// of total coefficient energy they carry in the training set.
struct QuantletBasis {
  Eigen::VectorXd grid;      // reference grid, L points in [delta, 1-delta]
  Eigen::MatrixXd psi;       // L x K quantlets
  Eigen::MatrixXd psi_perp;  // L x K orthogonal set before denoising (Phi)
  Eigen::MatrixXd dc;        // L x K selected dictionary columns (Pi), same order
  Eigen::VectorXd energies;  // per column, sums to 1, descending for k >= 3
  Eigen::VectorXd variability;  // diag(Phi Pi^T Pi Phi^T), prior clustering
  std::vector<int> element_index;      // dictionary element per column
  std::vector<int> dropped_dependent;  // dictionary indices lost in Gram-Schmidt
  std::vector<int> dropped_denoised;   // columns annihilated by denoising
  std::vector<int> cluster_labels;     // filled by the regression stage

  int threshold_c = 0;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  std::string source_hash;

  int K() const { return static_cast<int>(psi.cols()); }

  // Evaluate the quantlets at arbitrary p (linear interpolation): K x |p|.
  Eigen::MatrixXd evaluate(const Eigen::VectorXd& p) const;
};

struct QuantletBuildOptions {
  int L = 1024;         // reference grid size
  bool denoise = true;  // wavelet hard-threshold step
};

// D^C -> Gram-Schmidt -> energy order -> denoise -> re-standardize.
QuantletBasis build_quantlet_basis(
    const std::vector<EmpiricalQuantileFunction>& subjects,
    const Dictionary& dict, const Eigen::VectorXi& counts, int threshold_c,
    double epsilon, const QuantletBuildOptions& options = {});

// Energy shares E_k and the resulting permutation (identity on k = 1, 2;
// descending energy for k >= 3, ties broken by original position).
std::pair<Eigen::VectorXd, std::vector<int>> energy_order(
    const Eigen::MatrixXd& coefficients);

// Re-center and re-scale to mean 0 / norm 1 under the grid measure.
// Throws if the function has been annihilated (sigma < 1e-12).
Eigen::VectorXd restandardize(const GridMeasure& measure,
                              const Eigen::VectorXd& psi_dagger);

struct QuantletCoefficients {
  Eigen::MatrixXd qstar;               // n x K
  Eigen::VectorXd reconstruction_ccc;  // per subject
  std::vector<std::string> subject_ids;
  int ridge_jitter_count = 0;  // subjects needing the singularity fallback
};

// Q*_i = Q_i Psi_i^-, with Psi_i the basis evaluated on the subject's grid.
Eigen::VectorXd compute_coefficients(const EmpiricalQuantileFunction& q,
                                     const QuantletBasis& basis,
                                     double* reconstruction_ccc = nullptr,
                                     bool* ridge_warning = nullptr);

QuantletCoefficients compute_all_coefficients(
    const std::vector<EmpiricalQuantileFunction>& subjects,
    const QuantletBasis& basis, int threads = 0);

}  // namespace quantlets
