#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "quantlets/design.hpp"
#include "quantlets/dictionary.hpp"
#include "quantlets/eqf.hpp"
#include "quantlets/gibbs.hpp"
#include "quantlets/quantlet_basis.hpp"
#include "quantlets/selection.hpp"

namespace quantlets {

// ---- generic helpers -------------------------------------------------------

// FNV-1a 64-bit hash of a file's bytes, hex encoded; used in artifact indexes.
std::string file_hash(const std::string& path);

void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

// Matrix CSV with a header row; first column optionally a string key.
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& col_names,
                      const std::vector<std::string>& row_keys = {},
                      const std::string& key_name = "");
Eigen::MatrixXd read_matrix_csv(const std::string& path,
                                std::vector<std::string>* col_names = nullptr,
                                std::vector<std::string>* row_keys = nullptr);

// ---- domain formats --------------------------------------------------------

// Long-format samples: header `subject_id,value`, one row per measurement.
std::vector<SampleSet> read_samples_csv(const std::string& path);
void write_samples_csv(const std::string& path,
                       const std::vector<SampleSet>& samples);

// Covariates: header `subject_id,<name1>,...`, one row per subject.
struct CovariateTable {
  std::vector<std::string> subject_ids;
  std::vector<std::string> names;
  Eigen::MatrixXd values;  // n x (#names)
};
CovariateTable read_covariates_csv(const std::string& path);

// Joins samples and covariates by subject id; prepends an intercept column
// unless one is present.  Errors name the offending subjects / rows.
std::pair<std::vector<SampleSet>, DesignMatrix> ingest(
    const std::string& samples_path, const std::string& covariates_path);

// selection manifest: subject_id,lambda,element_index (one row per element)
void write_selection_csv(const std::string& path,
                         const std::vector<SelectionResult>& selections);
std::vector<SelectionResult> read_selection_csv(const std::string& path,
                                                Eigen::Index n_elements);

// losslessness curve: C,K,rho_min,rho_mean
void write_curve_csv(const std::string& path, const LosslessnessCurve& curve);
LosslessnessCurve read_curve_csv(const std::string& path);

// dictionary: element CSV (index,kind,a,b) + JSON manifest (seed, bounds,
// k_over, grid) so the exact draws are reproducible
void write_dictionary(const std::string& csv_path,
                      const std::string& manifest_path, const Dictionary& d);

// quantlet basis: L x K matrix CSV + JSON manifest
void write_basis(const std::string& csv_path, const std::string& manifest_path,
                 const QuantletBasis& basis);
QuantletBasis read_basis(const std::string& csv_path,
                         const std::string& manifest_path);

// coefficients: n x K with subject_id key column
void write_coefficients_csv(const std::string& path,
                            const QuantletCoefficients& qc);

// posterior draws, long format: draw,a,k,value (plus sigma2 rows with a = -1)
void write_draws_csv(const std::string& path, const PosteriorFit& fit);
void write_fit(const std::string& draws_path, const std::string& config_path,
               const std::string& geweke_path, const PosteriorFit& fit);
PosteriorFit read_fit(const std::string& draws_path,
                      const std::string& config_path);

}  // namespace quantlets
