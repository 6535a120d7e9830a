#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "quantlets/dictionary.hpp"
#include "quantlets/eqf.hpp"
#include "quantlets/quadrature.hpp"

namespace quantlets {

struct SelectionResult {
  std::string subject_id;
  double lambda = 0.0;
  bool convergence_warning = false;
  std::vector<int> selected;     // dictionary indices with nonzero coefficient
  Eigen::VectorXd coefficients;  // dense, one entry per dictionary element
};

struct SelectionOptions {
  int cv_folds = 10;
  int path_length = 100;
  double path_min_ratio = 1e-4;
  int threads = 0;
};

// Per-subject sparse selection: CV-chosen lambda then a full-data fit.
// The dictionary is re-evaluated on each subject's own grid when it differs
// from the construction grid.
std::vector<SelectionResult> select_dictionary_elements(
    const std::vector<EmpiricalQuantileFunction>& subjects,
    const Dictionary& dict, const SelectionOptions& options,
    std::uint64_t seed);

// c_k = number of subjects whose fit kept element k.
Eigen::VectorXi union_counts(const std::vector<SelectionResult>& selections,
                             Eigen::Index n_elements);

// Concordance correlation of f with g under the grid measure (Eq.-style:
// Cov / (Var_f + Var_g + (E_f - E_g)^2)); 1 iff g reproduces f exactly.
double concordance_ccc(const GridMeasure& measure, const Eigen::VectorXd& f,
                       const Eigen::VectorXd& g);

// Leave-one-out concordance for subject i at count threshold C: weighted
// least-squares projection of Q_i onto the elements selected by at least C of
// the other subjects (plus the Gaussian pair, always).
double loo_ccc(int subject_index, int threshold,
               const std::vector<SelectionResult>& selections,
               const Dictionary& dict,
               const std::vector<EmpiricalQuantileFunction>& subjects);

struct LosslessnessCurve {
  std::vector<int> threshold;  // C = 1..n-1
  std::vector<int> k_c;        // reduced-set size at C, Gaussian pair included
  std::vector<double> rho_min;
  std::vector<double> rho_mean;
};

// Full curve over C = 1..n-1, computed per subject by incrementally growing
// the orthogonalized basis as C decreases (equivalent to loo_ccc pointwise).
LosslessnessCurve losslessness_curve(
    const std::vector<SelectionResult>& selections, const Dictionary& dict,
    const std::vector<EmpiricalQuantileFunction>& subjects, int threads = 0);

struct ThresholdChoice {
  int threshold = 1;
  int k_c = 2;
  double rho_min = 0.0;
  bool fallback_warning = false;  // no C satisfied the near-lossless bound
};

// Largest C (sparsest basis) with rho^0 > 1 - epsilon; falls back to C = 1.
ThresholdChoice choose_threshold(const LosslessnessCurve& curve,
                                 double epsilon = 0.01);

}  // namespace quantlets
