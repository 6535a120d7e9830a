#include "quantlets/quantlet_basis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "quantlets/errors.hpp"
#include "quantlets/gram_schmidt.hpp"
#include "quantlets/parallel.hpp"
#include "quantlets/wavelet.hpp"

namespace quantlets {

Eigen::MatrixXd QuantletBasis::evaluate(const Eigen::VectorXd& p) const {
  Eigen::MatrixXd out(psi.cols(), p.size());
  for (Eigen::Index k = 0; k < psi.cols(); ++k)
    out.row(k) = interp1(grid, psi.col(k), p).transpose();
  return out;
}

std::pair<Eigen::VectorXd, std::vector<int>> energy_order(
    const Eigen::MatrixXd& coefficients) {
  const Eigen::Index K = coefficients.cols();
  Eigen::VectorXd energy = coefficients.array().square().colwise().sum();
  const double total = energy.sum();
  if (total > 0.0) energy /= total;

  std::vector<int> perm(K);
  std::iota(perm.begin(), perm.end(), 0);
  if (K > 2) {
    std::stable_sort(perm.begin() + 2, perm.end(), [&](int a, int b) {
      return energy[a] > energy[b];
    });
  }
  return {energy, perm};
}

Eigen::VectorXd restandardize(const GridMeasure& measure,
                              const Eigen::VectorXd& psi_dagger) {
  const double mu = measure.mean(psi_dagger);
  const double sigma = std::sqrt(measure.variance(psi_dagger));
  if (sigma < 1e-12)
    throw ValidationError("restandardize: function annihilated by denoising");
  return (psi_dagger.array() - mu) / sigma;
}

QuantletBasis build_quantlet_basis(
    const std::vector<EmpiricalQuantileFunction>& subjects,
    const Dictionary& dict, const Eigen::VectorXi& counts, int threshold_c,
    double epsilon, const QuantletBuildOptions& options) {
  if (subjects.empty())
    throw ValidationError("build_quantlet_basis: no subjects");

  QuantletBasis basis;
  basis.threshold_c = threshold_c;
  basis.epsilon = epsilon;
  basis.seed = dict.seed;

  double delta = 0.0;
  for (const auto& q : subjects) delta = std::max(delta, q.delta());
  basis.grid = probability_grid(options.L, delta);
  const GridMeasure measure(basis.grid);

  // reduced set D^C: Gaussian pair + elements selected by >= C subjects
  std::vector<int> keep = {0, 1};
  for (Eigen::Index k = 2; k < dict.size(); ++k)
    if (counts[k] >= threshold_c) keep.push_back(static_cast<int>(k));

  const Eigen::MatrixXd all = dict.evaluate(basis.grid);
  Eigen::MatrixXd dc(basis.grid.size(), keep.size());
  for (std::size_t j = 0; j < keep.size(); ++j) dc.col(j) = all.col(keep[j]);
  // the pair enters orthonormal under the grid measure so Gram-Schmidt
  // leaves it untouched (psi_2 is the standardized Gaussian quantile)
  dc.col(1) = restandardize(measure, dc.col(1));

  GramSchmidtResult gs = gram_schmidt(measure, dc);
  for (int d : gs.dropped) basis.dropped_dependent.push_back(keep[d]);

  // empirical coefficients of the training subjects on the orthogonal set
  Eigen::MatrixXd coef(subjects.size(), gs.q.cols());
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    const Eigen::VectorXd qi = resample_to_grid(subjects[i], basis.grid);
    for (Eigen::Index k = 0; k < gs.q.cols(); ++k)
      coef(static_cast<Eigen::Index>(i), k) = measure.inner(qi, gs.q.col(k));
  }
  auto [energy, perm] = energy_order(coef);

  const Eigen::Index K0 = gs.q.cols();
  Eigen::MatrixXd psi_perp(basis.grid.size(), K0);
  Eigen::MatrixXd dc_kept(basis.grid.size(), K0);
  Eigen::VectorXd energy_sorted(K0);
  std::vector<int> element_index(K0);
  for (Eigen::Index k = 0; k < K0; ++k) {
    psi_perp.col(k) = gs.q.col(perm[k]);
    dc_kept.col(k) = dc.col(gs.kept[perm[k]]);
    energy_sorted[k] = energy[perm[k]];
    element_index[k] = keep[gs.kept[perm[k]]];
  }

  // denoise and re-standardize the k >= 3 columns; the Gaussian pair is
  // analytically smooth and stays exact
  Eigen::MatrixXd psi = psi_perp;
  if (options.denoise && K0 > 2) {
    parallel_for(static_cast<std::size_t>(K0 - 2), [&](std::size_t i) {
      const Eigen::Index k = static_cast<Eigen::Index>(i) + 2;
      psi.col(k) = wavelet_denoise(psi_perp.col(k));
    });
  }
  std::vector<Eigen::Index> final_cols;
  for (Eigen::Index k = 0; k < K0; ++k) {
    if (k < 2) {
      final_cols.push_back(k);
      continue;
    }
    const double sigma = std::sqrt(measure.variance(psi.col(k)));
    if (sigma < 1e-12) {
      basis.dropped_denoised.push_back(element_index[k]);
      continue;
    }
    psi.col(k) = restandardize(measure, psi.col(k));
    final_cols.push_back(k);
  }

  const Eigen::Index K = static_cast<Eigen::Index>(final_cols.size());
  basis.psi.resize(basis.grid.size(), K);
  basis.psi_perp.resize(basis.grid.size(), K);
  basis.dc.resize(basis.grid.size(), K);
  basis.energies.resize(K);
  basis.element_index.resize(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    basis.psi.col(k) = psi.col(final_cols[k]);
    basis.psi_perp.col(k) = psi_perp.col(final_cols[k]);
    basis.dc.col(k) = dc_kept.col(final_cols[k]);
    basis.energies[k] = energy_sorted[final_cols[k]];
    basis.element_index[k] = element_index[final_cols[k]];
  }
  basis.variability =
      (basis.psi_perp.transpose() * basis.dc).rowwise().squaredNorm();
  return basis;
}

Eigen::VectorXd compute_coefficients(const EmpiricalQuantileFunction& q,
                                     const QuantletBasis& basis,
                                     double* reconstruction_ccc,
                                     bool* ridge_warning) {
  const int K = basis.K();
  if (K >= q.m())
    throw ValidationError(
        "compute_coefficients: K >= m_i (sparse-data case is unsupported)");

  const bool same_grid =
      q.grid.size() == basis.grid.size() && q.grid == basis.grid;
  const Eigen::MatrixXd Psi =
      same_grid ? basis.psi.transpose() : basis.evaluate(q.grid);
  Eigen::MatrixXd gram = Psi * Psi.transpose();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  const Eigen::VectorXd rhs = Psi * q.values;
  Eigen::VectorXd coef = ldlt.solve(rhs);
  const double rel_err =
      (gram * coef - rhs).norm() / std::max(rhs.norm(), 1e-300);
  bool jittered = false;
  if (ldlt.info() != Eigen::Success || rel_err > 1e-8) {
    gram.diagonal().array() += 1e-10;
    coef = gram.ldlt().solve(rhs);
    jittered = true;
  }
  if (ridge_warning) *ridge_warning = jittered;
  if (reconstruction_ccc) {
    const GridMeasure measure(q.grid);
    *reconstruction_ccc =
        concordance_ccc(measure, q.values, Psi.transpose() * coef);
  }
  return coef;
}

QuantletCoefficients compute_all_coefficients(
    const std::vector<EmpiricalQuantileFunction>& subjects,
    const QuantletBasis& basis, int threads) {
  QuantletCoefficients out;
  const std::size_t n = subjects.size();
  out.qstar.resize(n, basis.K());
  out.reconstruction_ccc.resize(n);
  out.subject_ids.resize(n);
  std::vector<char> jitter(n, 0);
  parallel_for(
      n,
      [&](std::size_t i) {
        double ccc = 0.0;
        bool warn = false;
        out.qstar.row(static_cast<Eigen::Index>(i)) =
            compute_coefficients(subjects[i], basis, &ccc, &warn).transpose();
        out.reconstruction_ccc[static_cast<Eigen::Index>(i)] = ccc;
        out.subject_ids[i] = subjects[i].subject_id;
        jitter[i] = warn ? 1 : 0;
      },
      threads);
  out.ridge_jitter_count =
      static_cast<int>(std::count(jitter.begin(), jitter.end(), 1));
  return out;
}

}  // namespace quantlets
