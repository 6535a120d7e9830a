#include "quantlets/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "quantlets/errors.hpp"
#include "quantlets/lasso.hpp"
#include "quantlets/parallel.hpp"

namespace quantlets {

namespace {

bool same_grid(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.size() == b.size() && a == b;
}

}  // namespace

std::vector<SelectionResult> select_dictionary_elements(
    const std::vector<EmpiricalQuantileFunction>& subjects,
    const Dictionary& dict, const SelectionOptions& options,
    std::uint64_t seed) {
  const std::size_t n = subjects.size();
  std::vector<SelectionResult> out(n);
  parallel_for(
      n,
      [&](std::size_t i) {
        const auto& q = subjects[i];
        const Eigen::MatrixXd design = same_grid(q.grid, dict.grid)
                                           ? dict.values
                                           : dict.evaluate(q.grid);
        const Eigen::VectorXd path =
            lambda_path(design, q.values, 2, options.path_length,
                        options.path_min_ratio);
        const CvChoice cv =
            cv_lambda(design, q.values, options.cv_folds, path, seed, 2);
        const LassoFit fit = lasso_fit(design, q.values, cv.lambda, 2);

        SelectionResult r;
        r.subject_id = q.subject_id;
        r.lambda = cv.lambda;
        r.convergence_warning = !fit.converged;
        r.coefficients = fit.beta;
        for (Eigen::Index k = 0; k < fit.beta.size(); ++k)
          if (fit.beta[k] != 0.0) r.selected.push_back(static_cast<int>(k));
        out[i] = std::move(r);
      },
      options.threads);
  return out;
}

Eigen::VectorXi union_counts(const std::vector<SelectionResult>& selections,
                             Eigen::Index n_elements) {
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(n_elements);
  for (const auto& s : selections)
    for (int k : s.selected) counts[k] += 1;
  return counts;
}

// Lin's concordance: 2 Cov / (Var_f + Var_g + (E_f - E_g)^2), so a perfect
// reconstruction scores 1 and a bare mean fit scores 0.
double concordance_ccc(const GridMeasure& measure, const Eigen::VectorXd& f,
                       const Eigen::VectorXd& g) {
  const double cov = measure.covariance(f, g);
  const double vf = measure.variance(f);
  const double vg = measure.variance(g);
  const double dm = measure.mean(f) - measure.mean(g);
  const double denom = vf + vg + dm * dm;
  if (denom <= 0.0) return 1.0;  // both constant and equal in mean
  return 2.0 * cov / denom;
}

namespace {

// weighted LS projection of y onto the given columns; returns fitted values
Eigen::VectorXd wls_projection(const GridMeasure& measure,
                               const Eigen::MatrixXd& columns,
                               const Eigen::VectorXd& y) {
  const Eigen::VectorXd sqw = measure.weights().array().sqrt();
  const Eigen::MatrixXd Xw = sqw.asDiagonal() * columns;
  const Eigen::VectorXd yw = sqw.asDiagonal() * y;
  const Eigen::VectorXd coef = Xw.colPivHouseholderQr().solve(yw);
  return columns * coef;
}

}  // namespace

double loo_ccc(int subject_index, int threshold,
               const std::vector<SelectionResult>& selections,
               const Dictionary& dict,
               const std::vector<EmpiricalQuantileFunction>& subjects) {
  const auto& q = subjects[subject_index];
  Eigen::VectorXi counts = union_counts(selections, dict.size());
  for (int k : selections[subject_index].selected) counts[k] -= 1;

  std::vector<int> keep = {0, 1};  // Gaussian pair always present
  for (Eigen::Index k = 2; k < dict.size(); ++k)
    if (counts[k] >= threshold) keep.push_back(static_cast<int>(k));

  const Eigen::MatrixXd all = same_grid(q.grid, dict.grid)
                                  ? dict.values
                                  : dict.evaluate(q.grid);
  Eigen::MatrixXd columns(q.grid.size(), keep.size());
  for (std::size_t j = 0; j < keep.size(); ++j)
    columns.col(j) = all.col(keep[j]);

  const GridMeasure measure(q.grid);
  return concordance_ccc(measure, q.values,
                         wls_projection(measure, columns, q.values));
}

LosslessnessCurve losslessness_curve(
    const std::vector<SelectionResult>& selections, const Dictionary& dict,
    const std::vector<EmpiricalQuantileFunction>& subjects, int threads) {
  const int n = static_cast<int>(subjects.size());
  if (n < 2) throw ValidationError("losslessness_curve: need >= 2 subjects");
  const Eigen::VectorXi counts = union_counts(selections, dict.size());

  LosslessnessCurve curve;
  for (int c = 1; c <= n - 1; ++c) {
    curve.threshold.push_back(c);
    int k = 2;
    for (Eigen::Index e = 2; e < dict.size(); ++e)
      if (counts[e] >= c) ++k;
    curve.k_c.push_back(k);
  }

  // rho_(i)(C) for all C in one pass per subject: as C decreases the basis
  // only grows, so orthogonalize columns incrementally (most-selected first)
  // and track the projection residual of Q_i.
  Eigen::MatrixXd rho(n, n - 1);
  parallel_for(
      static_cast<std::size_t>(n),
      [&](std::size_t i) {
        const auto& q = subjects[i];
        Eigen::VectorXi cx = counts;
        for (int k : selections[i].selected) cx[k] -= 1;

        std::vector<int> order;  // beta elements with count >= 1, count desc
        for (Eigen::Index e = 2; e < dict.size(); ++e)
          if (cx[e] >= 1) order.push_back(static_cast<int>(e));
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return cx[a] > cx[b]; });

        const Eigen::MatrixXd all = same_grid(q.grid, dict.grid)
                                        ? dict.values
                                        : dict.evaluate(q.grid);
        const GridMeasure measure(q.grid);
        const Eigen::VectorXd w = measure.weights();

        // start from the Gaussian pair, orthonormal under the grid measure
        std::vector<Eigen::VectorXd> basis;
        auto add_column = [&](const Eigen::VectorXd& col) {
          Eigen::VectorXd v = col;
          for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : basis)
              v -= (w.array() * v.array() * b.array()).sum() * b;
          const double nrm = std::sqrt((w.array() * v.array().square()).sum());
          if (nrm > 1e-10) basis.push_back(v / nrm);
        };
        add_column(all.col(0));
        add_column(all.col(1));

        Eigen::VectorXd residual = q.values;
        for (const auto& b : basis)
          residual -= (w.array() * residual.array() * b.array()).sum() * b;

        const double var_q = measure.variance(q.values);
        const double mean_q = measure.mean(q.values);
        auto ccc_from_residual = [&]() {
          // projection includes the constant, so the fit preserves the mean
          const Eigen::VectorXd proj = q.values - residual;
          const double vp = measure.variance(proj);
          const double cov = measure.covariance(q.values, proj);
          const double dm = mean_q - measure.mean(proj);
          const double denom = var_q + vp + dm * dm;
          return denom <= 0.0 ? 1.0 : 2.0 * cov / denom;
        };

        std::size_t next = 0;
        for (int c = n - 1; c >= 1; --c) {
          while (next < order.size() && cx[order[next]] >= c) {
            const std::size_t before = basis.size();
            add_column(all.col(order[next]));
            if (basis.size() > before) {
              const auto& b = basis.back();
              residual -=
                  (w.array() * residual.array() * b.array()).sum() * b;
            }
            ++next;
          }
          rho(static_cast<Eigen::Index>(i), c - 1) = ccc_from_residual();
        }
      },
      threads);

  for (int c = 1; c <= n - 1; ++c) {
    curve.rho_min.push_back(rho.col(c - 1).minCoeff());
    curve.rho_mean.push_back(rho.col(c - 1).mean());
  }
  return curve;
}

ThresholdChoice choose_threshold(const LosslessnessCurve& curve,
                                 double epsilon) {
  if (curve.threshold.empty())
    throw ValidationError("choose_threshold: empty curve");
  int best = -1;
  for (std::size_t i = 0; i < curve.threshold.size(); ++i) {
    if (curve.rho_min[i] > 1.0 - epsilon &&
        (best < 0 || curve.threshold[i] > curve.threshold[best]))
      best = static_cast<int>(i);
  }
  ThresholdChoice choice;
  choice.fallback_warning = best < 0;
  if (best < 0) best = 0;  // C = 1 fallback
  choice.threshold = curve.threshold[best];
  choice.k_c = curve.k_c[best];
  choice.rho_min = curve.rho_min[best];
  return choice;
}

}  // namespace quantlets
