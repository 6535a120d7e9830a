#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "quantlets/baselines.hpp"
#include "quantlets/errors.hpp"
#include "quantlets/inference.hpp"
#include "quantlets/rng.hpp"
#include "quantlets/simulate.hpp"
#include "quantlets/special.hpp"

using namespace quantlets;

namespace {

// compact gaussian cohort with a basis built end to end
struct Fixture {
  std::vector<EmpiricalQuantileFunction> subjects;
  DesignMatrix design;
  Dictionary dict;
  QuantletBasis basis;
  Eigen::MatrixXd qstar;

  Fixture() {
    const int per_group = 8, m = 257;
    const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(
        m, 1.0 / (m + 1.0), static_cast<double>(m) / (m + 1.0));
    Rng rng(71);
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(2 * per_group, 2);
    X.col(0).setOnes();
    for (int i = 0; i < 2 * per_group; ++i) {
      const int g = i / per_group;
      X(i, 1) = g;
      EmpiricalQuantileFunction q;
      q.subject_id = "s" + std::to_string(i);
      q.grid = grid;
      // group 0: N(0,1); group 1: N(2, 1.5^2), plus subject-level shift
      const double mu = (g == 0 ? 0.0 : 2.0) + 0.3 * rng.normal();
      const double sd = g == 0 ? 1.0 : 1.5;
      q.values = mu * Eigen::VectorXd::Ones(m) + sd * norm_quantile(grid);
      subjects.push_back(std::move(q));
    }
    design = make_design(X, {"intercept", "group2"});
    dict = make_dictionary(60, 0.5, 100.0, grid, 5);
    SelectionOptions opts;
    opts.cv_folds = 5;
    opts.path_length = 30;
    const auto sel = select_dictionary_elements(subjects, dict, opts, 2);
    const Eigen::VectorXi counts = union_counts(sel, dict.size());
    QuantletBuildOptions bopts;
    bopts.L = 256;
    basis = build_quantlet_basis(subjects, dict, counts, 4, 0.01, bopts);
    qstar = compute_all_coefficients(subjects, basis).qstar;
  }

  GibbsConfig mcmc(std::uint64_t seed) const {
    GibbsConfig c;
    c.iterations = 600;
    c.burn_in = 100;
    c.seed = seed;
    return c;
  }
};

double post_mean(const PosteriorFit& fit, int a, int k) {
  double acc = 0.0;
  for (const auto& B : fit.bstar) acc += B(a, k);
  return acc / fit.n_draws();
}

}  // namespace

TEST_CASE("every method produces a usable posterior") {
  Fixture fx;
  for (FitMethod m :
       {FitMethod::QuantletSparse, FitMethod::QuantletFlat,
        FitMethod::GaussianOnly, FitMethod::PcaBasis, FitMethod::NaivePerP,
        FitMethod::FeatureExtraction}) {
    const PosteriorFit fit = fit_baseline(m, fx.subjects, fx.basis, fx.qstar,
                                          fx.design, fx.mcmc(9));
    CHECK(fit.n_draws() == 600);
    CHECK(fit.method == m);
    if (m == FitMethod::FeatureExtraction) {
      CHECK(fit.moments_direct);
      Eigen::VectorXd x(2);
      x << 1.0, 1.0;
      const MomentDraws md = conditional_moments_direct(fit, x);
      CHECK(md.mean.mean() == doctest::Approx(2.0).epsilon(0.2));
      CHECK(md.sd.mean() == doctest::Approx(1.5).epsilon(0.1));
    } else {
      const FunctionalPosterior fp = to_data_space(fit, fx.basis.grid);
      CHECK(fp.n_draws() == 600);
      CHECK(fp.A() == 2);
    }
  }
}

TEST_CASE("gaussian-only agrees with the sparse fit on gaussian data") {
  Fixture fx;
  const PosteriorFit fe = fit_baseline(FitMethod::QuantletSparse, fx.subjects,
                                       fx.basis, fx.qstar, fx.design,
                                       fx.mcmc(4));
  const PosteriorFit ff = fit_baseline(FitMethod::GaussianOnly, fx.subjects,
                                       fx.basis, fx.qstar, fx.design,
                                       fx.mcmc(4));
  // same-seed comparison on the Gaussian-pair coefficients
  for (int a = 0; a < 2; ++a)
    for (int k = 0; k < 2; ++k)
      CHECK(post_mean(fe, a, k) ==
            doctest::Approx(post_mean(ff, a, k)).epsilon(0.15));
}

TEST_CASE("naive per-p posterior mean tracks the groupwise OLS fit") {
  Fixture fx;
  const PosteriorFit fb = fit_baseline(FitMethod::NaivePerP, fx.subjects,
                                       fx.basis, fx.qstar, fx.design,
                                       fx.mcmc(13));
  CHECK(fb.K() == fx.basis.grid.size());
  const FunctionalPosterior fp = to_data_space(fb, fx.basis.grid);
  // the intercept curve should match group-1's quantile function closely
  const Eigen::VectorXd b1 = predicted_quantile_mean(
      fp, Eigen::Vector2d(1.0, 0.0));
  const Eigen::VectorXd expected = norm_quantile(fx.basis.grid);
  CHECK((b1 - expected).cwiseAbs().maxCoeff() < 0.5);
}

TEST_CASE("pca fit covers the requested energy and stays linear") {
  Fixture fx;
  const PosteriorFit fc = fit_baseline(FitMethod::PcaBasis, fx.subjects,
                                       fx.basis, fx.qstar, fx.design,
                                       fx.mcmc(6), 0.01);
  CHECK(fc.basis_rows.rows() == fc.K());
  // linearity: data-space draws equal bstar * basis rows
  const FunctionalPosterior fp = to_data_space(fc, fx.basis.grid);
  const Eigen::MatrixXd direct = fc.bstar[0] * fc.basis_rows;
  CHECK((fp.beta[0] - direct).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("method A is rejected") {
  CHECK_THROWS_AS(fit_method_from_name('A'), ConfigError);
}
