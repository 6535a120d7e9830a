#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "quantlets/gibbs.hpp"
#include "quantlets/rng.hpp"

using namespace quantlets;

namespace {

DesignMatrix four_group_design(int per_group) {
  const int n = 4 * per_group;
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, 4);
  X.col(0).setOnes();
  for (int g = 1; g < 4; ++g) X.block(g * per_group, g, per_group, 1).setOnes();
  return make_design(X, {"intercept", "g2", "g3", "g4"});
}

struct Synthetic {
  DesignMatrix design = four_group_design(12);
  Eigen::MatrixXd btrue;  // 4 x K
  Eigen::MatrixXd qstar;  // n x K
  double noise_sd = 0.3;

  explicit Synthetic(int K = 6, std::uint64_t seed = 99) {
    Rng rng(seed);
    btrue.resize(4, K);
    for (int a = 0; a < 4; ++a)
      for (int k = 0; k < K; ++k)
        btrue(a, k) = (rng.uniform() < 0.4) ? 0.0 : rng.uniform(-2, 2);
    qstar = design.X * btrue;
    for (Eigen::Index i = 0; i < qstar.rows(); ++i)
      for (int k = 0; k < K; ++k) qstar(i, k) += noise_sd * rng.normal();
  }
};

ClusterPartition two_clusters(int K) {
  ClusterPartition p;
  p.label.assign(K, 1);
  p.label[0] = 0;
  p.label[1] = 0;
  p.n_clusters = 2;
  p.variability = Eigen::VectorXd::Ones(K);
  return p;
}

}  // namespace

TEST_CASE("empirical bayes closed-form cases") {
  ClusterPartition part = two_clusters(4);
  Eigen::MatrixXd gamma(1, 4), zeta(1, 4);

  // all gamma = 1, all zeta^2 = 4 in both clusters
  gamma.setOnes();
  zeta.setConstant(2.0);
  const EbEstimates eb = empirical_bayes_update(gamma, zeta, part);
  CHECK(eb.gamma_hat(0, 0) == doctest::Approx(3.0));
  CHECK(eb.gamma_hat(0, 1) == doctest::Approx(3.0));
  CHECK(eb.pi_hat(0, 0) == doctest::Approx(1.0 - 1.0 / 4.0));  // clamped
  CHECK(eb.pi_hat(0, 1) == doctest::Approx(1.0 - 1.0 / 4.0));

  // all gamma = 0: slab collapses, pi at the lower clamp
  gamma.setZero();
  const EbEstimates eb0 = empirical_bayes_update(gamma, zeta, part);
  CHECK(eb0.gamma_hat(0, 0) == 0.0);
  CHECK(eb0.pi_hat(0, 0) == doctest::Approx(1.0 / 4.0));

  // mixed cluster, hand computation of the odds
  gamma << 1, 0, 1, 1;
  zeta << 1.5, 0.4, -2.0, 0.7;
  const EbEstimates ebm = empirical_bayes_update(gamma, zeta, part);
  {
    // cluster 0 = {0, 1}: pi = clamp(1/2) = 1/2, G = max(0, 2.25/1 - 1)
    const double pi = 0.5, G = 1.25;
    CHECK(ebm.pi_hat(0, 0) == doctest::Approx(pi));
    CHECK(ebm.gamma_hat(0, 0) == doctest::Approx(G));
    const double z2 = 1.5 * 1.5;
    const double odds = pi / (1 - pi) / std::sqrt(1 + G) *
                        std::exp(0.5 * z2 * G / (1 + G));
    CHECK(ebm.odds(0, 0) == doctest::Approx(odds).epsilon(1e-12));
    CHECK(ebm.gamma_post(0, 0) ==
          doctest::Approx(odds / (1 + odds)).epsilon(1e-12));
  }
  {
    // cluster 1 = {2, 3}: pi = clamp(1) = 3/4, G = (4 + 0.49)/2 - 1
    const double pi = 0.75, G = (4.0 + 0.49) / 2.0 - 1.0;
    CHECK(ebm.pi_hat(0, 1) == doctest::Approx(pi));
    CHECK(ebm.gamma_hat(0, 1) == doctest::Approx(G).epsilon(1e-12));
    const double z2 = 0.49;
    const double odds = pi / (1 - pi) / std::sqrt(1 + G) *
                        std::exp(0.5 * z2 * G / (1 + G));
    CHECK(ebm.odds(0, 3) == doctest::Approx(odds).epsilon(1e-12));
  }
}

TEST_CASE("flat prior posterior mean equals OLS within 3 MC SEs") {
  Synthetic s;
  GibbsConfig cfg;
  cfg.iterations = 3000;
  cfg.burn_in = 200;
  cfg.seed = 5;
  cfg.flat_prior = true;
  const PosteriorFit fit =
      gibbs_fit(s.qstar, s.design, two_clusters(6), cfg);

  const Eigen::MatrixXd ols =
      (s.design.X.transpose() * s.design.X)
          .ldlt()
          .solve(s.design.X.transpose() * s.qstar);
  for (int a = 0; a < 4; ++a) {
    for (int k = 0; k < 6; ++k) {
      double mean = 0.0, var = 0.0;
      for (const auto& B : fit.bstar) mean += B(a, k);
      mean /= fit.n_draws();
      for (const auto& B : fit.bstar) var += std::pow(B(a, k) - mean, 2);
      var /= fit.n_draws() - 1;
      const double mcse = std::sqrt(var / fit.n_draws());
      CHECK(std::fabs(mean - ols(a, k)) <= 3.0 * mcse + 1e-9);
    }
  }
}

TEST_CASE("spike consistency: gamma = 0 implies a zero draw") {
  Synthetic s;
  GibbsConfig cfg;
  cfg.iterations = 400;
  cfg.burn_in = 100;
  cfg.seed = 17;
  const PosteriorFit fit = gibbs_fit(s.qstar, s.design, two_clusters(6), cfg);
  REQUIRE(fit.gamma.size() == fit.bstar.size());
  for (std::size_t m = 0; m < fit.bstar.size(); ++m)
    for (int a = 0; a < 4; ++a)
      for (int k = 0; k < 6; ++k)
        if (fit.gamma[m](a, k) == 0) CHECK(fit.bstar[m](a, k) == 0.0);
}

TEST_CASE("sigma2 chain is positive and near the OLS residual variance") {
  Synthetic s;
  GibbsConfig cfg;
  cfg.iterations = 1500;
  cfg.burn_in = 200;
  cfg.seed = 23;
  const PosteriorFit fit = gibbs_fit(s.qstar, s.design, two_clusters(6), cfg);
  CHECK((fit.sigma2.array() > 0.0).all());
  const double truth = s.noise_sd * s.noise_sd;
  for (int k = 0; k < 6; ++k) {
    const double mean = fit.sigma2.col(k).mean();
    CHECK(mean > 0.5 * truth);
    CHECK(mean < 2.0 * truth);
  }
}

TEST_CASE("posterior mean within 2 posterior SDs of the truth") {
  Synthetic s(6, 1234);
  GibbsConfig cfg;
  cfg.iterations = 2000;
  cfg.burn_in = 200;
  cfg.seed = 7;
  const PosteriorFit fit = gibbs_fit(s.qstar, s.design, two_clusters(6), cfg);
  for (int a = 0; a < 4; ++a) {
    for (int k = 0; k < 6; ++k) {
      double mean = 0.0, var = 0.0;
      for (const auto& B : fit.bstar) mean += B(a, k);
      mean /= fit.n_draws();
      for (const auto& B : fit.bstar) var += std::pow(B(a, k) - mean, 2);
      var /= fit.n_draws() - 1;
      const double sd = std::sqrt(var);
      CHECK(std::fabs(mean - s.btrue(a, k)) <= 2.0 * sd + 0.15);
    }
  }
}

TEST_CASE("intercept-only design recovers the column means") {
  Rng rng(2);
  Eigen::MatrixXd q(50, 3);
  for (int i = 0; i < 50; ++i)
    for (int k = 0; k < 3; ++k) q(i, k) = 2.0 * k + 0.3 * rng.normal();
  DesignMatrix d = make_design(Eigen::MatrixXd::Ones(50, 1), {"intercept"});
  GibbsConfig cfg;
  cfg.iterations = 1000;
  cfg.burn_in = 100;
  cfg.seed = 3;
  const PosteriorFit fit = gibbs_fit(q, d, single_cluster(3), cfg);
  for (int k = 0; k < 3; ++k) {
    double mean = 0.0;
    for (const auto& B : fit.bstar) mean += B(0, k);
    mean /= fit.n_draws();
    CHECK(mean == doctest::Approx(q.col(k).mean()).epsilon(0.05));
  }
}

TEST_CASE("fixed seed reproduces the draws; column permutation is neutral") {
  Synthetic s;
  GibbsConfig cfg;
  cfg.iterations = 200;
  cfg.burn_in = 50;
  cfg.seed = 31;
  const ClusterPartition part = two_clusters(6);
  const PosteriorFit f1 = gibbs_fit(s.qstar, s.design, part, cfg);
  const PosteriorFit f2 = gibbs_fit(s.qstar, s.design, part, cfg);
  REQUIRE(f1.n_draws() == f2.n_draws());
  for (int m = 0; m < f1.n_draws(); ++m)
    CHECK((f1.bstar[m] - f2.bstar[m]).cwiseAbs().maxCoeff() == 0.0);

  // permute the columns, labels and stream ids: identical draws, permuted
  std::vector<int> perm = {3, 0, 5, 1, 4, 2};
  Eigen::MatrixXd qp(s.qstar.rows(), 6);
  ClusterPartition pp = part;
  GibbsConfig cfgp = cfg;
  cfgp.stream_ids.resize(6);
  for (int j = 0; j < 6; ++j) {
    qp.col(j) = s.qstar.col(perm[j]);
    pp.label[j] = part.label[perm[j]];
    cfgp.stream_ids[j] = perm[j];
  }
  // identical up to float summation order inside the EB cluster pooling
  const PosteriorFit f3 = gibbs_fit(qp, s.design, pp, cfgp);
  for (int m = 0; m < f1.n_draws(); ++m)
    for (int j = 0; j < 6; ++j)
      CHECK((f3.bstar[m].col(j) - f1.bstar[m].col(perm[j]))
                .cwiseAbs()
                .maxCoeff() < 1e-12);
}

TEST_CASE("config guards") {
  Synthetic s;
  GibbsConfig cfg;
  cfg.iterations = 0;
  CHECK_THROWS(gibbs_fit(s.qstar, s.design, two_clusters(6), cfg));
}

TEST_CASE("geweke p-values are in range") {
  Synthetic s;
  GibbsConfig cfg;
  cfg.iterations = 500;
  cfg.burn_in = 100;
  cfg.seed = 77;
  const PosteriorFit fit = gibbs_fit(s.qstar, s.design, two_clusters(6), cfg);
  const Eigen::MatrixXd p = geweke_pvalues(fit);
  CHECK((p.array() >= 0.0).all());
  CHECK((p.array() <= 1.0).all());
}
