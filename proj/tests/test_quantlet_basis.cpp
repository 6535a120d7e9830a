#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "quantlets/errors.hpp"
#include "quantlets/quantlet_basis.hpp"
#include "quantlets/rng.hpp"
#include "quantlets/special.hpp"

using namespace quantlets;

namespace {

struct Fixture {
  Dictionary dict;
  std::vector<EmpiricalQuantileFunction> subjects;
  Eigen::VectorXi counts;
  QuantletBasis basis;

  explicit Fixture(int n = 10, int m = 513, int L = 256) {
    const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(
        m, 1.0 / (m + 1.0), static_cast<double>(m) / (m + 1.0));
    dict = make_dictionary(30, 0.5, 80.0, grid, 7);
    Rng rng(55);
    counts = Eigen::VectorXi::Zero(dict.size());
    for (int i = 0; i < n; ++i) {
      EmpiricalQuantileFunction q;
      q.subject_id = "s" + std::to_string(i);
      q.grid = grid;
      q.values = rng.uniform(-1, 1) * Eigen::VectorXd::Ones(m) +
                 rng.uniform(0.8, 1.5) * norm_quantile(grid) +
                 0.4 * dict.values.col(2 + (i % 4));
      std::sort(q.values.begin(), q.values.end());
      subjects.push_back(std::move(q));
      counts[2 + (i % 4)] += 1;
    }
    QuantletBuildOptions opts;
    opts.L = L;
    basis = build_quantlet_basis(subjects, dict, counts, 2, 0.01, opts);
  }
};

}  // namespace

TEST_CASE("basis invariants: psi1 constant, psi2 standardized gaussian, rest") {
  Fixture fx;
  const GridMeasure measure(fx.basis.grid);
  REQUIRE(fx.basis.K() >= 3);

  CHECK((fx.basis.psi.col(0).array() == 1.0).all());
  Eigen::VectorXd g = norm_quantile(fx.basis.grid);
  g.array() -= measure.mean(g);
  g /= measure.norm(g);
  CHECK((fx.basis.psi.col(1) - g).cwiseAbs().maxCoeff() < 1e-9);

  for (int k = 2; k < fx.basis.K(); ++k) {
    CHECK(std::fabs(measure.mean(fx.basis.psi.col(k))) < 1e-6);
    CHECK(measure.norm(fx.basis.psi.col(k)) ==
          doctest::Approx(1.0).epsilon(1e-6));
  }

  // energies descend from k = 3 on and sum to one over all k
  for (int k = 3; k < fx.basis.K(); ++k)
    CHECK(fx.basis.energies[k] <= fx.basis.energies[k - 1] + 1e-12);
  CHECK(fx.basis.energies.sum() == doctest::Approx(1.0).epsilon(1e-9));

  // pre-denoise set is orthonormal under the grid measure
  for (int i = 0; i < fx.basis.K(); ++i)
    for (int j = 0; j <= i; ++j) {
      const double gij =
          measure.inner(fx.basis.psi_perp.col(i), fx.basis.psi_perp.col(j));
      CHECK(std::fabs(gij - (i == j ? 1.0 : 0.0)) < 1e-8);
    }
}

TEST_CASE("energy_order fixes the pair and sorts the rest") {
  Eigen::MatrixXd coef(3, 5);
  coef << 1, 2, 0.1, 3.0, 0.5,
          1, 2, 0.1, 3.0, 0.5,
          1, 2, 0.1, 3.0, 0.5;
  const auto [energy, perm] = energy_order(coef);
  CHECK(perm[0] == 0);
  CHECK(perm[1] == 1);
  CHECK(perm[2] == 3);  // largest non-gaussian energy
  CHECK(perm[3] == 4);
  CHECK(perm[4] == 2);
  CHECK(energy.sum() == doctest::Approx(1.0));
}

TEST_CASE("energy ties break by original index") {
  Eigen::MatrixXd coef(2, 5);
  coef << 1, 1, 2, 2, 2,
          1, 1, 2, 2, 2;
  const auto [energy, perm] = energy_order(coef);
  CHECK(perm[2] == 2);
  CHECK(perm[3] == 3);
  CHECK(perm[4] == 4);
}

TEST_CASE("restandardize") {
  const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(128, 0.01, 0.99);
  const GridMeasure measure(grid);
  Eigen::VectorXd psi = norm_quantile(grid);
  psi.array() -= measure.mean(psi);
  psi /= measure.norm(psi);
  // already standardized: unchanged
  CHECK((restandardize(measure, psi) - psi).cwiseAbs().maxCoeff() < 1e-12);
  // affine shifts are removed
  const Eigen::VectorXd shifted = 5.0 + (3.0 * psi.array());
  CHECK((restandardize(measure, shifted) - psi).cwiseAbs().maxCoeff() < 1e-10);
  // annihilated function is an error
  CHECK_THROWS_AS(restandardize(measure, Eigen::VectorXd::Constant(128, 2.0)),
                  ValidationError);
}

TEST_CASE("compute_coefficients recovers exact members") {
  Fixture fx;
  // a subject equal to psi2 on the reference grid
  EmpiricalQuantileFunction q;
  q.subject_id = "psi2";
  q.grid = fx.basis.grid;
  q.values = fx.basis.psi.col(1);
  double ccc = 0.0;
  const Eigen::VectorXd row = compute_coefficients(q, fx.basis, &ccc);
  CHECK(row[1] == doctest::Approx(1.0).epsilon(1e-8));
  for (int k = 0; k < fx.basis.K(); ++k)
    if (k != 1) CHECK(std::fabs(row[k]) < 1e-8);
  CHECK(ccc == doctest::Approx(1.0).epsilon(1e-10));

  // a constant subject loads only on psi1
  q.values = Eigen::VectorXd::Constant(fx.basis.grid.size(), 4.2);
  const Eigen::VectorXd row_c = compute_coefficients(q, fx.basis);
  CHECK(row_c[0] == doctest::Approx(4.2).epsilon(1e-8));
  for (int k = 1; k < fx.basis.K(); ++k) CHECK(std::fabs(row_c[k]) < 1e-8);
}

TEST_CASE("gaussian-sample EQF reconstructs with high concordance") {
  Fixture fx;
  Rng rng(3);
  SampleSet s;
  s.subject_id = "gauss";
  Eigen::VectorXd v(800);
  for (int i = 0; i < 800; ++i) v[i] = 0.5 + 1.3 * rng.normal();
  s.values = v;
  const auto q = build_eqf(s);
  double ccc = 0.0;
  compute_coefficients(q, fx.basis, &ccc);
  CHECK(ccc >= 0.99);
}

TEST_CASE("sparse-data guard") {
  Fixture fx;
  EmpiricalQuantileFunction q;
  q.subject_id = "tiny";
  const int m = fx.basis.K() - 1;
  q.grid = Eigen::VectorXd::LinSpaced(m, 1.0 / (m + 1.0),
                                      static_cast<double>(m) / (m + 1.0));
  q.values = Eigen::VectorXd::LinSpaced(m, -1.0, 1.0);
  CHECK_THROWS_AS(compute_coefficients(q, fx.basis), ValidationError);
}

TEST_CASE("reconstruction concordance holds for every training subject") {
  Fixture fx;
  const QuantletCoefficients qc =
      compute_all_coefficients(fx.subjects, fx.basis);
  REQUIRE(qc.qstar.rows() == static_cast<Eigen::Index>(fx.subjects.size()));
  for (Eigen::Index i = 0; i < qc.reconstruction_ccc.size(); ++i)
    CHECK(qc.reconstruction_ccc[i] >= 1.0 - fx.basis.epsilon);
}

TEST_CASE("identical inputs give identical bases") {
  Fixture a, b;
  CHECK((a.basis.psi - b.basis.psi).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.basis.element_index == b.basis.element_index);
}
