#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "quantlets/gram_schmidt.hpp"
#include "quantlets/rng.hpp"

using namespace quantlets;

namespace {

GridMeasure measure_of(int n) {
  return GridMeasure(Eigen::VectorXd::LinSpaced(n, 0.001, 0.999));
}

}  // namespace

TEST_CASE("orthonormal input passes through unchanged") {
  const auto m = measure_of(512);
  Eigen::MatrixXd cols(512, 2);
  cols.col(0).setOnes();
  cols.col(1) = Eigen::VectorXd::LinSpaced(512, -1.0, 1.0);
  cols.col(1).array() -= m.mean(cols.col(1));
  cols.col(1) /= m.norm(cols.col(1));
  const GramSchmidtResult r = gram_schmidt(m, cols);
  REQUIRE(r.q.cols() == 2);
  CHECK((r.q - cols).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("duplicated column is dropped") {
  const auto m = measure_of(128);
  Eigen::MatrixXd cols(128, 3);
  cols.col(0).setOnes();
  cols.col(1) = Eigen::VectorXd::LinSpaced(128, 0.0, 2.0);
  cols.col(2) = cols.col(1);
  const GramSchmidtResult r = gram_schmidt(m, cols);
  CHECK(r.q.cols() == 2);
  REQUIRE(r.dropped.size() == 1);
  CHECK(r.dropped[0] == 2);
  CHECK(r.kept == std::vector<int>{0, 1});
}

TEST_CASE("random 27-column set has an identity Gram matrix") {
  const auto m = measure_of(1024);
  Rng rng(42);
  Eigen::MatrixXd cols(1024, 27);
  for (int c = 0; c < 27; ++c)
    for (int j = 0; j < 1024; ++j) cols(j, c) = rng.normal();
  const GramSchmidtResult r = gram_schmidt(m, cols);
  REQUIRE(r.q.cols() == 27);
  for (Eigen::Index i = 0; i < 27; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double g = m.inner(r.q.col(i), r.q.col(j));
      CHECK(std::fabs(g - (i == j ? 1.0 : 0.0)) < 1e-8);
    }
  }
}

TEST_CASE("span is preserved: inputs project onto the output exactly") {
  const auto m = measure_of(256);
  Rng rng(9);
  Eigen::MatrixXd cols(256, 8);
  for (int c = 0; c < 8; ++c)
    for (int j = 0; j < 256; ++j) cols(j, c) = rng.normal();
  const GramSchmidtResult r = gram_schmidt(m, cols);
  for (int c = 0; c < 8; ++c) {
    Eigen::VectorXd res = cols.col(c);
    for (Eigen::Index q = 0; q < r.q.cols(); ++q)
      res -= m.inner(res, r.q.col(q)) * r.q.col(q);
    CHECK(m.norm(res) < 1e-8 * std::max(1.0, m.norm(cols.col(c))));
  }
}
