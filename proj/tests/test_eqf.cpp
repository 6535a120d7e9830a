#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "quantlets/eqf.hpp"
#include "quantlets/errors.hpp"
#include "quantlets/rng.hpp"
#include "quantlets/special.hpp"

using namespace quantlets;

namespace {

SampleSet make(const std::vector<double>& v, const std::string& id = "s") {
  SampleSet s;
  s.subject_id = id;
  s.values = Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
  return s;
}

}  // namespace

TEST_CASE("build_eqf sorts onto the j/(m+1) grid") {
  const auto q = build_eqf(make({3, 1, 2}));
  CHECK(q.grid[0] == doctest::Approx(0.25));
  CHECK(q.grid[1] == doctest::Approx(0.5));
  CHECK(q.grid[2] == doctest::Approx(0.75));
  CHECK(q.values[0] == 1);
  CHECK(q.values[1] == 2);
  CHECK(q.values[2] == 3);
}

TEST_CASE("build_eqf keeps ties") {
  const auto q = build_eqf(make({5, 5}));
  CHECK(q.grid[0] == doctest::Approx(1.0 / 3));
  CHECK(q.grid[1] == doctest::Approx(2.0 / 3));
  CHECK(q.values[0] == 5);
  CHECK(q.values[1] == 5);
}

TEST_CASE("build_eqf validation") {
  CHECK_THROWS_AS(build_eqf(make({1})), ValidationError);
  CHECK_THROWS_AS(build_eqf(make({1, NAN})), ValidationError);
}

TEST_CASE("build_eqf median of seeded gaussian draws") {
  Rng rng(2024);
  std::vector<double> v(1024);
  for (auto& x : v) x = rng.normal();
  const auto q = build_eqf(make(v));
  // direct order-statistic median as the oracle
  std::sort(v.begin(), v.end());
  const double median = 0.5 * (v[511] + v[512]);
  CHECK(eval_eqf(q, 0.5) == doctest::Approx(median).epsilon(1e-12));
  CHECK(std::fabs(eval_eqf(q, 0.5)) < 0.1);
}

TEST_CASE("build_eqf output is non-decreasing (property)") {
  Rng rng(5);
  for (int rep = 0; rep < 100; ++rep) {
    const int m = 2 + static_cast<int>(rng.next_u64() % 40);
    std::vector<double> v(m);
    for (auto& x : v) x = rng.uniform(-50, 50);
    const auto q = build_eqf(make(v));
    for (int j = 1; j < m; ++j) CHECK(q.values[j] >= q.values[j - 1]);
  }
}

TEST_CASE("eval_eqf interpolates between order statistics") {
  const auto q = build_eqf(make({1, 2, 3}));
  CHECK(eval_eqf(q, 0.5) == doctest::Approx(2.0));
  // (m+1)p = 1.5 -> halfway between Y_(1), Y_(2)
  CHECK(eval_eqf(q, 0.375) == doctest::Approx(1.5));
  CHECK_THROWS_AS(eval_eqf(q, 0.95), OutOfRangeError);
  CHECK_THROWS_AS(eval_eqf(q, 0.1), OutOfRangeError);
}

TEST_CASE("eval_eqf is monotone in p (property)") {
  Rng rng(17);
  std::vector<double> v(33);
  for (auto& x : v) x = rng.uniform(-5, 5);
  const auto q = build_eqf(make(v));
  double prev = eval_eqf(q, q.delta());
  for (double p = q.delta(); p <= 1 - q.delta(); p += 0.001) {
    const double cur = eval_eqf(q, p);
    CHECK(cur >= prev - 1e-14);
    prev = cur;
  }
}

TEST_CASE("resample_to_grid identity and singleton") {
  const auto q = build_eqf(make({4, 8, 15, 16, 23, 42}));
  const Eigen::VectorXd same = resample_to_grid(q, q.grid);
  CHECK((same - q.values).norm() == doctest::Approx(0.0));
  Eigen::VectorXd one(1);
  one << 0.5;
  CHECK(resample_to_grid(q, one)[0] == doctest::Approx(eval_eqf(q, 0.5)));
}

TEST_CASE("resample_to_grid matches build grid exactly for m = 1024") {
  Rng rng(77);
  std::vector<double> v(1024);
  for (auto& x : v) x = rng.normal();
  const auto q = build_eqf(make(v));
  const Eigen::VectorXd grid =
      Eigen::VectorXd::LinSpaced(1024, 1.0 / 1025, 1024.0 / 1025);
  CHECK((resample_to_grid(q, grid) - q.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("moments of the standard normal quantile") {
  const int n = 8192;
  const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(
      n, 1.0 / (n + 1.0), static_cast<double>(n) / (n + 1.0));
  const Eigen::VectorXd values = norm_quantile(grid);
  const MomentSummary s = moments_of_qf(grid, values);
  CHECK(s.mean == doctest::Approx(0.0).epsilon(1e-2));
  CHECK(s.variance == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(*s.skewness == doctest::Approx(0.0).epsilon(1e-2));
  CHECK(*s.kurtosis == doctest::Approx(3.0).epsilon(1e-2));
}

TEST_CASE("moments of a constant are degenerate") {
  const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(16, 0.05, 0.95);
  const Eigen::VectorXd values = Eigen::VectorXd::Constant(16, 3.25);
  const MomentSummary s = moments_of_qf(grid, values);
  CHECK(s.mean == doctest::Approx(3.25));
  CHECK(s.variance == doctest::Approx(0.0));
  CHECK_FALSE(s.skewness.has_value());
  CHECK_FALSE(s.kurtosis.has_value());
}

TEST_CASE("moments affine equivariance (property)") {
  Rng rng(31);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> v(256);
    for (auto& x : v) x = rng.uniform(-3, 3);
    const auto q = build_eqf(make(v));
    const MomentSummary s0 = moments_of_qf(q.grid, q.values);
    const double a = rng.uniform(-4, 4), b = rng.uniform(0.5, 3.0);
    const MomentSummary s1 =
        moments_of_qf(q.grid, (a + (b * q.values.array())).matrix());
    CHECK(s1.mean == doctest::Approx(a + b * s0.mean).epsilon(1e-8));
    CHECK(s1.variance == doctest::Approx(b * b * s0.variance).epsilon(1e-8));
    CHECK(*s1.skewness == doctest::Approx(*s0.skewness).epsilon(1e-8));
    CHECK(*s1.kurtosis == doctest::Approx(*s0.kurtosis).epsilon(1e-8));
  }
}

TEST_CASE("moments recover N(mu, sigma^2) within 5% at m = 4096") {
  Rng rng(99);
  const double mu = 2.5, sigma = 1.7;
  std::vector<double> v(4096);
  for (auto& x : v) x = mu + sigma * rng.normal();
  const auto q = build_eqf(make(v));
  const MomentSummary s = moments_of_qf(q.grid, q.values);
  CHECK(std::fabs(s.mean - mu) / mu < 0.05);
  CHECK(std::fabs(s.variance - sigma * sigma) / (sigma * sigma) < 0.05);
}
