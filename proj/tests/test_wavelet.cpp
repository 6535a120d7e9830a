#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "quantlets/rng.hpp"
#include "quantlets/special.hpp"
#include "quantlets/wavelet.hpp"

using namespace quantlets;

TEST_CASE("dwt round trip and Parseval") {
  Rng rng(6);
  for (int n : {8, 64, 1024}) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = rng.normal();
    const Eigen::VectorXd w = dwt_d4(x);
    CHECK(w.squaredNorm() == doctest::Approx(x.squaredNorm()).epsilon(1e-10));
    CHECK((idwt_d4(w) - x).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("zero in, zero out") {
  const Eigen::VectorXd z = Eigen::VectorXd::Zero(256);
  CHECK(wavelet_denoise(z).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sub-threshold finest-scale noise is stripped") {
  // construct a signal from known wavelet coefficients: a strong scaling
  // block plus small alternating finest-level noise
  const int n = 512;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  w[0] = 25.0;
  w[1] = -10.0;
  Rng rng(12);
  for (int i = n / 2; i < n; ++i) w[i] = 0.01 * rng.normal();
  const Eigen::VectorXd noisy = idwt_d4(w);

  Eigen::VectorXd clean_w = w;
  clean_w.tail(n / 2).setZero();
  const Eigen::VectorXd clean = idwt_d4(clean_w);

  DenoiseInfo info;
  const Eigen::VectorXd den = wavelet_denoise(noisy, &info);
  CHECK(info.zeroed > 0);
  CHECK((den - clean).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("smooth functions pass through nearly unchanged") {
  const int n = 1024;
  const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(
      n, 1.0 / (n + 1.0), static_cast<double>(n) / (n + 1.0));
  const Eigen::VectorXd psi2 = norm_quantile(grid);
  const Eigen::VectorXd den = wavelet_denoise(psi2);
  CHECK((den - psi2).norm() / psi2.norm() < 0.01);
}

TEST_CASE("denoising is idempotent") {
  Rng rng(33);
  const int n = 256;
  for (int rep = 0; rep < 10; ++rep) {
    Eigen::VectorXd f(n);
    const double freq = rng.uniform(1.0, 6.0);
    for (int i = 0; i < n; ++i)
      f[i] = std::sin(freq * i / double(n) * M_PI * 2) + 0.2 * rng.normal();
    const Eigen::VectorXd once = wavelet_denoise(f);
    const Eigen::VectorXd twice = wavelet_denoise(once);
    CHECK((twice - once).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("non power-of-two input is resampled with a warning") {
  Rng rng(2);
  Eigen::VectorXd f(300);
  for (int i = 0; i < 300; ++i) f[i] = std::sin(i / 40.0) + 0.05 * rng.normal();
  DenoiseInfo info;
  const Eigen::VectorXd den = wavelet_denoise(f, &info);
  CHECK(info.resampled);
  CHECK(den.size() == 300);
  CHECK((den - f).norm() / f.norm() < 0.5);
}
