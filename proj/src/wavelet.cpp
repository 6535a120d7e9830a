#include "quantlets/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "quantlets/errors.hpp"
#include "quantlets/quadrature.hpp"

namespace quantlets {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kNorm = 0.17677669529663687;  // 1/(4 sqrt 2)
const double H[4] = {(1 + kSqrt3) * kNorm, (3 + kSqrt3) * kNorm,
                     (3 - kSqrt3) * kNorm, (1 - kSqrt3) * kNorm};
const double G[4] = {H[3], -H[2], H[1], -H[0]};

constexpr Eigen::Index kMinBlock = 4;

bool power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

void step_forward(const double* x, Eigen::Index n, double* s, double* d) {
  const Eigen::Index half = n / 2;
  for (Eigen::Index i = 0; i < half; ++i) {
    double acc_s = 0.0, acc_d = 0.0;
    for (int k = 0; k < 4; ++k) {
      const double v = x[(2 * i + k) % n];
      acc_s += H[k] * v;
      acc_d += G[k] * v;
    }
    s[i] = acc_s;
    d[i] = acc_d;
  }
}

void step_inverse(const double* s, const double* d, Eigen::Index half,
                  double* x) {
  const Eigen::Index n = 2 * half;
  std::fill(x, x + n, 0.0);
  for (Eigen::Index i = 0; i < half; ++i) {
    for (int k = 0; k < 4; ++k) {
      const Eigen::Index j = (2 * i + k) % n;
      x[j] += H[k] * s[i] + G[k] * d[i];
    }
  }
}

}  // namespace

Eigen::VectorXd dwt_d4(const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  if (!power_of_two(n) || n < kMinBlock)
    throw ValidationError("dwt_d4: length must be a power of two >= 4");
  Eigen::VectorXd out(n);
  std::vector<double> buf(x.data(), x.data() + n);
  std::vector<double> s(n / 2), d(n / 2);
  Eigen::Index len = n;
  while (len > kMinBlock) {
    step_forward(buf.data(), len, s.data(), d.data());
    const Eigen::Index half = len / 2;
    std::copy(d.begin(), d.begin() + half, out.data() + half);
    std::copy(s.begin(), s.begin() + half, buf.begin());
    len = half;
  }
  std::copy(buf.begin(), buf.begin() + len, out.data());
  return out;
}

Eigen::VectorXd idwt_d4(const Eigen::VectorXd& w) {
  const Eigen::Index n = w.size();
  if (!power_of_two(n) || n < kMinBlock)
    throw ValidationError("idwt_d4: length must be a power of two >= 4");
  std::vector<double> buf(w.data(), w.data() + n);
  std::vector<double> x(n);
  Eigen::Index half = kMinBlock;
  while (half < n) {
    step_inverse(buf.data(), w.data() + half, half, x.data());
    std::copy(x.begin(), x.begin() + 2 * half, buf.begin());
    half *= 2;
  }
  return Eigen::Map<Eigen::VectorXd>(buf.data(), n);
}

Eigen::VectorXd wavelet_denoise(const Eigen::VectorXd& f, DenoiseInfo* info) {
  const Eigen::Index n = f.size();
  if (!power_of_two(n) || n < 2 * kMinBlock) {
    // resample to the nearest power of two, denoise, resample back
    Eigen::Index target = 2 * kMinBlock;
    while (target < n) target *= 2;
    if (target > 2 * kMinBlock &&
        static_cast<double>(target) - n > n - target / 2.0)
      target /= 2;
    const Eigen::VectorXd t0 = Eigen::VectorXd::LinSpaced(n, 0.0, 1.0);
    const Eigen::VectorXd t1 = Eigen::VectorXd::LinSpaced(target, 0.0, 1.0);
    const Eigen::VectorXd g = wavelet_denoise(interp1(t0, f, t1), info);
    if (info) info->resampled = true;
    return interp1(t1, g, t0);
  }

  Eigen::VectorXd w = dwt_d4(f);

  // sigma from the finest detail level (last n/2 coefficients)
  std::vector<double> finest(n / 2);
  for (Eigen::Index i = 0; i < n / 2; ++i) finest[i] = std::fabs(w[n / 2 + i]);
  std::nth_element(finest.begin(), finest.begin() + finest.size() / 2,
                   finest.end());
  double med = finest[finest.size() / 2];
  if (finest.size() % 2 == 0) {
    const double lo =
        *std::max_element(finest.begin(), finest.begin() + finest.size() / 2);
    med = 0.5 * (med + lo);
  }
  const double sigma = med / 0.6745;
  const double threshold = sigma * std::sqrt(2.0 * std::log(double(n)));

  int zeroed = 0;
  for (Eigen::Index i = kMinBlock; i < n; ++i) {  // details only
    if (std::fabs(w[i]) <= threshold && w[i] != 0.0) {
      w[i] = 0.0;
      ++zeroed;
    }
  }
  if (info) {
    info->sigma_hat = sigma;
    info->threshold = threshold;
    info->zeroed = zeroed;
    info->resampled = false;
  }
  return idwt_d4(w);
}

}  // namespace quantlets
