#include "quantlets/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "quantlets/rng.hpp"

namespace quantlets {

namespace {

// continued fraction for the incomplete beta (Lentz), valid for
// p < (a+1)/(a+b+2)
double beta_cf(double a, double b, double p) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * p / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * p / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * p / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double beta_cdf(double a, double b, double p) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::invalid_argument("beta_cdf: parameters must be positive");
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("beta_cdf: p outside [0,1]");
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;

  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(p) + b * std::log1p(-p);
  const double front = std::exp(ln_front);
  if (p < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cf(a, b, p) / a;
  }
  return 1.0 - front * beta_cf(b, a, 1.0 - p) / b;
}

double beta_pdf(double a, double b, double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  const double ln = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                    (a - 1.0) * std::log(p) + (b - 1.0) * std::log1p(-p);
  return std::exp(ln);
}

double norm_cdf(double z) { return 0.5 * std::erfc(-z * M_SQRT1_2); }

double norm_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("norm_quantile: p outside (0,1)");

  // Acklam's rational approximation, then one Halley refinement
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double plow = 0.02425;

  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  const double e = norm_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  x = x - u / (1.0 + 0.5 * x * u);
  return x;
}

Eigen::VectorXd norm_quantile(const Eigen::VectorXd& p) {
  Eigen::VectorXd out(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) out[i] = norm_quantile(p[i]);
  return out;
}

namespace {

// 48-point Gauss-Legendre nodes/weights on [0,1] (computed once by Newton on
// Legendre polynomials; suffices for ~1e-14 on smooth integrands)
struct Gauss48 {
  double node[48];
  double weight[48];
  Gauss48() {
    const int n = 48;
    for (int i = 0; i < n; ++i) {
      double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        const double dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::fabs(dx) < 1e-16) break;
      }
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (x * p1 - p0) / (x * x - 1.0);
      node[i] = 0.5 * (1.0 - x);  // map [-1,1] -> [0,1], reversed is fine
      weight[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
  }
};

const Gauss48& gauss48() {
  static const Gauss48 g;
  return g;
}

double owen_t_core(double h, double a) {
  // T(h,a) = (1/2pi) int_0^a exp(-h^2(1+x^2)/2)/(1+x^2) dx, 0 <= a <= 1
  const Gauss48& g = gauss48();
  double s = 0.0;
  for (int i = 0; i < 48; ++i) {
    const double x = a * g.node[i];
    s += g.weight[i] * std::exp(-0.5 * h * h * (1.0 + x * x)) / (1.0 + x * x);
  }
  return s * a / (2.0 * M_PI);
}

}  // namespace

double owen_t(double h, double a) {
  if (a == 0.0) return 0.0;
  if (a < 0.0) return -owen_t(h, -a);
  h = std::fabs(h);  // T(-h,a) = T(h,a)
  if (a <= 1.0) return owen_t_core(h, a);
  // T(h,a) = Phi(h)/2 + Phi(ah)/2 - Phi(h)Phi(ah) - T(ah, 1/a)
  const double ph = norm_cdf(h);
  const double pah = norm_cdf(a * h);
  return 0.5 * ph + 0.5 * pah - ph * pah - owen_t_core(a * h, 1.0 / a);
}

double skew_normal_cdf(double x, double location, double scale, double shape) {
  const double z = (x - location) / scale;
  return norm_cdf(z) - 2.0 * owen_t(z, shape);
}

double Rng::normal() { return norm_quantile(uniform()); }

double Rng::gamma(double shape) {
  // Marsaglia-Tsang; boost shape < 1 by the u^(1/shape) trick
  if (shape < 1.0) {
    const double u = uniform();
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace quantlets
