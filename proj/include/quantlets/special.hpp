#pragma once

#include <Eigen/Dense>

namespace quantlets {

// Regularized incomplete beta I_p(a, b); absolute accuracy ~1e-12.
// Lentz continued fraction with the symmetry switch at p > (a+1)/(a+b+2).
double beta_cdf(double a, double b, double p);

// Density of Beta(a, b) at p.
double beta_pdf(double a, double b, double p);

// Standard normal CDF / density / quantile.
double norm_cdf(double z);
double norm_pdf(double z);
double norm_quantile(double p);  // p in (0,1)

// Owen's T function T(h, a).
double owen_t(double h, double a);

// CDF of the skew normal SN(location, scale, shape).
double skew_normal_cdf(double x, double location, double scale, double shape);

Eigen::VectorXd norm_quantile(const Eigen::VectorXd& p);

}  // namespace quantlets
