#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "quantlets/eqf.hpp"
#include "quantlets/gibbs.hpp"
#include "quantlets/rng.hpp"

namespace quantlets {

struct SkewNormal {
  double location = 0.0;
  double scale = 1.0;
  double shape = 0.0;
};

double sample_skew_normal(const SkewNormal& sn, Rng& rng);
Eigen::VectorXd sample_skew_normal(const SkewNormal& sn, int count,
                                   std::uint64_t seed);
double skew_normal_quantile(const SkewNormal& sn, double p);

struct MixtureComponent {
  SkewNormal sn;
  double weight = 1.0;
};
using Mixture = std::vector<MixtureComponent>;

double mixture_cdf(const Mixture& mix, double x);
double mixture_quantile(const Mixture& mix, double p);  // root-finding, ~1e-10
double sample_mixture(const Mixture& mix, Rng& rng);

// Stationary unit-variance AR(1) noise with Cov(e(p), e(p')) = base^|p - p'|
// added to a function sampled on an equispaced grid.
Eigen::VectorXd add_ou_noise(const Eigen::VectorXd& values,
                             const Eigen::VectorXd& grid, double base,
                             Rng& rng);

// The four population distributions of a scenario.
std::vector<Mixture> scenario_groups(int scenario);

struct ScenarioConfig {
  int scenario = 1;  // 1 skew normal, 2 multimodal mixtures
  int n_per_group = 10;
  int m = 1024;
  double ou_base = 0.9;
  std::uint64_t seed = 1;

  // pipeline knobs (not part of the scenario definition)
  int k_over = 1500;
  double theta_lo = 0.1, theta_hi = 1000.0;
  int cv_folds = 10;
  int path_length = 100;
  double epsilon = 0.01;
  GibbsConfig mcmc;  // iterations/burn-in/nu0 defaults apply
  int threads = 0;
  double alpha = 0.05;
  std::vector<double> mono_epsilons = {0.001, 0.01};
  int mono_rows = 30;
};

struct ScenarioData {
  std::vector<EmpiricalQuantileFunction> subjects;
  DesignMatrix design;
  std::vector<Mixture> groups;
  Eigen::MatrixXd group_rows;  // 4 x A covariate rows per group
};

ScenarioData generate_scenario(const ScenarioConfig& cfg);

// True coefficient functions on a grid: beta_1 = Q_group1, beta_a = Q_a - Q_1.
Eigen::MatrixXd true_coefficients(const std::vector<Mixture>& groups,
                                  const Eigen::VectorXd& grid);

struct MethodComparison {
  FitMethod method = FitMethod::QuantletSparse;
  Eigen::VectorXd area;      // per coefficient, int |U-L|^2 dp
  Eigen::VectorXd coverage;  // per coefficient, int 1{L <= beta <= U} dp
  std::map<std::string, double> moment_scores;
  std::map<std::string, std::array<double, 3>> gaussianity;  // mean, lo, hi
  std::map<double, double> monotonicity_rate;                // epsilon -> rate
  double gbpv_min = 1.0;                // smallest GBPV over non-intercept a
  std::vector<double> gbpv;             // per coefficient
};

struct ComparisonTable {
  ScenarioConfig config;
  int K = 0;            // basis size retained
  int threshold_c = 0;
  double rho_min = 0.0;
  int union_size = 0;
  std::vector<MethodComparison> methods;
};

ComparisonTable run_scenario(const ScenarioConfig& cfg,
                             const std::vector<FitMethod>& methods);

// Hypothesis list of the scenario's moment tests: label -> (moment, g1, g2).
struct MomentHypothesis {
  std::string label;
  char moment;  // 'm' mean, 's' sd, 'x' skewness
  int group1, group2;
  bool truth_equal;
};
std::vector<MomentHypothesis> scenario_hypotheses(int scenario);

}  // namespace quantlets
