#include "quantlets/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "quantlets/baselines.hpp"
#include "quantlets/errors.hpp"
#include "quantlets/inference.hpp"
#include "quantlets/quantlet_basis.hpp"
#include "quantlets/selection.hpp"
#include "quantlets/special.hpp"

namespace quantlets {

double sample_skew_normal(const SkewNormal& sn, Rng& rng) {
  // delta representation: Z = delta|U0| + sqrt(1-delta^2) U1
  const double d = sn.shape / std::sqrt(1.0 + sn.shape * sn.shape);
  const double u0 = rng.normal();
  const double u1 = rng.normal();
  const double z = d * std::fabs(u0) + std::sqrt(1.0 - d * d) * u1;
  return sn.location + sn.scale * z;
}

Eigen::VectorXd sample_skew_normal(const SkewNormal& sn, int count,
                                   std::uint64_t seed) {
  Rng rng = Rng::from_label(seed, "skew-normal");
  Eigen::VectorXd out(count);
  for (int i = 0; i < count; ++i) out[i] = sample_skew_normal(sn, rng);
  return out;
}

double mixture_cdf(const Mixture& mix, double x) {
  double acc = 0.0;
  for (const auto& c : mix)
    acc += c.weight * skew_normal_cdf(x, c.sn.location, c.sn.scale, c.sn.shape);
  return acc;
}

double mixture_quantile(const Mixture& mix, double p) {
  if (!(p > 0.0 && p < 1.0))
    throw OutOfRangeError("mixture_quantile: p outside (0,1)");
  // bracket, then bisection to ~1e-12 in x
  double lo = 0.0, hi = 0.0;
  for (const auto& c : mix) {
    lo = std::min(lo, c.sn.location - 12.0 * c.sn.scale);
    hi = std::max(hi, c.sn.location + 12.0 * c.sn.scale);
  }
  while (mixture_cdf(mix, lo) > p) lo -= 10.0;
  while (mixture_cdf(mix, hi) < p) hi += 10.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * (1.0 + std::fabs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (mixture_cdf(mix, mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double sample_mixture(const Mixture& mix, Rng& rng) {
  double u = rng.uniform();
  for (const auto& c : mix) {
    if (u < c.weight) return sample_skew_normal(c.sn, rng);
    u -= c.weight;
  }
  return sample_skew_normal(mix.back().sn, rng);
}

double skew_normal_quantile(const SkewNormal& sn, double p) {
  return mixture_quantile({{sn, 1.0}}, p);
}

Eigen::VectorXd add_ou_noise(const Eigen::VectorXd& values,
                             const Eigen::VectorXd& grid, double base,
                             Rng& rng) {
  const Eigen::Index m = values.size();
  if (grid.size() != m) throw ValidationError("add_ou_noise: size mismatch");
  Eigen::VectorXd out = values;
  if (m == 0) return out;
  const double h = m > 1 ? grid[1] - grid[0] : 1.0;
  const double r = base <= 0.0 ? 0.0 : std::pow(base, h);
  double e = rng.normal();
  out[0] += e;
  const double s = std::sqrt(std::max(0.0, 1.0 - r * r));
  for (Eigen::Index j = 1; j < m; ++j) {
    e = r * e + s * rng.normal();
    out[j] += e;
  }
  return out;
}

std::vector<Mixture> scenario_groups(int scenario) {
  if (scenario == 1) {
    return {
        {{{1.0, 5.0, 0.0}, 1.0}},
        {{{3.0, 5.0, 0.0}, 1.0}},
        {{{1.0, 6.5, 0.0}, 1.0}},
        {{{9.11, 7.89, -4.0}, 1.0}},
    };
  }
  if (scenario == 2) {
    return {
        {{{-3.06, 3.67, 0.0}, 0.5}, {{9.11, 7.89, -4.0}, 0.5}},
        {{{-7.1, 2.4, 0.0}, 0.3}, {{-3.11, 7.89, 4.0}, 0.7}},
        {{{-2.5, 2.5, 0.0}, 0.3}, {{4.0, 3.0, 0.0}, 0.5}, {{9.5, 2.1, 0.0}, 0.2}},
        {{{-2.5, 1.5, 0.0}, 0.3}, {{4.0, 3.56, 0.0}, 0.5}, {{9.5, 1.1, 0.0}, 0.2}},
    };
  }
  throw ConfigError("scenario_groups: scenario must be 1 or 2");
}

Eigen::MatrixXd true_coefficients(const std::vector<Mixture>& groups,
                                  const Eigen::VectorXd& grid) {
  Eigen::MatrixXd beta(groups.size(), grid.size());
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (Eigen::Index j = 0; j < grid.size(); ++j)
      beta(static_cast<Eigen::Index>(g), j) =
          mixture_quantile(groups[g], grid[j]);
  for (Eigen::Index g = beta.rows() - 1; g >= 1; --g)
    beta.row(g) -= beta.row(0);
  return beta;
}

ScenarioData generate_scenario(const ScenarioConfig& cfg) {
  if (cfg.n_per_group < 2)
    throw ConfigError("generate_scenario: n_per_group must be >= 2");
  ScenarioData data;
  data.groups = scenario_groups(cfg.scenario);
  const int n_groups = static_cast<int>(data.groups.size());
  const int n = n_groups * cfg.n_per_group;

  const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(
      cfg.m, 1.0 / (cfg.m + 1.0), static_cast<double>(cfg.m) / (cfg.m + 1.0));

  // group mean quantile curves on the sampling grid
  Eigen::MatrixXd mean_q(n_groups, cfg.m);
  for (int g = 0; g < n_groups; ++g)
    for (int j = 0; j < cfg.m; ++j)
      mean_q(g, j) = mixture_quantile(data.groups[g], grid[j]);

  Eigen::MatrixXd X(n, n_groups);
  std::vector<std::string> names = {"intercept"};
  for (int g = 2; g <= n_groups; ++g) names.push_back("group" + std::to_string(g));

  Rng root = Rng::from_label(cfg.seed, "scenario-noise");
  data.subjects.reserve(n);
  int idx = 0;
  for (int g = 0; g < n_groups; ++g) {
    for (int i = 0; i < cfg.n_per_group; ++i, ++idx) {
      Rng rng = root.stream(idx);
      SampleSet s;
      s.subject_id = "g" + std::to_string(g + 1) + "_s" + std::to_string(i + 1);
      s.values = add_ou_noise(mean_q.row(g).transpose(), grid, cfg.ou_base, rng);
      data.subjects.push_back(build_eqf(s));  // re-sorts the noisy values
      X(idx, 0) = 1.0;
      for (int a = 1; a < n_groups; ++a) X(idx, a) = (a == g) ? 1.0 : 0.0;
    }
  }
  data.design = make_design(X, names);

  data.group_rows = Eigen::MatrixXd::Zero(n_groups, n_groups);
  data.group_rows.col(0).setOnes();
  for (int g = 1; g < n_groups; ++g) data.group_rows(g, g) = 1.0;
  return data;
}

std::vector<MomentHypothesis> scenario_hypotheses(int scenario) {
  if (scenario == 1) {
    return {
        {"mu1=mu3", 'm', 1, 3, true},   {"mu2=mu4", 'm', 2, 4, true},
        {"sigma1=sigma3", 's', 1, 3, false}, {"sigma2=sigma4", 's', 2, 4, true},
        {"xi1=xi3", 'x', 1, 3, true},   {"xi2=xi4", 'x', 2, 4, false},
    };
  }
  return {
      {"mu1=mu2", 'm', 1, 2, true},      {"mu3=mu4", 'm', 3, 4, true},
      {"sigma1=sigma2", 's', 1, 2, false}, {"sigma3=sigma4", 's', 3, 4, true},
      {"xi1=xi2", 'x', 1, 2, false},
  };
}

ComparisonTable run_scenario(const ScenarioConfig& cfg,
                             const std::vector<FitMethod>& methods) {
  ComparisonTable table;
  table.config = cfg;

  const ScenarioData data = generate_scenario(cfg);
  const int n_groups = static_cast<int>(data.groups.size());

  // quantlet pipeline
  double delta = 0.0;
  for (const auto& q : data.subjects) delta = std::max(delta, q.delta());
  const Eigen::VectorXd ref_grid = probability_grid(1024, delta);
  const Dictionary dict = make_dictionary(cfg.k_over, cfg.theta_lo,
                                          cfg.theta_hi, ref_grid, cfg.seed);

  SelectionOptions sel_opts;
  sel_opts.cv_folds = cfg.cv_folds;
  sel_opts.path_length = cfg.path_length;
  sel_opts.threads = cfg.threads;
  const auto selections =
      select_dictionary_elements(data.subjects, dict, sel_opts, cfg.seed);
  const Eigen::VectorXi counts = union_counts(selections, dict.size());
  for (Eigen::Index k = 2; k < dict.size(); ++k)
    if (counts[k] > 0) ++table.union_size;
  table.union_size += 2;

  const LosslessnessCurve curve =
      losslessness_curve(selections, dict, data.subjects, cfg.threads);
  const ThresholdChoice choice = choose_threshold(curve, cfg.epsilon);
  table.threshold_c = choice.threshold;
  table.rho_min = choice.rho_min;

  const QuantletBasis basis = build_quantlet_basis(
      data.subjects, dict, counts, choice.threshold, cfg.epsilon);
  table.K = basis.K();
  const QuantletCoefficients qc =
      compute_all_coefficients(data.subjects, basis, cfg.threads);

  const Eigen::MatrixXd beta_true =
      true_coefficients(data.groups, basis.grid);
  const GridMeasure measure(basis.grid);
  const auto hypotheses = scenario_hypotheses(cfg.scenario);

  // random covariate rows for the monotonicity study: group indicators
  // replaced by Uniform(0,1) draws
  Rng mono_rng = Rng::from_label(cfg.seed, "monotonicity-rows");
  std::vector<Eigen::VectorXd> mono_rows(cfg.mono_rows);
  for (auto& row : mono_rows) {
    row = Eigen::VectorXd::Ones(n_groups);
    for (int a = 1; a < n_groups; ++a) row[a] = mono_rng.uniform();
  }

  for (FitMethod method : methods) {
    GibbsConfig mcmc = cfg.mcmc;
    mcmc.seed = cfg.seed;
    mcmc.threads = cfg.threads;
    const PosteriorFit fit = fit_baseline(method, data.subjects, basis,
                                          qc.qstar, data.design, mcmc,
                                          cfg.epsilon);
    MethodComparison mc;
    mc.method = method;

    if (!fit.moments_direct) {
      const FunctionalPosterior fp = to_data_space(fit, basis.grid);
      mc.area.resize(n_groups);
      mc.coverage.resize(n_groups);
      mc.gbpv.resize(n_groups);
      for (int a = 0; a < n_groups; ++a) {
        const BandSet bs = joint_bands(fp, a, cfg.alpha);
        const Eigen::ArrayXd width = (bs.joint_hi - bs.joint_lo).array();
        mc.area[a] = measure.integrate(width.square().matrix());
        Eigen::VectorXd covered(basis.grid.size());
        for (Eigen::Index j = 0; j < basis.grid.size(); ++j)
          covered[j] = (bs.joint_lo[j] <= beta_true(a, j) &&
                        beta_true(a, j) <= bs.joint_hi[j])
                           ? 1.0
                           : 0.0;
        mc.coverage[a] = measure.integrate(covered);
        mc.gbpv[a] = gbpv(simbas(fp, a));
      }
      mc.gbpv_min = *std::min_element(mc.gbpv.begin() + 1, mc.gbpv.end());

      // conditional moment tests
      std::vector<MomentDraws> md;
      md.reserve(n_groups);
      for (int g = 0; g < n_groups; ++g)
        md.push_back(
            conditional_moments(fp, data.group_rows.row(g).transpose()));
      for (const auto& hyp : hypotheses) {
        const MomentDraws& a = md[hyp.group1 - 1];
        const MomentDraws& b = md[hyp.group2 - 1];
        double score = 0.0;
        switch (hyp.moment) {
          case 'm': score = moment_prob_score(a.mean, b.mean); break;
          case 's': score = moment_prob_score(a.sd, b.sd); break;
          case 'x': score = moment_prob_score(a.skewness, b.skewness); break;
        }
        mc.moment_scores[hyp.label] = score;
      }

      // Gaussianity per group (quantlet-space fits only)
      if (method == FitMethod::QuantletSparse ||
          method == FitMethod::QuantletFlat ||
          method == FitMethod::GaussianOnly) {
        for (int g = 0; g < n_groups; ++g) {
          const GaussianityScore gs =
              gaussianity_score(fit, data.group_rows.row(g).transpose());
          mc.gaussianity["group" + std::to_string(g + 1)] = {gs.mean, gs.lo,
                                                             gs.hi};
        }
      }

      // epsilon-monotonicity of predicted quantile functions
      std::vector<Eigen::VectorXd> qhats;
      qhats.reserve(mono_rows.size());
      for (const auto& row : mono_rows)
        qhats.push_back(predicted_quantile_mean(fp, row));
      for (double eps : cfg.mono_epsilons)
        mc.monotonicity_rate[eps] = epsilon_monotonicity_rate(qhats, eps);
    } else {
      // feature extraction: moment tests only
      std::vector<MomentDraws> md;
      for (int g = 0; g < n_groups; ++g)
        md.push_back(conditional_moments_direct(
            fit, data.group_rows.row(g).transpose()));
      for (const auto& hyp : hypotheses) {
        const MomentDraws& a = md[hyp.group1 - 1];
        const MomentDraws& b = md[hyp.group2 - 1];
        double score = 0.0;
        switch (hyp.moment) {
          case 'm': score = moment_prob_score(a.mean, b.mean); break;
          case 's': score = moment_prob_score(a.sd, b.sd); break;
          case 'x': score = moment_prob_score(a.skewness, b.skewness); break;
        }
        mc.moment_scores[hyp.label] = score;
      }
    }
    table.methods.push_back(std::move(mc));
  }
  return table;
}

}  // namespace quantlets
