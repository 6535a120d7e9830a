#include "quantlets/pipeline.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "quantlets/baselines.hpp"
#include "quantlets/errors.hpp"
#include "quantlets/inference.hpp"
#include "quantlets/io.hpp"
#include "quantlets/svg.hpp"

namespace quantlets {

namespace fs = std::filesystem;
using nlohmann::json;

const char* stage_name(Stage s) {
  switch (s) {
    case Stage::Ingest: return "ingest";
    case Stage::Eqf: return "eqf";
    case Stage::Dictionary: return "dictionary";
    case Stage::Selection: return "selection";
    case Stage::Curve: return "curve";
    case Stage::Basis: return "basis";
    case Stage::Coefficients: return "coefficients";
    case Stage::Fit: return "fit";
    case Stage::Inference: return "inference";
    case Stage::Plots: return "plots";
  }
  return "?";
}

RunConfig load_run_config(const std::string& json_path) {
  const json j = json::parse(read_text(json_path));
  RunConfig c;
  c.samples_path = j.value("samples", "");
  c.covariates_path = j.value("covariates", "");
  c.output_dir = j.value("output", c.output_dir);
  c.k_over = j.value("k_over", c.k_over);
  c.theta_lo = j.value("theta_lo", c.theta_lo);
  c.theta_hi = j.value("theta_hi", c.theta_hi);
  c.seed = j.value("seed", c.seed);
  c.epsilon = j.value("epsilon", c.epsilon);
  c.cv_folds = j.value("cv_folds", c.cv_folds);
  c.path_length = j.value("path_length", c.path_length);
  c.L = j.value("L", c.L);
  c.denoise = j.value("denoise", c.denoise);
  c.mcmc.iterations = j.value("iterations", c.mcmc.iterations);
  c.mcmc.burn_in = j.value("burn_in", c.mcmc.burn_in);
  c.mcmc.thin = j.value("thin", c.mcmc.thin);
  c.mcmc.nu0 = j.value("nu0", c.mcmc.nu0);
  c.n_clusters = j.value("n_clusters", c.n_clusters);
  const std::string method = j.value("method", std::string(1, c.method));
  c.method = method.empty() ? 'E' : method[0];
  c.alpha = j.value("alpha", c.alpha);
  c.pdf_delta_steps = j.value("pdf_delta_steps", c.pdf_delta_steps);
  if (j.contains("mono_epsilons"))
    c.mono_epsilons = j.at("mono_epsilons").get<std::vector<double>>();
  c.threads = j.value("threads", c.threads);
  c.svg_plots = j.value("svg_plots", c.svg_plots);
  return c;
}

void validate(const RunConfig& c) {
  if (c.samples_path.empty() || !fs::exists(c.samples_path))
    throw ConfigError("config: samples file missing: " + c.samples_path);
  if (c.covariates_path.empty() || !fs::exists(c.covariates_path))
    throw ConfigError("config: covariates file missing: " + c.covariates_path);
  if (c.mcmc.iterations <= 0)
    throw ConfigError("config: iterations must be positive");
  if (c.k_over < 0) throw ConfigError("config: k_over must be >= 0");
  if (!(c.epsilon > 0.0 && c.epsilon < 1.0))
    throw ConfigError("config: epsilon outside (0,1)");
  if (!(c.alpha > 0.0 && c.alpha < 1.0))
    throw ConfigError("config: alpha outside (0,1)");
  if (c.L < 8) throw ConfigError("config: L too small");
}

namespace {

struct PipelineState {
  std::vector<SampleSet> samples;
  DesignMatrix design;
  std::vector<EmpiricalQuantileFunction> eqfs;
  Dictionary dict;
  std::vector<SelectionResult> selections;
  LosslessnessCurve curve;
  ThresholdChoice choice;
  QuantletBasis basis;
  QuantletCoefficients coefficients;
  PosteriorFit fit;
};

std::string path_in(const RunConfig& c, const std::string& name) {
  return (fs::path(c.output_dir) / name).string();
}

void write_eqf_cache(const std::string& path,
                     const std::vector<EmpiricalQuantileFunction>& eqfs) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  out.precision(17);
  out << "subject_id,p,value\n";
  for (const auto& q : eqfs)
    for (Eigen::Index j = 0; j < q.grid.size(); ++j)
      out << q.subject_id << "," << q.grid[j] << "," << q.values[j] << "\n";
}

std::vector<EmpiricalQuantileFunction> read_eqf_cache(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("missing artifact (run build-basis first): " +
                                 path);
  std::string line;
  std::getline(in, line);
  std::vector<EmpiricalQuantileFunction> out;
  std::vector<double> grid, values;
  std::string current;
  auto flush = [&]() {
    if (current.empty()) return;
    EmpiricalQuantileFunction q;
    q.subject_id = current;
    q.grid = Eigen::Map<Eigen::VectorXd>(grid.data(), grid.size());
    q.values = Eigen::Map<Eigen::VectorXd>(values.data(), values.size());
    out.push_back(std::move(q));
    grid.clear();
    values.clear();
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    const std::string id = line.substr(0, c1);
    if (id != current) {
      flush();
      current = id;
    }
    grid.push_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)));
    values.push_back(std::stod(line.substr(c2 + 1)));
  }
  flush();
  return out;
}

void stage_inference(const RunConfig& cfg, PipelineState& st,
                     PipelineResult& result) {
  const FunctionalPosterior fp = to_data_space(st.fit, st.basis.grid);
  const Eigen::Index A = st.design.A();
  const GridMeasure measure(st.basis.grid);

  json report;
  report["alpha"] = cfg.alpha;
  report["method"] = fit_method_name(st.fit.method);

  // mean covariate row, used to hold the others fixed in contrasts
  Eigen::VectorXd x_mean = st.design.X.colwise().mean();

  json coef_list = json::array();
  for (Eigen::Index a = 0; a < A; ++a) {
    const BandSet bs = joint_bands(fp, static_cast<int>(a), cfg.alpha);
    const Eigen::VectorXd sb = simbas(fp, static_cast<int>(a));
    json jc;
    jc["name"] = st.design.names[a];
    jc["gbpv"] = gbpv(sb);
    const Eigen::ArrayXd w = (bs.joint_hi - bs.joint_lo).array();
    jc["band_area"] = measure.integrate(w.square().matrix());

    const std::string band_file = "band_" + st.design.names[a] + ".csv";
    Eigen::MatrixXd band(st.basis.grid.size(), 7);
    band.col(0) = st.basis.grid;
    band.col(1) = bs.mean;
    band.col(2) = bs.joint_lo;
    band.col(3) = bs.joint_hi;
    band.col(4) = bs.pointwise_lo;
    band.col(5) = bs.pointwise_hi;
    band.col(6) = sb;
    write_matrix_csv(path_in(cfg, band_file), band,
                     {"p", "mean", "joint_lo", "joint_hi", "pointwise_lo",
                      "pointwise_hi", "simbas"});
    result.artifacts["band_" + st.design.names[a]] = path_in(cfg, band_file);
    jc["band_file"] = band_file;
    coef_list.push_back(jc);
  }
  report["coefficients"] = coef_list;

  // contrasts for non-intercept covariates: binary at 0/1, continuous at
  // observed min/max, all other covariates at their mean
  json contrasts = json::array();
  std::vector<Eigen::VectorXd> predicted_rows;
  for (Eigen::Index a = 0; a < A; ++a) {
    if (st.design.kinds[a] == DesignMatrix::ColKind::Intercept) continue;
    double lo = st.design.X.col(a).minCoeff();
    double hi = st.design.X.col(a).maxCoeff();
    Eigen::VectorXd x1 = x_mean, x2 = x_mean;
    x1[a] = lo;
    x2[a] = hi;
    predicted_rows.push_back(x1);
    predicted_rows.push_back(x2);

    const MomentDraws m1 = conditional_moments(fp, x1);
    const MomentDraws m2 = conditional_moments(fp, x2);
    json jc;
    jc["covariate"] = st.design.names[a];
    jc["level_low"] = lo;
    jc["level_high"] = hi;
    jc["p_mu"] = moment_prob_score(m1.mean, m2.mean);
    jc["p_sigma"] = moment_prob_score(m1.sd, m2.sd);
    jc["p_xi"] = moment_prob_score(m1.skewness, m2.skewness);
    jc["p_phi"] = moment_prob_score(m1.kurtosis, m2.kurtosis);
    jc["moment_undefined_draws"] = m1.undefined_count + m2.undefined_count;

    if (st.fit.K() >= 2 && st.fit.basis_rows.size() > 0) {
      const GaussianityScore g1 = gaussianity_score(st.fit, x1);
      const GaussianityScore g2 = gaussianity_score(st.fit, x2);
      jc["gaussianity_low"] = {g1.mean, g1.lo, g1.hi};
      jc["gaussianity_high"] = {g2.mean, g2.lo, g2.hi};
    }

    // predicted CDF/PDF tables per level
    const double h = st.basis.grid[1] - st.basis.grid[0];
    const double delta = cfg.pdf_delta_steps * h;
    for (int side = 0; side < 2; ++side) {
      const Eigen::VectorXd& x = side == 0 ? x1 : x2;
      const PdfCdfTables t = predicted_pdf_cdf(fp, x, delta);
      const std::string f = "pdf_" + st.design.names[a] +
                            (side == 0 ? "_low" : "_high") + ".csv";
      Eigen::MatrixXd table(t.pdf_x.size(), 2);
      table.col(0) = t.pdf_x;
      table.col(1) = t.pdf_value;
      write_matrix_csv(path_in(cfg, f), table, {"x", "density"});
      result.artifacts["pdf_" + st.design.names[a] +
                       (side == 0 ? "_low" : "_high")] = path_in(cfg, f);
      jc[side == 0 ? "pdf_file_low" : "pdf_file_high"] = f;
      jc[side == 0 ? "pdf_degenerate_low" : "pdf_degenerate_high"] =
          t.degenerate;
    }
    contrasts.push_back(jc);
  }
  report["contrasts"] = contrasts;

  // epsilon-monotonicity across the contrast prediction rows
  json mono;
  std::vector<Eigen::VectorXd> qhats;
  for (const auto& row : predicted_rows)
    qhats.push_back(predicted_quantile_mean(fp, row));
  for (double eps : cfg.mono_epsilons)
    mono[std::to_string(eps)] = epsilon_monotonicity_rate(qhats, eps);
  report["monotonicity_rate"] = mono;

  write_text(path_in(cfg, "inference.json"), report.dump(2));
  result.artifacts["inference"] = path_in(cfg, "inference.json");
}

void stage_plots(const RunConfig& cfg, PipelineState& st,
                 PipelineResult& result) {
  if (!cfg.svg_plots) return;
  const FunctionalPosterior fp = to_data_space(st.fit, st.basis.grid);
  fs::create_directories(fs::path(cfg.output_dir) / "plots");
  for (Eigen::Index a = 0; a < st.design.A(); ++a) {
    const BandSet bs = joint_bands(fp, static_cast<int>(a), cfg.alpha);
    const std::string f =
        (fs::path(cfg.output_dir) / "plots" /
         ("beta_" + st.design.names[a] + ".svg")).string();
    write_svg_plot(f, "beta(" + st.design.names[a] + ")", st.basis.grid,
                   {{bs.mean, "#1f6fb2", 2.0, false}}, bs.joint_lo,
                   bs.joint_hi);
    result.artifacts["plot_beta_" + st.design.names[a]] = f;
  }
}

}  // namespace

PipelineResult run_stages(const RunConfig& config, Stage first, Stage last) {
  PipelineResult result;
  PipelineState st;
  fs::create_directories(config.output_dir);

  Stage current = first;
  try {
    validate(config);
    for (int s = static_cast<int>(first); s <= static_cast<int>(last); ++s) {
      current = static_cast<Stage>(s);
      switch (current) {
        case Stage::Ingest: {
          auto [samples, design] =
              ingest(config.samples_path, config.covariates_path);
          st.samples = std::move(samples);
          st.design = std::move(design);
          Eigen::MatrixXd X = st.design.X;
          write_matrix_csv(path_in(config, "design.csv"), X, st.design.names);
          result.artifacts["design"] = path_in(config, "design.csv");
          break;
        }
        case Stage::Eqf: {
          st.eqfs.clear();
          for (const auto& s2 : st.samples) st.eqfs.push_back(build_eqf(s2));
          write_eqf_cache(path_in(config, "eqf.csv"), st.eqfs);
          result.artifacts["eqf"] = path_in(config, "eqf.csv");
          break;
        }
        case Stage::Dictionary: {
          if (st.eqfs.empty())
            st.eqfs = read_eqf_cache(path_in(config, "eqf.csv"));
          double delta = 0.0;
          for (const auto& q : st.eqfs) delta = std::max(delta, q.delta());
          st.dict = make_dictionary(config.k_over, config.theta_lo,
                                    config.theta_hi,
                                    probability_grid(config.L, delta),
                                    config.seed);
          write_dictionary(path_in(config, "dictionary.csv"),
                           path_in(config, "dictionary.json"), st.dict);
          result.artifacts["dictionary"] = path_in(config, "dictionary.csv");
          result.artifacts["dictionary_manifest"] =
              path_in(config, "dictionary.json");
          break;
        }
        case Stage::Selection: {
          SelectionOptions opts;
          opts.cv_folds = config.cv_folds;
          opts.path_length = config.path_length;
          opts.threads = config.threads;
          st.selections = select_dictionary_elements(st.eqfs, st.dict, opts,
                                                     config.seed);
          write_selection_csv(path_in(config, "selection.csv"), st.selections);
          result.artifacts["selection"] = path_in(config, "selection.csv");
          break;
        }
        case Stage::Curve: {
          st.curve = losslessness_curve(st.selections, st.dict, st.eqfs,
                                        config.threads);
          write_curve_csv(path_in(config, "losslessness.csv"), st.curve);
          result.artifacts["losslessness"] =
              path_in(config, "losslessness.csv");
          break;
        }
        case Stage::Basis: {
          st.choice = choose_threshold(st.curve, config.epsilon);
          const Eigen::VectorXi counts =
              union_counts(st.selections, st.dict.size());
          QuantletBuildOptions opts;
          opts.L = config.L;
          opts.denoise = config.denoise;
          st.basis = build_quantlet_basis(st.eqfs, st.dict, counts,
                                          st.choice.threshold, config.epsilon,
                                          opts);
          st.basis.source_hash = file_hash(path_in(config, "selection.csv"));
          write_basis(path_in(config, "basis.csv"),
                      path_in(config, "basis.json"), st.basis);
          result.artifacts["basis"] = path_in(config, "basis.csv");
          result.artifacts["basis_manifest"] = path_in(config, "basis.json");
          break;
        }
        case Stage::Coefficients: {
          st.coefficients =
              compute_all_coefficients(st.eqfs, st.basis, config.threads);
          write_coefficients_csv(path_in(config, "coefficients.csv"),
                                 st.coefficients);
          result.artifacts["coefficients"] =
              path_in(config, "coefficients.csv");
          break;
        }
        case Stage::Fit: {
          if (st.eqfs.empty())
            st.eqfs = read_eqf_cache(path_in(config, "eqf.csv"));
          if (st.basis.K() == 0)
            st.basis = read_basis(path_in(config, "basis.csv"),
                                  path_in(config, "basis.json"));
          if (st.design.X.size() == 0) {
            std::vector<std::string> names;
            const Eigen::MatrixXd X =
                read_matrix_csv(path_in(config, "design.csv"), &names);
            st.design = make_design(X, names);
          }
          if (st.coefficients.qstar.size() == 0)
            st.coefficients =
                compute_all_coefficients(st.eqfs, st.basis, config.threads);
          GibbsConfig mcmc = config.mcmc;
          mcmc.seed = config.seed;
          mcmc.threads = config.threads;
          st.fit = fit_baseline(fit_method_from_name(config.method), st.eqfs,
                                st.basis, st.coefficients.qstar, st.design,
                                mcmc, config.epsilon, config.n_clusters);
          st.basis.cluster_labels = st.fit.partition.label;
          write_fit(path_in(config, "draws.csv"), path_in(config, "fit.json"),
                    path_in(config, "geweke.csv"), st.fit);
          result.artifacts["draws"] = path_in(config, "draws.csv");
          result.artifacts["fit_config"] = path_in(config, "fit.json");
          if (!st.fit.moments_direct)
            result.artifacts["geweke"] = path_in(config, "geweke.csv");
          break;
        }
        case Stage::Inference: {
          if (st.fit.n_draws() == 0) {
            if (st.basis.K() == 0)
              st.basis = read_basis(path_in(config, "basis.csv"),
                                    path_in(config, "basis.json"));
            if (st.design.X.size() == 0) {
              std::vector<std::string> names;
              const Eigen::MatrixXd X =
                  read_matrix_csv(path_in(config, "design.csv"), &names);
              st.design = make_design(X, names);
            }
            st.fit = read_fit(path_in(config, "draws.csv"),
                              path_in(config, "fit.json"));
            st.fit.basis_grid = st.basis.grid;
            st.fit.basis_rows = st.basis.psi.leftCols(st.fit.K()).transpose();
          }
          stage_inference(config, st, result);
          break;
        }
        case Stage::Plots: {
          stage_plots(config, st, result);
          break;
        }
      }
    }
    result.ok = true;
  } catch (const std::exception& e) {
    result.ok = false;
    result.failed_stage = stage_name(current);
    result.error = e.what();
  }

  // index with hashes; failure leaves partial artifacts and marks the stage
  json index;
  index["complete"] = result.ok;
  if (!result.ok) {
    index["failed_stage"] = result.failed_stage;
    index["error"] = result.error;
  }
  json arts;
  for (const auto& [name, path] : result.artifacts) {
    arts[name] = {{"path", path}, {"hash", file_hash(path)}};
  }
  index["artifacts"] = arts;
  write_text(path_in(config, "index.json"), index.dump(2));
  return result;
}

}  // namespace quantlets
