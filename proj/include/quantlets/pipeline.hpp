#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "quantlets/gibbs.hpp"

namespace quantlets {

struct RunConfig {
  std::string samples_path;
  std::string covariates_path;
  std::string output_dir = "out";

  // dictionary
  int k_over = 2000;
  double theta_lo = 0.1, theta_hi = 1000.0;
  std::uint64_t seed = 1;

  // selection
  double epsilon = 0.01;
  int cv_folds = 10;
  int path_length = 100;

  // basis
  int L = 1024;
  bool denoise = true;

  // regression
  GibbsConfig mcmc;
  int n_clusters = 0;  // 0: derived from the basis variabilities
  char method = 'E';

  // inference
  double alpha = 0.05;
  int pdf_delta_steps = 16;  // delta as a multiple of the grid spacing
  std::vector<double> mono_epsilons = {0.001, 0.01};

  int threads = 0;
  bool svg_plots = true;
};

RunConfig load_run_config(const std::string& json_path);
void validate(const RunConfig& config);

enum class Stage {
  Ingest,
  Eqf,
  Dictionary,
  Selection,
  Curve,
  Basis,
  Coefficients,
  Fit,
  Inference,
  Plots,
};

const char* stage_name(Stage s);

struct PipelineResult {
  bool ok = false;
  std::string failed_stage;
  std::string error;
  std::map<std::string, std::string> artifacts;  // name -> path
};

// Runs the requested stage range (inclusive), reading earlier artifacts from
// the output directory when the range does not start at Ingest.  Writes an
// index JSON listing every artifact with its content hash; on failure the
// partial artifacts are kept and the index records the failing stage.
PipelineResult run_stages(const RunConfig& config, Stage first, Stage last);

inline PipelineResult run_pipeline(const RunConfig& config) {
  return run_stages(config, Stage::Ingest, Stage::Plots);
}

}  // namespace quantlets
