#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "quantlets/io.hpp"
#include "quantlets/pipeline.hpp"
#include "quantlets/simulate.hpp"

namespace fs = std::filesystem;
using namespace quantlets;

namespace {

int finish(const PipelineResult& r) {
  if (r.ok) {
    std::cout << "done; " << r.artifacts.size() << " artifacts written\n";
    return 0;
  }
  std::cerr << "failed at stage '" << r.failed_stage << "': " << r.error
            << "\n";
  return 1;
}

void apply_overrides(RunConfig& cfg, const std::string& output,
                     std::uint64_t seed, bool seed_set,
                     const std::string& method, int threads) {
  if (!output.empty()) cfg.output_dir = output;
  if (seed_set) cfg.seed = seed;
  if (!method.empty()) cfg.method = method[0];
  if (threads > 0) cfg.threads = threads;
}

void write_scenario_csv(const std::string& path, const ComparisonTable& t) {
  std::ofstream out(path);
  out.precision(10);
  out << "method,coefficient,area,coverage,gbpv\n";
  for (const auto& m : t.methods) {
    if (m.area.size() == 0) continue;
    for (Eigen::Index a = 0; a < m.area.size(); ++a)
      out << fit_method_name(m.method) << ",beta" << a + 1 << "," << m.area[a]
          << "," << m.coverage[a] << "," << m.gbpv[a] << "\n";
  }
  out << "\nmethod,hypothesis,score\n";
  for (const auto& m : t.methods)
    for (const auto& [label, score] : m.moment_scores)
      out << fit_method_name(m.method) << "," << label << "," << score << "\n";
  out << "\nmethod,epsilon,monotonicity_rate\n";
  for (const auto& m : t.methods)
    for (const auto& [eps, rate] : m.monotonicity_rate)
      out << fit_method_name(m.method) << "," << eps << "," << rate << "\n";
  out << "\nmethod,group,gaussianity,ci_lo,ci_hi\n";
  for (const auto& m : t.methods)
    for (const auto& [group, g] : m.gaussianity)
      out << fit_method_name(m.method) << "," << group << "," << g[0] << ","
          << g[1] << "," << g[2] << "\n";
  out << "\nbasis_K," << t.K << "\nthreshold_C," << t.threshold_c
      << "\nrho_min," << t.rho_min << "\nunion_size," << t.union_size << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantlets: quantile functional regression"};
  app.require_subcommand(1);

  std::string config_path, output, method;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;

  auto add_common = [&](CLI::App* cmd, bool config_required) {
    cmd->add_option("--config", config_path, "run configuration JSON")
        ->required(config_required);
    cmd->add_option("--output", output, "output directory override");
    cmd->add_option("--seed", seed, "root seed override")
        ->each([&](const std::string&) { seed_set = true; });
    cmd->add_option("--method", method, "fit method: E D C B F G");
    cmd->add_option("--threads", threads, "worker thread budget");
  };

  auto* cmd_basis = app.add_subcommand(
      "build-basis", "ingest data and construct the quantlet basis");
  add_common(cmd_basis, true);

  auto* cmd_fit = app.add_subcommand(
      "fit", "run the regression sampler on cached basis artifacts");
  add_common(cmd_fit, true);

  auto* cmd_infer = app.add_subcommand(
      "infer", "compute bands, scores and predicted densities from a fit");
  add_common(cmd_infer, true);

  auto* cmd_run =
      app.add_subcommand("run", "full pipeline: build-basis + fit + infer");
  add_common(cmd_run, true);

  auto* cmd_report = app.add_subcommand(
      "report", "re-emit the inference report and plots from artifacts");
  add_common(cmd_report, true);

  auto* cmd_sim = app.add_subcommand(
      "simulate", "regenerate a verification scenario and compare methods");
  int scenario = 1, n_per_group = 10, m_points = 1024, k_over = 1500;
  int iterations = 2000, burn_in = 200;
  std::string sim_methods = "E";
  std::string sim_out = "scenario.csv";
  cmd_sim->add_option("--scenario", scenario, "1 (skew normal) or 2 (mixtures)")
      ->check(CLI::Range(1, 2));
  cmd_sim->add_option("--n-per-group", n_per_group, "subjects per group");
  cmd_sim->add_option("--m", m_points, "measurements per subject");
  cmd_sim->add_option("--k-over", k_over, "dictionary size");
  cmd_sim->add_option("--iterations", iterations, "retained MCMC draws");
  cmd_sim->add_option("--burn-in", burn_in, "burn-in iterations");
  cmd_sim->add_option("--method", sim_methods,
                      "methods to run, e.g. E or BCDEF");
  cmd_sim->add_option("--seed", seed, "scenario seed")
      ->each([&](const std::string&) { seed_set = true; });
  cmd_sim->add_option("--output", sim_out, "comparison table CSV path");
  cmd_sim->add_option("--threads", threads, "worker thread budget");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_sim->parsed()) {
      ScenarioConfig cfg;
      cfg.scenario = scenario;
      cfg.n_per_group = n_per_group;
      cfg.m = m_points;
      cfg.k_over = k_over;
      cfg.mcmc.iterations = iterations;
      cfg.mcmc.burn_in = burn_in;
      cfg.threads = threads;
      if (seed_set) cfg.seed = seed;
      std::vector<FitMethod> methods;
      for (char c : sim_methods) methods.push_back(fit_method_from_name(c));
      const ComparisonTable table = run_scenario(cfg, methods);
      write_scenario_csv(sim_out, table);
      std::cout << "scenario " << scenario << ": K=" << table.K
                << " rho0=" << table.rho_min << " -> " << sim_out << "\n";
      return 0;
    }

    RunConfig cfg = load_run_config(config_path);
    apply_overrides(cfg, output, seed, seed_set, method, threads);

    PipelineResult r;
    if (cmd_basis->parsed()) {
      r = run_stages(cfg, Stage::Ingest, Stage::Coefficients);
    } else if (cmd_fit->parsed()) {
      r = run_stages(cfg, Stage::Fit, Stage::Fit);
    } else if (cmd_infer->parsed()) {
      r = run_stages(cfg, Stage::Inference, Stage::Plots);
    } else if (cmd_report->parsed()) {
      r = run_stages(cfg, Stage::Inference, Stage::Plots);
    } else {
      r = run_pipeline(cfg);
    }
    return finish(r);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
