// Command-line front end: scenario runs, convergence studies and power-curve
// fitting.

#include <CLI11.hpp>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>

#include "windgame/convergence.hpp"
#include "windgame/report.hpp"
#include "windgame/scenario.hpp"
#include "windgame/sim.hpp"

namespace {

using namespace windgame;

int fail(const std::string& stage, const std::string& message) {
  std::cerr << "error [" << stage << "]: " << message << '\n';
  return 1;
}

ScenarioConfig load_with_overrides(const std::string& path, const std::optional<std::string>& profile,
                                   const std::optional<std::uint64_t>& seed) {
  ScenarioConfig config = load_config(path);
  if (profile) apply_profile(config, parse_profile(*profile));
  if (seed) config.chain.seed = *seed;
  config.validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wind/demand scenario synthesis and line-investment Stackelberg equilibria"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::string config_path, out_dir, points_path;
  std::size_t workers = 0;
  std::optional<std::string> profile;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  RunOptions run_options;

  auto* run = app.add_subcommand("run", "Run one scenario sweep and write the report files");
  run->add_option("--config", config_path, "Scenario config (INI)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--workers", workers, "Realisations simulated in parallel");
  run->add_option("--profile", profile, "Override chain/grid sizes")->check(CLI::IsMember({"desk", "paper"}));
  run->add_option("--seed", seed, "Master seed");
  run->add_flag("--dump-tables", run_options.dump_tables, "Write binned tables and merge maps");
  run->add_flag("--dump-realisations", run_options.dump_realisations, "Write every sampled chain");
  run->add_flag("--dump-energy", run_options.dump_energy, "Write energy tables of realisation 0");
  run->add_flag("--dump-best-response", run_options.dump_best_response,
                "Write the best-response curve of realisation 0 at the first sweep point");
  run->add_flag("-q,--quiet", quiet, "No progress on standard error");

  std::vector<std::size_t> study_samples, study_realisations;
  auto* stats = app.add_subcommand("stats", "Convergence study of the Gibbs sampler");
  stats->add_option("--config", config_path, "Scenario config (INI)")->required()->check(CLI::ExistingFile);
  stats->add_option("--samples", study_samples, "Chain lengths n (default: config)")->delimiter(',');
  stats->add_option("--realisations", study_realisations, "Ensemble sizes N (default: config)")->delimiter(',');
  stats->add_option("--workers", workers, "Chains run in parallel");
  stats->add_option("--seed", seed, "Master seed");
  stats->add_option("--out", out_dir, "Also write convergence.csv here");
  stats->add_flag("-q,--quiet", quiet, "No progress on standard error");

  double rated_power = 0.0;
  auto* fit = app.add_subcommand("fit-curve", "Fit sigmoid power-curve parameters");
  fit->add_option("--points", points_path, "CSV with wind_speed and power columns")
      ->required()
      ->check(CLI::ExistingFile);
  fit->add_option("--rated-power", rated_power, "Rated power (default: largest power in the file)");

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    ScenarioConfig config;
    try {
      config = load_with_overrides(config_path, profile, seed);
    } catch (const std::exception& e) {
      return fail("config", e.what());
    }
    run_options.workers = workers;
    run_options.log = quiet ? nullptr : &std::cerr;
    if (run_options.dump_tables || run_options.dump_realisations || run_options.dump_energy ||
        run_options.dump_best_response) {
      run_options.dump_dir = out_dir;
    }
    try {
      const ScenarioResult result = run_scenario(config, run_options);
      emit_report(result, out_dir);
      std::cout << "sweep " << to_string(config.sweep.parameter) << " over " << result.records.size()
                << " points, " << result.realisations.size() << " realisations -> " << out_dir << '\n';
      std::cout << std::setw(12) << "value" << std::setw(12) << "P_N1" << std::setw(12) << "P_N2" << std::setw(16)
                << "Pi1" << std::setw(16) << "Pi2" << '\n';
      for (const SweepRecord& r : result.records) {
        std::cout << std::fixed << std::setprecision(3) << std::setw(12) << r.sweep_value << std::setw(12)
                  << r.p_n1.mean << std::setw(12) << r.p_n2.mean << std::setprecision(1) << std::setw(16)
                  << r.pi1.mean << std::setw(16) << r.pi2.mean << '\n';
      }
    } catch (const ScenarioError& e) {
      return fail(e.stage(), e.what());
    } catch (const std::exception& e) {
      return fail("report", e.what());
    }
    return 0;
  }

  if (*stats) {
    ScenarioConfig config;
    try {
      config = load_with_overrides(config_path, std::nullopt, seed);
    } catch (const std::exception& e) {
      return fail("config", e.what());
    }
    if (study_samples.empty()) study_samples.push_back(config.chain.samples);
    if (study_realisations.empty()) study_realisations.push_back(config.chain.realisations);
    RunOptions options;
    options.workers = workers;
    options.log = quiet ? nullptr : &std::cerr;
    try {
      const auto rows = convergence_study(config, study_samples, study_realisations, options);
      print_stats_table(std::cout, rows);
      if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        write_file(std::filesystem::path(out_dir) / "convergence.csv",
                   [&](std::ostream& out) { write_stats_csv(out, rows); });
      }
    } catch (const ScenarioError& e) {
      return fail(e.stage(), e.what());
    } catch (const std::exception& e) {
      return fail("stats", e.what());
    }
    return 0;
  }

  if (*fit) {
    try {
      const auto points = load_curve_points(points_path, rated_power);
      const SigmoidFit result = fit_sigmoid(points);
      std::cout << std::setprecision(10) << "alpha = " << result.curve.alpha << '\n'
                << "beta = " << result.curve.beta << '\n'
                << "residual = " << result.residual << '\n';
    } catch (const std::exception& e) {
      return fail("fit-curve", e.what());
    }
    return 0;
  }
  return 0;
}
