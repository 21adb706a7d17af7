#pragma once

// End-to-end scenario runner: ingest, tables, Gibbs ensemble, then energy
// tables and equilibria for every point of one cost-parameter sweep.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "windgame/convergence.hpp"
#include "windgame/game.hpp"
#include "windgame/gibbs.hpp"
#include "windgame/ingest.hpp"
#include "windgame/sim.hpp"

namespace windgame {

inline constexpr const char* kVersion = "0.1.0";

// Failure in one pipeline stage; what() carries the underlying message.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string stage, const std::string& message)
      : std::runtime_error(message), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

enum class SweepParameter { c_g1, c_g2, p_t };

std::string to_string(SweepParameter p);
SweepParameter parse_sweep_parameter(const std::string& name);

struct SweepSpec {
  SweepParameter parameter = SweepParameter::c_g1;
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;

  // start, start + step, ... up to stop (inclusive within rounding).
  std::vector<double> points() const;
};

struct SeriesSource {
  std::filesystem::path path;
  ColumnMap columns;
};

enum class Profile { desk, paper };

Profile parse_profile(const std::string& name);

struct ScenarioConfig {
  SeriesSource wind1;
  SeriesSource wind2;
  SeriesSource demand;
  std::optional<double> demand_target_mean = 108.1830;

  double wind_bin_width = 1.0;
  double demand_bin_width = 5.0;
  std::size_t min_count = 10;

  ChainConfig chain;

  std::optional<std::filesystem::path> curve_points;
  double curve_rated_power = 0.0;
  std::optional<PowerCurve> curve;  // explicit parameters take precedence

  double p_n_max = 100.0;
  double grid_step = 5.0;

  // p_t, c_g1, c_g2 and sweep values are fractions of p_g when true.
  bool costs_as_fractions = true;
  CostParams costs;
  // When set, C_T = rate * simulated hours and costs.c_t is ignored.
  std::optional<double> line_cost_per_hour;

  SweepSpec sweep;
  std::size_t workers = 1;

  void validate() const;
  // Absolute cost parameters at one sweep value.
  CostParams costs_at(double sweep_value, double simulated_hours) const;
};

// Flat INI file; relative paths resolve against the file's directory.
ScenarioConfig load_config(const std::filesystem::path& path);
void apply_profile(ScenarioConfig& config, Profile profile);

struct Summary {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct EquilibriumPoint {
  double p_n1 = 0.0;
  double p_n2 = 0.0;
  double pi1 = 0.0;
  double pi2 = 0.0;
};

struct SweepRecord {
  double sweep_value = 0.0;
  Summary p_n1, p_n2, pi1, pi2;
};

struct RealisationOutcome {
  std::size_t realisation = 0;
  SampleMeans means;
  std::uint64_t energy_checksum = 0;
  std::vector<EquilibriumPoint> equilibria;  // one per sweep point
};

struct RunMetadata {
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  std::size_t realisations = 0;
  std::size_t burn_in = 0;
  double p_n_max = 0.0;
  double grid_step = 0.0;
  PowerCurve curve;
  std::optional<double> curve_residual;
  SweepParameter parameter = SweepParameter::c_g1;
  CostParams base_costs;  // absolute, before the swept parameter is applied
  std::size_t joint_records = 0;
  SampleMeans historic;
  std::vector<std::string> gap_reports;
  std::map<std::string, double> stage_seconds;
  std::size_t workers = 1;
};

struct ScenarioResult {
  std::vector<double> sweep_values;
  std::vector<SweepRecord> records;
  std::vector<RealisationOutcome> realisations;
  std::optional<StatsReport> convergence;  // present when N >= 2
  RunMetadata meta;
};

struct RunOptions {
  std::size_t workers = 0;            // 0 keeps config.workers
  std::ostream* log = nullptr;        // stage progress; results never go here
  std::optional<std::filesystem::path> dump_dir;
  bool dump_tables = false;           // tables.csv, merged_map.csv
  bool dump_realisations = false;     // realisations.csv (every chain)
  bool dump_energy = false;           // realisation 0 energy tables
  bool dump_best_response = false;    // realisation 0, first sweep point
};

ScenarioResult run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

// Loads the three configured series, normalises demand and aligns them.
JointSeries load_joint_series(const ScenarioConfig& config, std::vector<std::string>* gap_reports = nullptr);
// Merged sampler tables with the configured bin widths and min_count.
SamplerTables build_tables(const ScenarioConfig& config, const JointSeries& joint);

// One convergence report per (samples, realisations) pair, all drawn from the
// configured master seed.
std::vector<StatsReport> convergence_study(const ScenarioConfig& config, const std::vector<std::size_t>& samples,
                                           const std::vector<std::size_t>& realisations,
                                           const RunOptions& options = {});

Summary summarise(const std::vector<double>& values);

}  // namespace windgame
