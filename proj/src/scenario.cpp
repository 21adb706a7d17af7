#include "windgame/scenario.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>

#include "windgame/parallel.hpp"
#include "windgame/report.hpp"

namespace windgame {

namespace {

namespace pt = boost::property_tree;

class StageClock {
 public:
  StageClock(std::ostream* log, std::map<std::string, double>& seconds) : log_(log), seconds_(seconds) {}

  template <typename F>
  auto run(const std::string& stage, F&& body) {
    const auto start = std::chrono::steady_clock::now();
    if (log_) *log_ << "[" << stage << "] start\n" << std::flush;
    try {
      if constexpr (std::is_void_v<decltype(body())>) {
        body();
        finish(stage, start);
      } else {
        auto result = body();
        finish(stage, start);
        return result;
      }
    } catch (const ScenarioError&) {
      throw;
    } catch (const std::exception& e) {
      throw ScenarioError(stage, e.what());
    }
  }

  void note(const std::string& stage, const std::string& message) const {
    if (log_) *log_ << "[" << stage << "] " << message << '\n' << std::flush;
  }

 private:
  void finish(const std::string& stage, std::chrono::steady_clock::time_point start) {
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    seconds_[stage] += s;
    if (log_) *log_ << "[" << stage << "] done in " << s << " s\n" << std::flush;
  }

  std::ostream* log_;
  std::map<std::string, double>& seconds_;
};

template <typename T>
std::optional<T> get_optional(const pt::ptree& tree, const std::string& key) {
  if (const auto v = tree.get_optional<std::string>(key)) {
    if (v->empty()) return std::nullopt;
    try {
      return tree.get<T>(key);
    } catch (const pt::ptree_bad_data&) {
      throw std::invalid_argument("config key '" + key + "' has invalid value '" + *v + "'");
    }
  }
  return std::nullopt;
}

template <typename T>
void read_into(const pt::ptree& tree, const std::string& key, T& target) {
  if (const auto v = get_optional<T>(tree, key)) target = *v;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
  const std::filesystem::path p(value);
  return p.is_absolute() ? p : base / p;
}

SeriesSource read_source(const pt::ptree& tree, const std::filesystem::path& base, const std::string& name,
                         const std::string& default_value_column) {
  SeriesSource source;
  const auto path = tree.get_optional<std::string>("data." + name);
  if (!path || path->empty()) throw std::invalid_argument("config is missing data." + name);
  source.path = resolve(base, *path);
  source.columns.timestamp = tree.get<std::string>("data." + name + "_timestamp_column", "timestamp");
  source.columns.value = tree.get<std::string>("data." + name + "_value_column", default_value_column);
  return source;
}

double round_sweep_value(double v) { return std::round(v * 1e12) / 1e12; }

}  // namespace

std::string to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::c_g1:
      return "c_g1";
    case SweepParameter::c_g2:
      return "c_g2";
    case SweepParameter::p_t:
      return "p_t";
  }
  return "?";
}

SweepParameter parse_sweep_parameter(const std::string& name) {
  if (name == "c_g1") return SweepParameter::c_g1;
  if (name == "c_g2") return SweepParameter::c_g2;
  if (name == "p_t") return SweepParameter::p_t;
  throw std::invalid_argument("sweep parameter must be one of c_g1, c_g2, p_t (got '" + name + "')");
}

std::vector<double> SweepSpec::points() const {
  if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("sweep step must be positive");
  if (!(stop >= start)) throw std::invalid_argument("sweep range is empty: stop < start");
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(round_sweep_value(start + static_cast<double>(k) * step));
  return out;
}

Profile parse_profile(const std::string& name) {
  if (name == "desk") return Profile::desk;
  if (name == "paper") return Profile::paper;
  throw std::invalid_argument("profile must be 'desk' or 'paper' (got '" + name + "')");
}

void ScenarioConfig::validate() const {
  chain.validate();
  if (!curve && !curve_points) throw std::invalid_argument("config needs power_curve.points or alpha/beta");
  if (curve) curve->validate();
  if (!(wind_bin_width > 0.0) || !(demand_bin_width > 0.0)) throw std::invalid_argument("bin widths must be positive");
  if (min_count == 0) throw std::invalid_argument("min_count must be at least 1");
  if (demand_target_mean && !(*demand_target_mean > 0.0)) {
    throw std::invalid_argument("demand target mean must be positive");
  }
  StrategyGrid(p_n_max, grid_step);
  costs.validate();
  if (line_cost_per_hour && !(*line_cost_per_hour >= 0.0)) {
    throw std::invalid_argument("line cost per hour must be non-negative");
  }
  const auto values = sweep.points();
  for (double v : values) {
    if (!(v >= 0.0)) throw std::invalid_argument("sweep values must be non-negative");
  }
}

CostParams ScenarioConfig::costs_at(double sweep_value, double simulated_hours) const {
  const double scale = costs_as_fractions ? costs.p_g : 1.0;
  CostParams c = costs;
  c.p_t = costs.p_t * scale;
  c.c_g1 = costs.c_g1 * scale;
  c.c_g2 = costs.c_g2 * scale;
  switch (sweep.parameter) {
    case SweepParameter::c_g1:
      c.c_g1 = sweep_value * scale;
      break;
    case SweepParameter::c_g2:
      c.c_g2 = sweep_value * scale;
      break;
    case SweepParameter::p_t:
      c.p_t = sweep_value * scale;
      break;
  }
  if (line_cost_per_hour) c.c_t = *line_cost_per_hour * simulated_hours;
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument("cannot read config '" + path.string() + "': " + e.message());
  }
  const std::filesystem::path base = path.parent_path();

  ScenarioConfig c;
  c.wind1 = read_source(tree, base, "wind1", "wind_speed");
  c.wind2 = read_source(tree, base, "wind2", "wind_speed");
  c.demand = read_source(tree, base, "demand", "demand");
  if (const auto target = tree.get_optional<std::string>("data.demand_target_mean")) {
    if (*target == "none" || *target == "off") {
      c.demand_target_mean.reset();
    } else {
      c.demand_target_mean = get_optional<double>(tree, "data.demand_target_mean");
    }
  }

  read_into(tree, "bins.wind_width", c.wind_bin_width);
  read_into(tree, "bins.demand_width", c.demand_bin_width);
  read_into(tree, "bins.min_count", c.min_count);

  read_into(tree, "chain.samples", c.chain.samples);
  read_into(tree, "chain.realisations", c.chain.realisations);
  read_into(tree, "chain.burn_in", c.chain.burn_in_fraction);
  read_into(tree, "chain.seed", c.chain.seed);

  const auto alpha = get_optional<double>(tree, "power_curve.alpha");
  const auto beta = get_optional<double>(tree, "power_curve.beta");
  if (alpha.has_value() != beta.has_value()) {
    throw std::invalid_argument("power_curve.alpha and power_curve.beta must be given together");
  }
  if (alpha) c.curve = PowerCurve{*alpha, *beta};
  if (const auto points = tree.get_optional<std::string>("power_curve.points"); points && !points->empty()) {
    c.curve_points = resolve(base, *points);
  }
  read_into(tree, "power_curve.rated_power", c.curve_rated_power);

  read_into(tree, "grid.p_n_max", c.p_n_max);
  read_into(tree, "grid.step", c.grid_step);

  const std::string units = tree.get<std::string>("costs.units", "fraction");
  if (units != "fraction" && units != "absolute") {
    throw std::invalid_argument("costs.units must be 'fraction' or 'absolute'");
  }
  c.costs_as_fractions = units == "fraction";
  read_into(tree, "costs.p_g", c.costs.p_g);
  read_into(tree, "costs.p_t", c.costs.p_t);
  read_into(tree, "costs.c_g1", c.costs.c_g1);
  read_into(tree, "costs.c_g2", c.costs.c_g2);
  read_into(tree, "costs.c_t", c.costs.c_t);
  c.line_cost_per_hour = get_optional<double>(tree, "costs.c_t_per_hour");

  const auto parameter = tree.get_optional<std::string>("sweep.parameter");
  if (!parameter) throw std::invalid_argument("config is missing sweep.parameter");
  c.sweep.parameter = parse_sweep_parameter(*parameter);
  const auto start = get_optional<double>(tree, "sweep.start");
  if (!start) throw std::invalid_argument("config is missing sweep.start");
  c.sweep.start = *start;
  c.sweep.stop = get_optional<double>(tree, "sweep.stop").value_or(*start);
  c.sweep.step = get_optional<double>(tree, "sweep.step").value_or(1.0);

  read_into(tree, "run.workers", c.workers);
  if (const auto profile = tree.get_optional<std::string>("run.profile"); profile && !profile->empty()) {
    apply_profile(c, parse_profile(*profile));
  }

  c.validate();
  return c;
}

void apply_profile(ScenarioConfig& config, Profile profile) {
  switch (profile) {
    case Profile::desk:
      config.chain.samples = 5000;
      config.chain.realisations = 10;
      config.grid_step = 5.0;
      config.p_n_max = 100.0;
      break;
    case Profile::paper:
      config.chain.samples = 50000;
      config.chain.realisations = 170;
      config.grid_step = 0.5;
      config.p_n_max = 500.5;
      break;
  }
}

Summary summarise(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("cannot summarise an empty set");
  Summary s{0.0, values.front(), values.front()};
  for (double v : values) {
    s.mean += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.mean /= static_cast<double>(values.size());
  // the running mean can drift outside [min, max] by rounding when all values agree
  s.mean = std::clamp(s.mean, s.min, s.max);
  return s;
}

JointSeries load_joint_series(const ScenarioConfig& config, std::vector<std::string>* gap_reports) {
  const auto load = [&](const SeriesSource& source) {
    LoadedSeries loaded = load_series_csv(source.path, source.columns);
    if (gap_reports) gap_reports->push_back(loaded.gaps.summary());
    return std::move(loaded.series);
  };
  const TimeSeries w1 = load(config.wind1);
  const TimeSeries w2 = load(config.wind2);
  TimeSeries demand = load(config.demand);
  if (config.demand_target_mean) demand = normalize_demand(demand, *config.demand_target_mean);
  return align_series(w1, w2, demand);
}

SamplerTables build_tables(const ScenarioConfig& config, const JointSeries& joint) {
  TableOptions options = TableOptions::defaults_for(joint, config.wind_bin_width, config.demand_bin_width);
  options.min_count = config.min_count;
  return SamplerTables::build(joint, options);
}

ScenarioResult run_scenario(const ScenarioConfig& config, const RunOptions& options) {
  ScenarioResult result;
  RunMetadata& meta = result.meta;
  StageClock clock(options.log, meta.stage_seconds);

  clock.run("config", [&] { config.validate(); });
  const std::size_t workers = options.workers > 0 ? options.workers : std::max<std::size_t>(config.workers, 1);

  std::vector<std::string> gaps;
  const JointSeries joint = clock.run("ingest", [&] {
    JointSeries j = load_joint_series(config, &gaps);
    for (const auto& g : gaps) clock.note("ingest", g);
    clock.note("ingest", std::to_string(j.size()) + " aligned records");
    return j;
  });

  const SamplerTables tables = clock.run("dist", [&] {
    SamplerTables t = build_tables(config, joint);
    t.require_ergodic();
    clock.note("dist", std::to_string(t.wind().rows()) + "x" + std::to_string(t.wind().cols()) +
                           " retained wind bins, " + std::to_string(t.demand().rows()) + " mean-wind rows");
    return t;
  });

  meta.seed = config.chain.seed;
  meta.samples = config.chain.samples;
  meta.realisations = config.chain.realisations;
  meta.burn_in = config.chain.burn_in();
  meta.p_n_max = config.p_n_max;
  meta.grid_step = config.grid_step;
  meta.parameter = config.sweep.parameter;
  meta.joint_records = joint.size();
  meta.historic = historic_means(joint);
  meta.gap_reports = gaps;
  meta.workers = workers;

  meta.curve = clock.run("curve", [&] {
    if (config.curve) return *config.curve;
    const auto points = load_curve_points(*config.curve_points, config.curve_rated_power);
    const SigmoidFit fit = fit_sigmoid(points);
    meta.curve_residual = fit.residual;
    clock.note("curve", "alpha=" + std::to_string(fit.curve.alpha) + " beta=" + std::to_string(fit.curve.beta));
    return fit.curve;
  });

  const StrategyGrid grid(config.p_n_max, config.grid_step);
  result.sweep_values = config.sweep.points();
  const double simulated_hours = static_cast<double>(config.chain.retained());
  meta.base_costs = config.costs_at(result.sweep_values.front(), simulated_hours);

  std::vector<CostParams> sweep_costs;
  for (double v : result.sweep_values) sweep_costs.push_back(config.costs_at(v, simulated_hours));

  const bool keep_chains = options.dump_dir && options.dump_realisations;
  std::vector<Realisation> kept(keep_chains ? config.chain.realisations : 0);
  std::optional<EnergyTables> first_energy;
  std::optional<Equilibrium> first_equilibrium;

  result.realisations.resize(config.chain.realisations);
  clock.run("simulate", [&] {
    parallel_for(config.chain.realisations, workers, [&](std::size_t k) {
      Realisation chain = run_chain(config.chain, tables, k);
      RealisationOutcome& outcome = result.realisations[k];
      outcome.realisation = k;
      outcome.means = sample_means(chain);
      const EnergyTables energy = build_energy_tables(chain, meta.curve, grid);
      outcome.energy_checksum = checksum(energy);
      outcome.equilibria.reserve(sweep_costs.size());
      for (std::size_t s = 0; s < sweep_costs.size(); ++s) {
        const Equilibrium eq = stackelberg(profit_surfaces(energy, sweep_costs[s]), grid);
        outcome.equilibria.push_back({eq.p_n1, eq.p_n2, eq.pi1, eq.pi2});
        if (k == 0 && s == 0 && options.dump_best_response) first_equilibrium = eq;
      }
      if (k == 0 && options.dump_energy) first_energy = energy;
      if (keep_chains) kept[k] = std::move(chain);
    });
    clock.note("simulate", std::to_string(config.chain.realisations) + " realisations x " +
                               std::to_string(result.sweep_values.size()) + " sweep points");
  });

  clock.run("aggregate", [&] {
    for (std::size_t s = 0; s < result.sweep_values.size(); ++s) {
      std::vector<double> n1, n2, p1, p2;
      for (const RealisationOutcome& o : result.realisations) {
        n1.push_back(o.equilibria[s].p_n1);
        n2.push_back(o.equilibria[s].p_n2);
        p1.push_back(o.equilibria[s].pi1);
        p2.push_back(o.equilibria[s].pi2);
      }
      result.records.push_back({result.sweep_values[s], summarise(n1), summarise(n2), summarise(p1), summarise(p2)});
    }
    if (result.realisations.size() >= 2) {
      std::vector<SampleMeans> means;
      for (const RealisationOutcome& o : result.realisations) means.push_back(o.means);
      StatsReport report = convergence_stats(means, meta.historic);
      report.samples = config.chain.samples;
      result.convergence = report;
    }
  });

  if (options.dump_dir) {
    clock.run("dump", [&] {
      const auto& dir = *options.dump_dir;
      std::filesystem::create_directories(dir);
      if (options.dump_tables) write_table_dumps(tables, dir);
      if (keep_chains) write_file(dir / "realisations.csv", [&](std::ostream& out) { write_realisations_csv(kept, out); });
      if (first_energy) write_energy_dumps(*first_energy, grid, dir);
      if (first_equilibrium) {
        write_file(dir / "best_response.csv",
                   [&](std::ostream& out) { write_best_response_csv(*first_equilibrium, grid, out); });
      }
    });
  }
  return result;
}

}  // namespace windgame

namespace windgame {

std::vector<StatsReport> convergence_study(const ScenarioConfig& config, const std::vector<std::size_t>& samples,
                                           const std::vector<std::size_t>& realisations, const RunOptions& options) {
  std::map<std::string, double> seconds;
  StageClock clock(options.log, seconds);
  const std::size_t workers = options.workers > 0 ? options.workers : std::max<std::size_t>(config.workers, 1);

  const JointSeries joint = clock.run("ingest", [&] { return load_joint_series(config); });
  const SamplerTables tables = clock.run("dist", [&] {
    SamplerTables t = build_tables(config, joint);
    t.require_ergodic();
    return t;
  });
  const SampleMeans historic = historic_means(joint);

  std::vector<StatsReport> rows;
  for (std::size_t n : samples) {
    for (std::size_t count : realisations) {
      rows.push_back(clock.run("gibbs", [&] {
        ChainConfig chain = config.chain;
        chain.samples = n;
        chain.realisations = count;
        chain.validate();
        std::vector<SampleMeans> means(count);
        parallel_for(count, workers, [&](std::size_t k) { means[k] = sample_means(run_chain(chain, tables, k)); });
        StatsReport report = convergence_stats(means, historic);
        report.samples = n;
        clock.note("gibbs", "n=" + std::to_string(n) + " N=" + std::to_string(count));
        return report;
      }));
    }
  }
  return rows;
}

}  // namespace windgame
