#include "windgame/report.hpp"

#include <fstream>
#include <iostream>
#include <json.hpp>
#include <stdexcept>

#include "windgame/csv.hpp"

namespace windgame {

namespace {

using csv::format_double;

constexpr std::size_t kLargeTableCells = 1'000'000;

}  // namespace

void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  body(out);
  out.flush();
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

void write_equilibria_csv(const ScenarioResult& result, std::ostream& out) {
  out << "sweep_value,stat,P_N1,P_N2,Pi1,Pi2\n";
  for (const SweepRecord& r : result.records) {
    const auto row = [&](const char* stat, double n1, double n2, double p1, double p2) {
      out << format_double(r.sweep_value) << ',' << stat << ',' << format_double(n1) << ',' << format_double(n2)
          << ',' << format_double(p1) << ',' << format_double(p2) << '\n';
    };
    row("mean", r.p_n1.mean, r.p_n2.mean, r.pi1.mean, r.pi2.mean);
    row("min", r.p_n1.min, r.p_n2.min, r.pi1.min, r.pi2.min);
    row("max", r.p_n1.max, r.p_n2.max, r.pi1.max, r.pi2.max);
  }
}

void write_per_realisation_csv(const ScenarioResult& result, std::ostream& out) {
  out << "sweep_value,realisation,P_N1,P_N2,Pi1,Pi2\n";
  for (std::size_t s = 0; s < result.sweep_values.size(); ++s) {
    for (const RealisationOutcome& o : result.realisations) {
      const EquilibriumPoint& e = o.equilibria[s];
      out << format_double(result.sweep_values[s]) << ',' << o.realisation << ',' << format_double(e.p_n1) << ','
          << format_double(e.p_n2) << ',' << format_double(e.pi1) << ',' << format_double(e.pi2) << '\n';
    }
  }
}

void write_run_json(const ScenarioResult& result, std::ostream& out) {
  const RunMetadata& m = result.meta;
  nlohmann::ordered_json j;
  j["version"] = kVersion;
  j["seed"] = m.seed;
  j["chain"] = {{"samples", m.samples}, {"realisations", m.realisations}, {"burn_in", m.burn_in}};
  j["grid"] = {{"p_n_max", m.p_n_max}, {"step", m.grid_step}};
  j["power_curve"] = {{"alpha", m.curve.alpha}, {"beta", m.curve.beta}};
  if (m.curve_residual) j["power_curve"]["fit_residual"] = *m.curve_residual;
  j["sweep"] = {{"parameter", to_string(m.parameter)}, {"values", result.sweep_values}};
  j["base_costs"] = {{"p_g", m.base_costs.p_g},
                     {"p_t", m.base_costs.p_t},
                     {"c_g1", m.base_costs.c_g1},
                     {"c_g2", m.base_costs.c_g2},
                     {"c_t", m.base_costs.c_t}};
  j["data"] = {{"aligned_records", m.joint_records},
               {"historic_mean_w1", m.historic.w1},
               {"historic_mean_w2", m.historic.w2},
               {"historic_mean_demand", m.historic.demand},
               {"gap_reports", m.gap_reports}};
  nlohmann::ordered_json checksums = nlohmann::ordered_json::array();
  for (const RealisationOutcome& o : result.realisations) checksums.push_back(o.energy_checksum);
  j["energy_checksums"] = checksums;
  j["workers"] = m.workers;
  j["stage_seconds"] = m.stage_seconds;
  out << j.dump(2) << '\n';
}

void emit_report(const ScenarioResult& result, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + out_dir.string() + "': " + ec.message());

  write_file(out_dir / "equilibria.csv", [&](std::ostream& out) { write_equilibria_csv(result, out); });
  write_file(out_dir / "per_realisation.csv", [&](std::ostream& out) { write_per_realisation_csv(result, out); });
  write_file(out_dir / "convergence.csv", [&](std::ostream& out) {
    if (result.convergence) {
      write_stats_csv(out, std::span<const StatsReport>(&*result.convergence, 1));
    } else {
      write_stats_csv(out, {});
    }
  });
  write_file(out_dir / "run.json", [&](std::ostream& out) { write_run_json(result, out); });
}

void write_table_dumps(const SamplerTables& tables, const std::filesystem::path& dir) {
  write_file(dir / "tables.csv", [&](std::ostream& out) { write_table_csv(tables.wind(), out); });
  write_file(dir / "merged_map.csv", [&](std::ostream& out) { write_merged_map_csv(tables.wind(), out); });
  write_file(dir / "demand_table.csv", [&](std::ostream& out) {
    const DemandConditional& d = tables.demand();
    out << "mean_wind_bin,demand_bin,count\n";
    for (std::size_t r = 0; r < d.rows(); ++r) {
      for (std::size_t c = 0; c < d.cols(); ++c) {
        if (d.count(r, c) > 0) out << r << ',' << c << ',' << d.count(r, c) << '\n';
      }
    }
  });
}

void write_energy_dumps(const EnergyTables& energy, const StrategyGrid& grid, const std::filesystem::path& dir) {
  if (energy.n * energy.n > kLargeTableCells) {
    std::cerr << "warning: writing " << energy.n * energy.n << " curtailment cells\n";
  }
  write_file(dir / "energy_generation.csv", [&](std::ostream& out) { write_generation_csv(energy, grid, out); });
  write_file(dir / "energy_curtailment.csv", [&](std::ostream& out) { write_curtailment_csv(energy, grid, out); });
}

}  // namespace windgame
