#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>

#include "windgame/gibbs.hpp"
#include "windgame/scenario.hpp"
#include "windgame/sim.hpp"

namespace windgame {

// Opens path for writing and hands the stream to body; I/O failures are
// reported with the path.
void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body);

// equilibria.csv, per_realisation.csv, convergence.csv and run.json.
void emit_report(const ScenarioResult& result, const std::filesystem::path& out_dir);

void write_equilibria_csv(const ScenarioResult& result, std::ostream& out);
void write_per_realisation_csv(const ScenarioResult& result, std::ostream& out);
void write_run_json(const ScenarioResult& result, std::ostream& out);

// tables.csv, merged_map.csv, demand_table.csv
void write_table_dumps(const SamplerTables& tables, const std::filesystem::path& dir);
// energy_generation.csv, energy_curtailment.csv
void write_energy_dumps(const EnergyTables& energy, const StrategyGrid& grid, const std::filesystem::path& dir);

}  // namespace windgame
