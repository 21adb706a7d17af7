#pragma once

// Wind-to-power conversion and aggregate generation/curtailment over the
// capacity grid.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "windgame/gibbs.hpp"

namespace windgame {

// Per-unit output 1 / (1 + exp(-alpha (w - beta))).
struct PowerCurve {
  double alpha = 1.0;  // 1/(m/s)
  double beta = 1.0;   // m/s

  void validate() const;
};

double per_unit_output(double wind_speed, const PowerCurve& curve);

struct CurvePoint {
  double wind_speed = 0.0;
  double per_unit = 0.0;
};

struct SigmoidFit {
  PowerCurve curve;
  double residual = 0.0;  // sum of squared errors
};

// Least-squares (alpha, beta) by a coarse grid followed by repeated zoomed
// grids around the incumbent.
SigmoidFit fit_sigmoid(std::span<const CurvePoint> points);

// Reads wind_speed and power columns; power is divided by rated_power, or by
// the largest power in the file when rated_power <= 0.
std::vector<CurvePoint> load_curve_points(const std::filesystem::path& path, double rated_power = 0.0);

struct CurtailmentShare {
  double player1 = 0.0;
  double player2 = 0.0;
};

// Curtailed power max(0, p_g1 + p_g2 - p_d), split pro rata to output.
CurtailmentShare curtailment_timestep(double p_g1, double p_g2, double p_d);

class StrategyGrid {
 public:
  // 0, step, 2 step, ..., p_n_max. p_n_max must be a whole number of steps.
  StrategyGrid(double p_n_max, double step);

  double p_n_max() const noexcept { return p_n_max_; }
  double step() const noexcept { return step_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

 private:
  double p_n_max_;
  double step_;
  std::vector<double> values_;
};

struct PerUnitSeries {
  std::vector<double> x1;
  std::vector<double> x2;
  std::vector<double> demand;

  static PerUnitSeries from(const Realisation& realisation, const PowerCurve& curve);
  std::size_t size() const noexcept { return demand.size(); }
};

struct EnergyTables {
  std::size_t n = 0;  // grid size, both players
  double timestep_hours = 1.0;
  std::vector<double> e_g1;  // [i]
  std::vector<double> e_g2;  // [j]
  std::vector<double> e_c1;  // [i * n + j]
  std::vector<double> e_c2;  // [i * n + j]

  double c1(std::size_t i, std::size_t j) const { return e_c1[i * n + j]; }
  double c2(std::size_t i, std::size_t j) const { return e_c2[i * n + j]; }
};

struct EnergyOptions {
  double timestep_hours = 1.0;
  std::size_t workers = 1;  // partitions grid rows; result does not depend on it
};

// Every entry is a compensated (Neumaier) sum over timesteps in order, so the
// tables match a plain per-timestep loop with the same accumulator exactly.
EnergyTables build_energy_tables(const PerUnitSeries& series, const StrategyGrid& grid,
                                 const EnergyOptions& options = {});
EnergyTables build_energy_tables(const Realisation& realisation, const PowerCurve& curve, const StrategyGrid& grid,
                                 const EnergyOptions& options = {});

// FNV-1a over the table contents; equal tables give equal checksums.
std::uint64_t checksum(const EnergyTables& tables);

// i,j,P_N1,P_N2,E_C1,E_C2
void write_curtailment_csv(const EnergyTables& tables, const StrategyGrid& grid, std::ostream& out);
// k,P_N,E_G1,E_G2
void write_generation_csv(const EnergyTables& tables, const StrategyGrid& grid, std::ostream& out);

}  // namespace windgame
