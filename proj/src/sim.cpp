#include "windgame/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <ostream>

#include "windgame/csv.hpp"
#include "windgame/numeric.hpp"
#include "windgame/parallel.hpp"

namespace windgame {

namespace {

inline CurtailmentShare split_curtailment(double p_g1, double p_g2, double p_d) {
  const double generated = p_g1 + p_g2;
  if (!(generated > p_d)) return {};
  const double curtailed = generated - p_d;
  return {std::min(p_g1, p_g1 * curtailed / generated), std::min(p_g2, p_g2 * curtailed / generated)};
}

double squared_error(std::span<const CurvePoint> points, double alpha, double beta) {
  double sse = 0.0;
  for (const CurvePoint& p : points) {
    const double r = 1.0 / (1.0 + std::exp(-alpha * (p.wind_speed - beta))) - p.per_unit;
    sse += r * r;
  }
  return sse;
}

}  // namespace

void PowerCurve::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("power curve alpha must be positive");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("power curve beta must be positive");
}

double per_unit_output(double wind_speed, const PowerCurve& curve) {
  return 1.0 / (1.0 + std::exp(-curve.alpha * (wind_speed - curve.beta)));
}

SigmoidFit fit_sigmoid(std::span<const CurvePoint> points) {
  if (points.size() < 3) throw std::invalid_argument("sigmoid fit needs at least three points");
  double w_lo = std::numeric_limits<double>::infinity(), w_hi = -w_lo;
  double y_lo = w_lo, y_hi = -w_lo;
  for (const CurvePoint& p : points) {
    if (!(p.per_unit >= 0.0 && p.per_unit <= 1.0)) {
      throw std::invalid_argument("per-unit outputs must lie in [0, 1]");
    }
    w_lo = std::min(w_lo, p.wind_speed);
    w_hi = std::max(w_hi, p.wind_speed);
    y_lo = std::min(y_lo, p.per_unit);
    y_hi = std::max(y_hi, p.per_unit);
  }
  if (y_hi == y_lo) throw std::invalid_argument("cannot fit a sigmoid to constant outputs");
  const double span = std::max(w_hi - w_lo, 1e-6);

  constexpr double alpha_min = 1e-4, alpha_max = 50.0;
  double best_a = 1.0, best_b = 0.5 * (w_lo + w_hi);
  double best = squared_error(points, best_a, best_b);

  // Coarse pass: log-spaced alpha, linear beta.
  constexpr int coarse = 101;
  const double b_lo = w_lo - 0.25 * span, b_hi = w_hi + 0.25 * span;
  for (int ia = 0; ia < coarse; ++ia) {
    const double a = alpha_min * std::pow(alpha_max / alpha_min, ia / double(coarse - 1));
    for (int ib = 0; ib < coarse; ++ib) {
      const double b = b_lo + (b_hi - b_lo) * ib / double(coarse - 1);
      const double e = squared_error(points, a, b);
      if (e < best) best = e, best_a = a, best_b = b;
    }
  }

  // Zoom passes around the incumbent.
  double half_a = best_a * (std::pow(alpha_max / alpha_min, 1.0 / (coarse - 1)) - 1.0);
  double half_b = (b_hi - b_lo) / (coarse - 1);
  constexpr int fine = 21;
  for (int pass = 0; pass < 60; ++pass) {
    const double ca = best_a, cb = best_b;
    for (int ia = 0; ia < fine; ++ia) {
      const double a = std::clamp(ca + half_a * (2.0 * ia / (fine - 1) - 1.0), alpha_min, alpha_max);
      for (int ib = 0; ib < fine; ++ib) {
        const double b = cb + half_b * (2.0 * ib / (fine - 1) - 1.0);
        const double e = squared_error(points, a, b);
        if (e < best) best = e, best_a = a, best_b = b;
      }
    }
    half_a *= 0.5;
    half_b *= 0.5;
  }
  return {{best_a, best_b}, best};
}

std::vector<CurvePoint> load_curve_points(const std::filesystem::path& path, double rated_power) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open power curve file '" + path.string() + "'");
  std::string line;
  if (!csv::read_line(in, line)) throw std::runtime_error("power curve file '" + path.string() + "' is empty");
  const auto header = csv::split_record(line);
  std::size_t wind_col = header.size(), power_col = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto name = csv::trim(header[i]);
    if (name == "wind_speed") wind_col = i;
    if (name == "power") power_col = i;
  }
  if (wind_col == header.size() || power_col == header.size()) {
    throw std::runtime_error("power curve file '" + path.string() + "' needs wind_speed and power columns");
  }

  std::vector<CurvePoint> points;
  while (csv::read_line(in, line)) {
    if (csv::trim(line).empty()) continue;
    const auto fields = csv::split_record(line);
    const auto w = wind_col < fields.size() ? csv::parse_double(fields[wind_col]) : std::nullopt;
    const auto p = power_col < fields.size() ? csv::parse_double(fields[power_col]) : std::nullopt;
    if (!w || !p) throw std::runtime_error("malformed power curve row '" + line + "' in '" + path.string() + "'");
    points.push_back({*w, *p});
  }
  if (points.empty()) throw std::runtime_error("power curve file '" + path.string() + "' has no rows");

  double rated = rated_power;
  if (!(rated > 0.0)) {
    rated = 0.0;
    for (const CurvePoint& p : points) rated = std::max(rated, p.per_unit);
  }
  if (!(rated > 0.0)) throw std::runtime_error("power curve in '" + path.string() + "' is identically zero");
  for (CurvePoint& p : points) p.per_unit /= rated;
  return points;
}

CurtailmentShare curtailment_timestep(double p_g1, double p_g2, double p_d) {
  return split_curtailment(p_g1, p_g2, p_d);
}

StrategyGrid::StrategyGrid(double p_n_max, double step) : p_n_max_(p_n_max), step_(step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("grid step must be positive");
  if (!(p_n_max >= 0.0) || !std::isfinite(p_n_max)) throw std::invalid_argument("grid maximum must be non-negative");
  const double steps = std::round(p_n_max / step);
  if (std::abs(steps * step - p_n_max) > 1e-9 * std::max(1.0, p_n_max)) {
    throw std::invalid_argument("grid maximum must be a whole number of steps");
  }
  const auto count = static_cast<std::size_t>(steps) + 1;
  values_.reserve(count);
  for (std::size_t k = 0; k < count; ++k) values_.push_back(static_cast<double>(k) * step);
  values_.back() = p_n_max;
}

PerUnitSeries PerUnitSeries::from(const Realisation& realisation, const PowerCurve& curve) {
  curve.validate();
  PerUnitSeries s;
  s.x1.reserve(realisation.samples.size());
  s.x2.reserve(realisation.samples.size());
  s.demand.reserve(realisation.samples.size());
  for (const ChainState& state : realisation.samples) {
    s.x1.push_back(per_unit_output(state.w1, curve));
    s.x2.push_back(per_unit_output(state.w2, curve));
    s.demand.push_back(state.demand);
  }
  return s;
}

EnergyTables build_energy_tables(const PerUnitSeries& series, const StrategyGrid& grid, const EnergyOptions& options) {
  if (series.size() == 0) throw std::invalid_argument("cannot build energy tables from an empty realisation");
  if (series.x1.size() != series.size() || series.x2.size() != series.size()) {
    throw std::invalid_argument("per-unit series lengths differ");
  }
  if (!(options.timestep_hours > 0.0)) throw std::invalid_argument("timestep must be positive");

  const std::size_t n = grid.size();
  const std::size_t steps = series.size();
  const double dt = options.timestep_hours;
  const auto capacity = grid.values();

  EnergyTables out;
  out.n = n;
  out.timestep_hours = dt;
  out.e_g1.resize(n);
  out.e_g2.resize(n);
  out.e_c1.assign(n * n, 0.0);
  out.e_c2.assign(n * n, 0.0);

  for (std::size_t k = 0; k < n; ++k) {
    CompensatedSum g1, g2;
    for (std::size_t t = 0; t < steps; ++t) {
      g1.add(series.x1[t] * capacity[k] * dt);
      g2.add(series.x2[t] * capacity[k] * dt);
    }
    out.e_g1[k] = g1.value();
    out.e_g2[k] = g2.value();
  }

  // Each row owns its cells; timesteps are accumulated in order within a row.
  parallel_for(n, options.workers, [&](std::size_t i) {
    std::vector<CompensatedSum> c1(n), c2(n);
    for (std::size_t t = 0; t < steps; ++t) {
      const double p_g1 = series.x1[t] * capacity[i];
      const double x2 = series.x2[t];
      const double p_d = series.demand[t];
      for (std::size_t j = 0; j < n; ++j) {
        const CurtailmentShare share = split_curtailment(p_g1, x2 * capacity[j], p_d);
        if (share.player1 == 0.0 && share.player2 == 0.0) continue;
        c1[j].add(share.player1 * dt);
        c2[j].add(share.player2 * dt);
      }
    }
    for (std::size_t j = 0; j < n; ++j) {
      out.e_c1[i * n + j] = c1[j].value();
      out.e_c2[i * n + j] = c2[j].value();
    }
  });
  return out;
}

EnergyTables build_energy_tables(const Realisation& realisation, const PowerCurve& curve, const StrategyGrid& grid,
                                 const EnergyOptions& options) {
  return build_energy_tables(PerUnitSeries::from(realisation, curve), grid, options);
}

std::uint64_t checksum(const EnergyTables& tables) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  const auto mix = [&h](const void* data, std::size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ull;
    }
  };
  mix(&tables.n, sizeof tables.n);
  mix(&tables.timestep_hours, sizeof tables.timestep_hours);
  for (const auto* v : {&tables.e_g1, &tables.e_g2, &tables.e_c1, &tables.e_c2}) {
    mix(v->data(), v->size() * sizeof(double));
  }
  return h;
}

void write_curtailment_csv(const EnergyTables& tables, const StrategyGrid& grid, std::ostream& out) {
  out << "i,j,P_N1,P_N2,E_C1,E_C2\n";
  for (std::size_t i = 0; i < tables.n; ++i) {
    for (std::size_t j = 0; j < tables.n; ++j) {
      out << i << ',' << j << ',' << csv::format_double(grid[i]) << ',' << csv::format_double(grid[j]) << ','
          << csv::format_double(tables.c1(i, j)) << ',' << csv::format_double(tables.c2(i, j)) << '\n';
    }
  }
}

void write_generation_csv(const EnergyTables& tables, const StrategyGrid& grid, std::ostream& out) {
  out << "k,P_N,E_G1,E_G2\n";
  for (std::size_t k = 0; k < tables.n; ++k) {
    out << k << ',' << csv::format_double(grid[k]) << ',' << csv::format_double(tables.e_g1[k]) << ','
        << csv::format_double(tables.e_g2[k]) << '\n';
  }
}

}  // namespace windgame
