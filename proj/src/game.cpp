#include "windgame/game.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "windgame/csv.hpp"

namespace windgame {

void CostParams::validate() const {
  if (!(p_g > 0.0) || !std::isfinite(p_g)) throw std::invalid_argument("tariff p_g must be positive");
  for (double v : {p_t, c_g1, c_g2, c_t}) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("costs and fees must be non-negative");
  }
}

ProfitSurfaces profit_surfaces(const EnergyTables& tables, const CostParams& costs) {
  costs.validate();
  const std::size_t n = tables.n;
  if (tables.e_g1.size() != n || tables.e_g2.size() != n || tables.e_c1.size() != n * n ||
      tables.e_c2.size() != n * n) {
    throw std::invalid_argument("energy table dimensions are inconsistent");
  }
  ProfitSurfaces s;
  s.n = n;
  s.pi1.resize(n * n);
  s.pi2.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double e_g1 = tables.e_g1[i];
    for (std::size_t j = 0; j < n; ++j) {
      const double e_g2 = tables.e_g2[j];
      const double delivered1 = e_g1 - tables.c1(i, j);
      const double delivered2 = e_g2 - tables.c2(i, j);
      s.pi1[i * n + j] = delivered1 * costs.p_g - e_g1 * costs.c_g1 + delivered2 * costs.p_t - costs.c_t;
      s.pi2[i * n + j] = delivered2 * (costs.p_g - costs.p_t) - e_g2 * costs.c_g2;
    }
  }
  return s;
}

BestResponse follower_best_response(const ProfitSurfaces& surfaces, const StrategyGrid& grid) {
  const std::size_t n = surfaces.n;
  if (n == 0) throw std::invalid_argument("empty profit surfaces");
  if (grid.size() != n) throw std::invalid_argument("profit surfaces do not match the strategy grid");
  BestResponse br;
  br.index.resize(n);
  br.capacity.resize(n);
  br.follower_profit.resize(n);
  br.leader_profit.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < n; ++j) {
      if (surfaces.follower(i, j) > surfaces.follower(i, best)) best = j;
    }
    br.index[i] = best;
    br.capacity[i] = grid[best];
    br.follower_profit[i] = surfaces.follower(i, best);
    br.leader_profit[i] = surfaces.leader(i, best);
  }
  return br;
}

Equilibrium stackelberg(const ProfitSurfaces& surfaces, const StrategyGrid& grid) {
  Equilibrium eq;
  eq.best_response = follower_best_response(surfaces, grid);
  const auto& leader = eq.best_response.leader_profit;
  std::size_t best = 0;
  for (std::size_t i = 1; i < leader.size(); ++i) {
    if (leader[i] > leader[best]) best = i;
  }
  eq.leader_index = best;
  eq.follower_index = eq.best_response.index[best];
  eq.p_n1 = grid[best];
  eq.p_n2 = eq.best_response.capacity[best];
  eq.pi1 = leader[best];
  eq.pi2 = eq.best_response.follower_profit[best];
  return eq;
}

void write_best_response_csv(const Equilibrium& equilibrium, const StrategyGrid& grid, std::ostream& out) {
  const BestResponse& br = equilibrium.best_response;
  out << "P_N1,BR_P_N2,Pi1,Pi2,equilibrium\n";
  for (std::size_t i = 0; i < br.index.size(); ++i) {
    out << csv::format_double(grid[i]) << ',' << csv::format_double(br.capacity[i]) << ','
        << csv::format_double(br.leader_profit[i]) << ',' << csv::format_double(br.follower_profit[i]) << ",\n";
  }
  out << csv::format_double(equilibrium.p_n1) << ',' << csv::format_double(equilibrium.p_n2) << ','
      << csv::format_double(equilibrium.pi1) << ',' << csv::format_double(equilibrium.pi2) << ",*\n";
}

}  // namespace windgame
