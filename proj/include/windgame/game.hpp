#pragma once

// Leader (line investor) and follower (local generators) profits over the
// capacity grid, and the subgame-perfect equilibrium by backward induction.

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "windgame/sim.hpp"

namespace windgame {

struct CostParams {
  double p_g = 74.3;  // generation tariff, per MWh
  double p_t = 0.0;   // transmission fee paid by the follower, per MWh delivered
  double c_g1 = 0.0;  // leader generation cost, per MWh generated
  double c_g2 = 0.0;  // follower generation cost, per MWh generated
  double c_t = 0.0;   // total line cost (investment plus maintenance)

  void validate() const;
};

struct ProfitSurfaces {
  std::size_t n = 0;
  std::vector<double> pi1;  // leader, [i * n + j]
  std::vector<double> pi2;  // follower, [i * n + j]

  double leader(std::size_t i, std::size_t j) const { return pi1[i * n + j]; }
  double follower(std::size_t i, std::size_t j) const { return pi2[i * n + j]; }
};

//   pi1 = (E_G1 - E_C1) p_G - E_G1 c_G1 + (E_G2 - E_C2) p_T - C_T
//   pi2 = (E_G2 - E_C2) (p_G - p_T) - E_G2 c_G2
ProfitSurfaces profit_surfaces(const EnergyTables& tables, const CostParams& costs);

// Follower's argmax over its own capacity for each leader capacity.
struct BestResponse {
  std::vector<std::size_t> index;
  std::vector<double> capacity;
  std::vector<double> follower_profit;
  std::vector<double> leader_profit;  // leader's profit along the curve
};

// Ties go to the smallest capacity.
BestResponse follower_best_response(const ProfitSurfaces& surfaces, const StrategyGrid& grid);

struct Equilibrium {
  std::size_t leader_index = 0;
  std::size_t follower_index = 0;
  double p_n1 = 0.0;
  double p_n2 = 0.0;
  double pi1 = 0.0;
  double pi2 = 0.0;
  BestResponse best_response;
};

// Leader maximises its profit along the follower's best-response curve; ties
// go to the smallest capacity.
Equilibrium stackelberg(const ProfitSurfaces& surfaces, const StrategyGrid& grid);

// P_N1,BR_P_N2,Pi1,Pi2 rows followed by a starred equilibrium row.
void write_best_response_csv(const Equilibrium& equilibrium, const StrategyGrid& grid, std::ostream& out);

}  // namespace windgame
