#include <doctest.h>

#include <random>
#include <sstream>

#include "windgame/game.hpp"

using namespace windgame;

namespace {

EnergyTables two_by_two() {
  EnergyTables e;
  e.n = 2;
  e.e_g1 = {0, 100};
  e.e_g2 = {0, 200};
  // [i * n + j]
  e.e_c1 = {0, 0, 5, 10};
  e.e_c2 = {0, 0, 0, 20};
  return e;
}

ProfitSurfaces random_surfaces(std::size_t n, std::mt19937_64& gen, bool coarse) {
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  std::uniform_int_distribution<int> small(0, 3);
  ProfitSurfaces s;
  s.n = n;
  for (std::size_t k = 0; k < n * n; ++k) {
    // coarse values force plenty of ties
    s.pi1.push_back(coarse ? small(gen) : u(gen));
    s.pi2.push_back(coarse ? small(gen) : u(gen));
  }
  return s;
}

// Exhaustive two-level enumeration with the smallest-capacity tie rule.
std::pair<std::size_t, std::size_t> oracle(const ProfitSurfaces& s) {
  std::size_t best_i = 0, best_j = 0;
  double best_pi1 = 0.0;
  for (std::size_t i = 0; i < s.n; ++i) {
    double top = s.pi2[i * s.n];
    for (std::size_t j = 0; j < s.n; ++j) top = std::max(top, s.pi2[i * s.n + j]);
    std::size_t br = 0;
    while (s.pi2[i * s.n + br] != top) ++br;
    const double value = s.pi1[i * s.n + br];
    if (i == 0 || value > best_pi1) best_i = i, best_j = br, best_pi1 = value;
  }
  return {best_i, best_j};
}

}  // namespace

TEST_CASE("profit surfaces by hand") {
  const CostParams c{50, 10, 20, 15, 1000};
  const ProfitSurfaces s = profit_surfaces(two_by_two(), c);
  // zero-capacity cell
  CHECK(s.leader(0, 0) == -1000);
  CHECK(s.follower(0, 0) == 0);
  // follower absent: no transmission revenue
  CHECK(s.leader(1, 0) == (100 - 5) * 50 - 100 * 20 - 1000);
  CHECK(s.follower(1, 0) == 0);
  CHECK(s.leader(0, 1) == 200 * 10 - 1000);
  CHECK(s.follower(0, 1) == 200 * 40 - 200 * 15);
  CHECK(s.leader(1, 1) == 3300);
  CHECK(s.follower(1, 1) == 4200);
}

TEST_CASE("cost validation") {
  CHECK_THROWS(profit_surfaces(two_by_two(), CostParams{0, 0, 0, 0, 0}));
  CHECK_THROWS(profit_surfaces(two_by_two(), CostParams{50, -1, 0, 0, 0}));
  EnergyTables broken = two_by_two();
  broken.e_c1.pop_back();
  CHECK_THROWS(profit_surfaces(broken, CostParams{}));
}

TEST_CASE("best response") {
  const StrategyGrid grid(1.0, 0.5);
  ProfitSurfaces s;
  s.n = 3;
  s.pi1.assign(9, 0.0);
  s.pi2 = {0, 5, 3, 0, 0, 0, -1, -1, -2};
  const BestResponse br = follower_best_response(s, grid);
  CHECK(br.capacity[0] == 0.5);
  CHECK(br.follower_profit[0] == 5);
  CHECK(br.capacity[1] == 0.0);  // all-zero row: smallest capacity
  CHECK(br.capacity[2] == 0.0);
  CHECK_THROWS(follower_best_response(s, StrategyGrid(2.0, 0.5)));
}

TEST_CASE("best response matches a row scan") {
  std::mt19937_64 gen(17);
  const StrategyGrid grid(19, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const ProfitSurfaces s = random_surfaces(20, gen, trial % 2 == 1);
    const BestResponse br = follower_best_response(s, grid);
    for (std::size_t i = 0; i < 20; ++i) {
      std::size_t expected = 0;
      for (std::size_t j = 0; j < 20; ++j) {
        if (s.follower(i, j) > s.follower(i, expected)) expected = j;
      }
      CHECK(br.index[i] == expected);
      for (std::size_t j = 0; j < 20; ++j) {
        CHECK(s.follower(i, br.index[i]) >= s.follower(i, j));
        if (j < br.index[i]) CHECK(s.follower(i, j) < s.follower(i, br.index[i]));
      }
    }
  }
}

TEST_CASE("stackelberg") {
  SUBCASE("singleton grid") {
    EnergyTables e;
    e.n = 1;
    e.e_g1 = {0};
    e.e_g2 = {0};
    e.e_c1 = {0};
    e.e_c2 = {0};
    const Equilibrium eq = stackelberg(profit_surfaces(e, CostParams{74.3, 0, 0, 0, 250}), StrategyGrid(0, 1));
    CHECK(eq.p_n1 == 0);
    CHECK(eq.p_n2 == 0);
    CHECK(eq.pi1 == -250);
    CHECK(eq.pi2 == 0);
  }
  SUBCASE("designed 3x3 equilibrium") {
    ProfitSurfaces s;
    s.n = 3;
    // follower best responses: row 0 -> 1, row 1 -> 2, row 2 -> 0 (tie with 1)
    s.pi2 = {0, 3, 1, 0, 1, 4, 2, 2, 0};
    // leader's best off-curve cell (2,1) must be ignored
    s.pi1 = {9, 5, 9, 9, 9, 7, 6, 100, 9};
    const StrategyGrid grid(10, 5);
    const Equilibrium eq = stackelberg(s, grid);
    CHECK(eq.leader_index == 1);
    CHECK(eq.follower_index == 2);
    CHECK(eq.p_n1 == 5);
    CHECK(eq.p_n2 == 10);
    CHECK(eq.pi1 == 7);
    CHECK(eq.pi2 == 4);
    CHECK(oracle(s) == std::pair<std::size_t, std::size_t>{1, 2});

    std::ostringstream out;
    write_best_response_csv(eq, grid, out);
    CHECK(out.str() == "P_N1,BR_P_N2,Pi1,Pi2,equilibrium\n0,5,5,3,\n5,10,7,4,\n10,0,6,2,\n5,10,7,4,*\n");
  }
  SUBCASE("random surfaces agree with enumeration") {
    std::mt19937_64 gen(23);
    const StrategyGrid grid(14, 1);
    for (int trial = 0; trial < 40; ++trial) {
      const ProfitSurfaces s = random_surfaces(15, gen, trial % 2 == 0);
      const Equilibrium eq = stackelberg(s, grid);
      const auto [i, j] = oracle(s);
      CHECK(eq.leader_index == i);
      CHECK(eq.follower_index == j);
    }
  }
}

TEST_CASE("equilibrium invariances") {
  // physically shaped tables: curtailment grows with both capacities
  const std::size_t n = 11;
  EnergyTables e;
  e.n = n;
  for (std::size_t k = 0; k < n; ++k) {
    e.e_g1.push_back(300.0 * k);
    e.e_g2.push_back(280.0 * k);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double s = e.e_g1[i] + e.e_g2[j];
      const double c = s * s / 12000.0;
      e.e_c1.push_back(s > 0 ? std::min(e.e_g1[i], c * e.e_g1[i] / s) : 0.0);
      e.e_c2.push_back(s > 0 ? std::min(e.e_g2[j], c * e.e_g2[j] / s) : 0.0);
    }
  }
  const StrategyGrid grid(10, 1);
  const CostParams base{74.3, 0.26 * 74.3, 0.3 * 74.3, 0.28 * 74.3, 0.0};
  const Equilibrium eq = stackelberg(profit_surfaces(e, base), grid);

  SUBCASE("positive scaling") {
    ProfitSurfaces scaled = profit_surfaces(e, base);
    for (double& v : scaled.pi1) v *= 3.5;
    for (double& v : scaled.pi2) v *= 3.5;
    const Equilibrium s = stackelberg(scaled, grid);
    CHECK(s.leader_index == eq.leader_index);
    CHECK(s.follower_index == eq.follower_index);
    CHECK(s.pi1 == doctest::Approx(3.5 * eq.pi1));
  }
  SUBCASE("line cost shift") {
    CostParams shifted = base;
    shifted.c_t = 12345.0;
    const Equilibrium s = stackelberg(profit_surfaces(e, shifted), grid);
    CHECK(s.leader_index == eq.leader_index);
    CHECK(s.follower_index == eq.follower_index);
    CHECK(s.pi1 == doctest::Approx(eq.pi1 - 12345.0));
    CHECK(s.pi2 == eq.pi2);
  }
  SUBCASE("follower profit falls with the fee") {
    ProfitSurfaces last = profit_surfaces(e, CostParams{74.3, 0, base.c_g1, base.c_g2, 0});
    for (double fee = 2.0; fee <= 74.3; fee += 2.0) {
      const ProfitSurfaces next = profit_surfaces(e, CostParams{74.3, fee, base.c_g1, base.c_g2, 0});
      for (std::size_t k = 0; k < n * n; ++k) CHECK(next.pi2[k] <= last.pi2[k]);
      const BestResponse a = follower_best_response(last, grid), b = follower_best_response(next, grid);
      for (std::size_t i = 0; i < n; ++i) CHECK(b.follower_profit[i] <= a.follower_profit[i]);
      last = next;
    }
  }
  SUBCASE("interior equilibrium on shaped tables") {
    CHECK(eq.leader_index > 0);
    CHECK(eq.follower_index > 0);
  }
}
