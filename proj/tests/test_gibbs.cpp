#include <doctest.h>

#include <set>
#include <sstream>

#include "test_support.hpp"
#include "windgame/gibbs.hpp"

using namespace windgame;
using test_support::correlated_series;
using test_support::hour;

namespace {

JointSeries records(std::vector<JointRecord> rs) {
  JointSeries s;
  int h = 0;
  for (JointRecord& r : rs) {
    r.time = hour(h++);
    s.records.push_back(r);
  }
  return s;
}

SamplerTables tables_for(const JointSeries& s, double wind_width, double demand_width, std::size_t min_count) {
  TableOptions options = TableOptions::defaults_for(s, wind_width, demand_width);
  options.min_count = min_count;
  return SamplerTables::build(s, options);
}

}  // namespace

TEST_CASE("rng streams") {
  Rng a(42, 0), b(42, 0), c(42, 1), d(43, 0);
  const auto first = a.next();
  CHECK(first == b.next());
  CHECK(first != c.next());
  CHECK(first != d.next());
  Rng e(1, 0);
  for (int i = 0; i < 1000; ++i) {
    CHECK(e.index(7) < 7);
    const double u = e.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("chain config arithmetic") {
  ChainConfig c;
  c.samples = 10;
  CHECK(c.burn_in() == 2);
  CHECK(c.retained() == 8);
  c.samples = 50000;
  CHECK(c.retained() == 40000);
  c.burn_in_fraction = 1.0;
  CHECK_THROWS(c.validate());
  c.burn_in_fraction = 0.2;
  c.samples = 0;
  CHECK_THROWS(c.validate());
}

TEST_CASE("single record is absorbing") {
  const JointSeries s = records({{{}, 7.3, 4.1, 95.0}});
  const SamplerTables t = tables_for(s, 1.0, 5.0, 1);
  Rng rng(5, 0);
  ChainState state = init_chain(t, rng);
  CHECK(state == ChainState{7.3, 4.1, 95.0});
  for (int i = 0; i < 100; ++i) {
    state = gibbs_step(state, t, rng);
    CHECK(state == ChainState{7.3, 4.1, 95.0});
  }
}

TEST_CASE("init picks records uniformly") {
  const JointSeries s = records({{{}, 5.1, 5.2, 100.0}, {{}, 5.3, 5.4, 100.0}});
  const SamplerTables t = tables_for(s, 10.0, 5.0, 1);
  Rng rng(9, 0);
  int first = 0;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i) first += init_chain(t, rng).w1 == 5.1 ? 1 : 0;
  // 4 sigma binomial bound is 2%
  CHECK(std::abs(first / double(trials) - 0.5) <= 0.02);
}

TEST_CASE("symmetric two-value table has a 50/50 marginal") {
  const JointSeries s =
      records({{{}, 5, 5, 100}, {{}, 5, 15, 100}, {{}, 15, 5, 100}, {{}, 15, 15, 100}});
  const SamplerTables t = tables_for(s, 10.0, 5.0, 1);
  REQUIRE(t.ergodic());
  Rng rng(123, 0);
  ChainState state = init_chain(t, rng);
  const int steps = 50000;
  int low = 0;
  for (int i = 0; i < steps; ++i) {
    state = gibbs_step(state, t, rng);
    low += state.w1 == 5 ? 1 : 0;
  }
  const double sigma = std::sqrt(0.25 / steps);
  CHECK(std::abs(low / double(steps) - 0.5) <= 3 * sigma);
}

TEST_CASE("gibbs step order") {
  // w1 is drawn given the old w2, then w2 given the new w1; a table where
  // each w2 bin pins w1 and each w1 bin pins w2 makes the order observable.
  const JointSeries s = records({{{}, 1.5, 1.5, 10}, {{}, 1.5, 2.5, 20}, {{}, 2.5, 2.5, 30}});
  const SamplerTables t = tables_for(s, 1.0, 5.0, 1);
  REQUIRE(t.ergodic());
  Rng rng(3, 0);
  for (int i = 0; i < 200; ++i) {
    const ChainState from{1.5, 1.5, 10};
    const ChainState next = gibbs_step(from, t, rng);
    // column of w2 = 1.5 only holds w1 = 1.5
    CHECK(next.w1 == 1.5);
    // demand is always drawn from the mean-wind row of the new pair
    if (next.w2 == 1.5) {
      CHECK(next.demand == 10);
    } else {
      CHECK((next.demand == 20 || next.demand == 30));
    }
  }
}

TEST_CASE("determinism") {
  const SamplerTables t = tables_for(correlated_series(2000, 1), 1.0, 5.0, 10);
  Rng a(77, 3), b(77, 3);
  const ChainState from{9.0, 8.0, 100.0};
  CHECK(gibbs_step(from, t, a) == gibbs_step(from, t, b));

  ChainConfig config;
  config.samples = 500;
  config.seed = 99;
  const Realisation r1 = run_chain(config, t, 2);
  const Realisation r2 = run_chain(config, t, 2);
  CHECK(r1.samples == r2.samples);
  CHECK(r1.chain_index == 2);
}

TEST_CASE("run_chain length") {
  const SamplerTables t = tables_for(correlated_series(500, 2), 1.0, 5.0, 10);
  ChainConfig config;
  config.samples = 10;
  CHECK(run_chain(config, t, 0).samples.size() == 8);
}

TEST_CASE("ensemble") {
  const JointSeries s = correlated_series(3000, 4);
  const SamplerTables t = tables_for(s, 1.0, 5.0, 10);
  ChainConfig config;
  config.samples = 300;
  config.seed = 2024;

  SUBCASE("N=1 equals chain 0") {
    config.realisations = 1;
    const auto ensemble = run_ensemble(config, t);
    REQUIRE(ensemble.size() == 1);
    CHECK(ensemble[0].samples == run_chain(config, t, 0).samples);
  }
  SUBCASE("N=4 paths are pairwise distinct and worker-count independent") {
    config.realisations = 4;
    const auto serial = run_ensemble(config, t, 1);
    const auto parallel = run_ensemble(config, t, 3);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(serial[i].samples == parallel[i].samples);
      for (std::size_t j = i + 1; j < 4; ++j) CHECK(serial[i].samples != serial[j].samples);
    }
  }
  SUBCASE("support closure") {
    config.realisations = 3;
    std::set<double> w1, w2, d;
    for (const JointRecord& r : s.records) w1.insert(r.w1), w2.insert(r.w2), d.insert(r.demand);
    for (const Realisation& r : run_ensemble(config, t)) {
      for (const ChainState& st : r.samples) {
        CHECK(w1.count(st.w1) == 1);
        CHECK(w2.count(st.w2) == 1);
        CHECK(d.count(st.demand) == 1);
      }
    }
  }
  SUBCASE("dump format") {
    config.realisations = 2;
    config.samples = 5;
    const auto ensemble = run_ensemble(config, t);
    std::ostringstream out;
    write_realisations_csv(ensemble, out);
    const std::string text = out.str();
    CHECK(text.rfind("chain,t,w1,w2,P_D\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 2 * 4);
  }
}

TEST_CASE("disconnected table refuses to sample") {
  const JointSeries s = records({{{}, 1.5, 1.5, 10}, {{}, 8.5, 8.5, 10}});
  const SamplerTables t = tables_for(s, 1.0, 5.0, 1);
  CHECK_FALSE(t.ergodic());
  ChainConfig config;
  config.samples = 10;
  try {
    run_chain(config, t, 0);
    FAIL("expected failure");
  } catch (const ErgodicityError& e) {
    CHECK(std::string(e.what()).find("increase min_count or the bin width") != std::string::npos);
  }
}
