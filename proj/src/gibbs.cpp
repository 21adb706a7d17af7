#include "windgame/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "windgame/csv.hpp"
#include "windgame/parallel.hpp"

namespace windgame {

namespace {

double draw(std::span<const double> values, Rng& rng, const char* what) {
  if (values.empty()) {
    throw ErgodicityError(std::string("empty conditional slice while sampling ") + what +
                          "; increase min_count or the bin width");
  }
  return values[rng.index(values.size())];
}

std::string diagnose(const JointTable& wind, const DemandConditional& demand) {
  try {
    windgame::require_ergodic(wind);
  } catch (const ErgodicityError& e) {
    return e.what();
  }
  const auto totals = demand.row_totals();
  for (std::size_t r = 0; r < totals.size(); ++r) {
    if (totals[r] == 0) {
      return "demand table row " + std::to_string(r) +
             " has no observations; increase min_count or the bin width";
    }
  }
  const BinSpec& s1 = wind.spec(Axis::w1);
  const BinSpec& s2 = wind.spec(Axis::w2);
  const BinSpec& sm = demand.wind_spec();
  if (sm.origin > 0.5 * (s1.origin + s2.origin) || sm.max_edge < 0.5 * (s1.max_edge + s2.max_edge)) {
    return "mean-wind bins do not cover every reachable mean wind speed";
  }
  return {};
}

}  // namespace

TableOptions TableOptions::defaults_for(const JointSeries& series, double wind_width, double demand_width) {
  std::vector<double> w1, w2, d;
  w1.reserve(series.size());
  w2.reserve(series.size());
  d.reserve(series.size());
  for (const JointRecord& r : series.records) {
    w1.push_back(r.w1);
    w2.push_back(r.w2);
    d.push_back(r.demand);
  }
  TableOptions options;
  options.wind1 = BinSpec::covering(w1, wind_width);
  options.wind2 = BinSpec::covering(w2, wind_width);
  options.mean_wind = BinSpec{wind_width, 0.0, std::max(options.wind1.max_edge, options.wind2.max_edge)};
  options.demand = BinSpec::covering(d, demand_width);
  return options;
}

SamplerTables::SamplerTables(JointTable wind, DemandConditional demand)
    : wind_(std::move(wind)), demand_(std::move(demand)), ergodicity_error_(diagnose(wind_, demand_)) {}

SamplerTables SamplerTables::build(const JointSeries& series, const TableOptions& options) {
  JointTable wind = merge_sparse_bins(build_joint_wind_table(series, options.wind1, options.wind2), options.min_count);
  DemandConditional demand =
      merge_sparse_bins(build_demand_conditional(series, options.mean_wind, options.demand), options.min_count);
  return SamplerTables(std::move(wind), std::move(demand));
}

void SamplerTables::require_ergodic() const {
  if (!ergodic()) throw ErgodicityError(ergodicity_error_);
}

std::size_t ChainConfig::burn_in() const {
  return static_cast<std::size_t>(std::floor(burn_in_fraction * static_cast<double>(samples)));
}

void ChainConfig::validate() const {
  if (samples == 0) throw std::invalid_argument("chain length must be positive");
  if (realisations == 0) throw std::invalid_argument("number of realisations must be positive");
  if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0)) {
    throw std::invalid_argument("burn-in fraction must lie in [0, 1)");
  }
  if (burn_in() >= samples) throw std::invalid_argument("burn-in leaves no retained samples");
}

ChainState init_chain(const SamplerTables& tables, Rng& rng) {
  tables.require_ergodic();
  const auto members = tables.wind().members();
  const WindPair& start = members[rng.index(members.size())];
  const auto& demand = tables.demand();
  const double d = draw(demand.row_values(demand.row_of(0.5 * (start.w1 + start.w2))), rng, "demand");
  return {start.w1, start.w2, d};
}

ChainState gibbs_step(const ChainState& state, const SamplerTables& tables, Rng& rng) {
  const JointTable& wind = tables.wind();
  const DemandConditional& demand = tables.demand();
  ChainState next;
  next.w1 = draw(wind.slice_values(Axis::w2, wind.group_of(Axis::w2, state.w2)), rng, "w1");
  next.w2 = draw(wind.slice_values(Axis::w1, wind.group_of(Axis::w1, next.w1)), rng, "w2");
  next.demand = draw(demand.row_values(demand.row_of(0.5 * (next.w1 + next.w2))), rng, "demand");
  return next;
}

Realisation run_chain(const ChainConfig& config, const SamplerTables& tables, std::size_t chain_index) {
  config.validate();
  tables.require_ergodic();

  Rng rng(config.seed, chain_index);
  Realisation out;
  out.seed = config.seed;
  out.chain_index = chain_index;
  out.samples.reserve(config.retained());

  const std::size_t burn = config.burn_in();
  ChainState state = init_chain(tables, rng);
  for (std::size_t t = 0; t < config.samples; ++t) {
    if (t > 0) state = gibbs_step(state, tables, rng);
    if (t >= burn) out.samples.push_back(state);
  }
  return out;
}

std::vector<Realisation> run_ensemble(const ChainConfig& config, const SamplerTables& tables, std::size_t workers) {
  config.validate();
  tables.require_ergodic();
  std::vector<Realisation> out(config.realisations);
  parallel_for(config.realisations, workers, [&](std::size_t k) { out[k] = run_chain(config, tables, k); });
  return out;
}

void write_realisations_csv(std::span<const Realisation> realisations, std::ostream& out) {
  out << "chain,t,w1,w2,P_D\n";
  for (const Realisation& r : realisations) {
    for (std::size_t t = 0; t < r.samples.size(); ++t) {
      const ChainState& s = r.samples[t];
      out << r.chain_index << ',' << t << ',' << csv::format_double(s.w1) << ',' << csv::format_double(s.w2) << ','
          << csv::format_double(s.demand) << '\n';
    }
  }
}

}  // namespace windgame
