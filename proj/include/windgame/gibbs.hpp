#pragma once

// Three-variable Gibbs sampler over the empirical tables: w1 | w2, then
// w2 | w1, then demand | mean wind, one systematic sweep per step.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "windgame/dist.hpp"
#include "windgame/ingest.hpp"
#include "windgame/rng.hpp"

namespace windgame {

struct TableOptions {
  BinSpec wind1;
  BinSpec wind2;
  BinSpec mean_wind;
  BinSpec demand;
  std::size_t min_count = 10;

  // 1 m/s wind bins and 5 MW demand bins from zero, sized to cover the data.
  static TableOptions defaults_for(const JointSeries& series, double wind_width = 1.0, double demand_width = 5.0);
};

// Merged, immutable tables shared by every chain. Construction records, but
// does not enforce, ergodicity; sampling entry points refuse non-ergodic tables.
class SamplerTables {
 public:
  SamplerTables(JointTable wind, DemandConditional demand);

  static SamplerTables build(const JointSeries& series, const TableOptions& options);

  const JointTable& wind() const noexcept { return wind_; }
  const DemandConditional& demand() const noexcept { return demand_; }
  bool ergodic() const noexcept { return ergodicity_error_.empty(); }
  // Throws ErgodicityError with the stored diagnostic.
  void require_ergodic() const;

 private:
  JointTable wind_;
  DemandConditional demand_;
  std::string ergodicity_error_;
};

struct ChainConfig {
  std::size_t samples = 5000;       // n, states generated per chain
  std::size_t realisations = 10;    // N
  double burn_in_fraction = 0.20;
  std::uint64_t seed = 1;

  std::size_t burn_in() const;
  std::size_t retained() const { return samples - burn_in(); }
  void validate() const;
};

struct ChainState {
  double w1 = 0.0;
  double w2 = 0.0;
  double demand = 0.0;

  friend bool operator==(const ChainState&, const ChainState&) = default;
};

struct Realisation {
  std::vector<ChainState> samples;
  std::uint64_t seed = 0;
  std::size_t chain_index = 0;
};

ChainState init_chain(const SamplerTables& tables, Rng& rng);
ChainState gibbs_step(const ChainState& state, const SamplerTables& tables, Rng& rng);

// Generates config.samples states (the initial state counts as the first) and
// discards the first burn_in() of them. The random stream is keyed by
// (config.seed, chain_index) only.
Realisation run_chain(const ChainConfig& config, const SamplerTables& tables, std::size_t chain_index);

// config.realisations chains, indexed 0..N-1. Output is identical for any
// worker count.
std::vector<Realisation> run_ensemble(const ChainConfig& config, const SamplerTables& tables,
                                      std::size_t workers = 1);

// chain,t,w1,w2,P_D rows; t counts retained samples from zero.
void write_realisations_csv(std::span<const Realisation> realisations, std::ostream& out);

}  // namespace windgame
