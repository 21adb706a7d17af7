#pragma once

// Binned empirical distributions of the historic record: the joint wind
// table F(w1, w2) and the demand table G(P_D | mean wind), with sparse-bin
// merging and the connectivity check that makes the Gibbs chain ergodic.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "windgame/ingest.hpp"

namespace windgame {

class DistError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when the retained cells do not form a single communicating class.
class ErgodicityError : public DistError {
 public:
  using DistError::DistError;
};

struct BinSpec {
  double width = 1.0;
  double origin = 0.0;
  double max_edge = 1.0;

  // Smallest spec with the given width/origin whose range contains every value.
  static BinSpec covering(std::span<const double> values, double width, double origin = 0.0);

  void validate() const;
  std::size_t count() const;
  // Values equal to max_edge fall in the last bin. Throws DistError outside
  // [origin, max_edge].
  std::size_t index_of(double value) const;
  double lower_edge(std::size_t bin) const { return origin + width * static_cast<double>(bin); }
};

enum class Axis { w1, w2 };

struct DiscreteDistribution {
  std::vector<double> support;
  std::vector<double> weights;

  // Groups equal values; weights proportional to multiplicity.
  static DiscreteDistribution from_samples(std::vector<double> values);
  void validate() const;
};

// Maps original bins onto contiguous merged groups.
struct BinMerge {
  std::vector<std::size_t> group_of_bin;
  std::size_t groups = 0;

  static BinMerge identity(std::size_t bins);
};

// Folds every group whose count is below min_count into an adjacent group,
// smallest first. Edge groups fold inward; interior groups join the more
// populated neighbour. Returns the assignment from input group to output group.
BinMerge merge_marginal(std::span<const std::size_t> counts, std::size_t min_count);

struct WindPair {
  double w1 = 0.0;
  double w2 = 0.0;
};

class JointTable {
 public:
  JointTable(std::vector<WindPair> members, BinSpec spec1, BinSpec spec2, BinMerge merge1, BinMerge merge2);

  const BinSpec& spec(Axis axis) const { return axis == Axis::w1 ? spec1_ : spec2_; }
  const BinMerge& merge(Axis axis) const { return axis == Axis::w1 ? merge1_ : merge2_; }
  std::span<const std::size_t> merged_map(Axis axis) const { return merge(axis).group_of_bin; }

  std::size_t rows() const noexcept { return merge1_.groups; }
  std::size_t cols() const noexcept { return merge2_.groups; }
  std::size_t count(std::size_t row, std::size_t col) const { return counts_[row * cols() + col]; }
  std::size_t total() const noexcept { return members_.size(); }
  std::vector<std::size_t> marginal(Axis axis) const;

  // Retained (merged) bin that holds a raw value on the given axis.
  std::size_t group_of(Axis axis, double value) const;

  // Raw values of the other variable for every member in a retained bin;
  // multiplicity carries the weight.
  std::span<const double> slice_values(Axis given, std::size_t group) const;

  std::span<const WindPair> members() const noexcept { return members_; }

 private:
  std::vector<WindPair> members_;
  BinSpec spec1_, spec2_;
  BinMerge merge1_, merge2_;
  std::vector<std::size_t> counts_;
  std::vector<std::vector<double>> w2_by_row_;  // w2 values of members in each w1 group
  std::vector<std::vector<double>> w1_by_col_;  // w1 values of members in each w2 group
};

JointTable build_joint_wind_table(const JointSeries& series, const BinSpec& spec1, const BinSpec& spec2);
JointTable merge_sparse_bins(const JointTable& table, std::size_t min_count);
DiscreteDistribution conditional_slice(const JointTable& table, Axis given, std::size_t given_bin);

struct ConnectivityReport {
  std::size_t components = 0;
  std::vector<std::size_t> row_component;
  std::vector<std::size_t> col_component;

  bool connected() const noexcept { return components == 1; }
};

// Components of the bipartite graph linking each w1 group to each w2 group
// through nonempty cells.
ConnectivityReport check_connectivity(const JointTable& table);
void require_ergodic(const JointTable& table);

struct DemandRecord {
  double mean_wind = 0.0;
  double demand = 0.0;
};

class DemandConditional {
 public:
  DemandConditional(std::vector<DemandRecord> members, BinSpec wind_spec, BinSpec demand_spec, BinMerge wind_merge);

  const BinSpec& wind_spec() const noexcept { return wind_spec_; }
  const BinSpec& demand_spec() const noexcept { return demand_spec_; }
  const BinMerge& wind_merge() const noexcept { return wind_merge_; }

  std::size_t rows() const noexcept { return wind_merge_.groups; }
  std::size_t cols() const noexcept { return demand_spec_.count(); }
  std::size_t count(std::size_t row, std::size_t col) const { return counts_[row * cols() + col]; }
  std::size_t total() const noexcept { return members_.size(); }
  std::vector<std::size_t> row_totals() const;

  std::size_t row_of(double mean_wind) const;
  std::span<const double> row_values(std::size_t row) const { return demand_by_row_[row]; }
  std::span<const DemandRecord> members() const noexcept { return members_; }

 private:
  std::vector<DemandRecord> members_;
  BinSpec wind_spec_, demand_spec_;
  BinMerge wind_merge_;
  std::vector<std::size_t> counts_;
  std::vector<std::vector<double>> demand_by_row_;
};

DemandConditional build_demand_conditional(const JointSeries& series, const BinSpec& wind_spec,
                                           const BinSpec& demand_spec);
// Row-wise merge over mean-wind bins, same policy as the joint table.
DemandConditional merge_sparse_bins(const DemandConditional& table, std::size_t min_count);
DiscreteDistribution demand_given_mean_wind(const DemandConditional& table, double mean_wind);

// (bin_i, bin_j, count) over retained groups.
void write_table_csv(const JointTable& table, std::ostream& out);
// (axis, original_bin, merged_bin).
void write_merged_map_csv(const JointTable& table, std::ostream& out);

}  // namespace windgame
