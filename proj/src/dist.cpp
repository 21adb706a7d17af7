#include "windgame/dist.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <queue>
#include <sstream>

#include "windgame/csv.hpp"

namespace windgame {

namespace {

std::string value_text(double v) { return csv::format_double(v); }

BinMerge compose(const BinMerge& inner, const BinMerge& outer) {
  BinMerge out;
  out.groups = outer.groups;
  out.group_of_bin.reserve(inner.group_of_bin.size());
  for (std::size_t g : inner.group_of_bin) out.group_of_bin.push_back(outer.group_of_bin[g]);
  return out;
}

}  // namespace

BinSpec BinSpec::covering(std::span<const double> values, double width, double origin) {
  if (!(width > 0.0)) throw DistError("bin width must be positive");
  double top = origin;
  for (double v : values) {
    if (v < origin) throw DistError("value " + value_text(v) + " lies below bin origin " + value_text(origin));
    top = std::max(top, v);
  }
  double bins = std::ceil((top - origin) / width);
  if (origin + bins * width < top) bins += 1.0;
  bins = std::max(bins, 1.0);
  return BinSpec{width, origin, origin + bins * width};
}

void BinSpec::validate() const {
  if (!(width > 0.0) || !std::isfinite(width)) throw DistError("bin width must be positive");
  if (!(max_edge > origin)) throw DistError("bin max_edge must exceed origin");
}

std::size_t BinSpec::count() const {
  validate();
  const double ratio = (max_edge - origin) / width;
  const double bins = std::ceil(ratio - 1e-9);
  return static_cast<std::size_t>(std::max(bins, 1.0));
}

std::size_t BinSpec::index_of(double value) const {
  if (!(value >= origin) || !(value <= max_edge)) {
    throw DistError("observation " + value_text(value) + " outside bin range [" + value_text(origin) + ", " +
                    value_text(max_edge) + "]");
  }
  const auto bin = static_cast<std::size_t>(std::floor((value - origin) / width));
  return std::min(bin, count() - 1);
}

DiscreteDistribution DiscreteDistribution::from_samples(std::vector<double> values) {
  if (values.empty()) throw DistError("cannot form a distribution from an empty slice");
  std::sort(values.begin(), values.end());
  DiscreteDistribution d;
  const double n = static_cast<double>(values.size());
  std::size_t i = 0;
  while (i < values.size()) {
    std::size_t j = i;
    while (j < values.size() && values[j] == values[i]) ++j;
    d.support.push_back(values[i]);
    d.weights.push_back(static_cast<double>(j - i) / n);
    i = j;
  }
  return d;
}

void DiscreteDistribution::validate() const {
  if (support.empty()) throw DistError("distribution has empty support");
  if (support.size() != weights.size()) throw DistError("support and weights differ in length");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw DistError("negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw DistError("weights do not sum to one");
}

BinMerge BinMerge::identity(std::size_t bins) {
  BinMerge m;
  m.groups = bins;
  m.group_of_bin.resize(bins);
  std::iota(m.group_of_bin.begin(), m.group_of_bin.end(), std::size_t{0});
  return m;
}

BinMerge merge_marginal(std::span<const std::size_t> counts, std::size_t min_count) {
  if (min_count == 0) throw DistError("min_count must be at least 1");
  const std::size_t total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  if (min_count > total) {
    throw DistError("min_count " + std::to_string(min_count) + " exceeds total count " + std::to_string(total));
  }

  struct Group {
    std::size_t count;
    std::vector<std::size_t> inputs;
  };
  std::vector<Group> groups;
  groups.reserve(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) groups.push_back({counts[i], {i}});

  while (groups.size() > 1) {
    std::size_t sparse = groups.size();
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (groups[g].count < min_count && (sparse == groups.size() || groups[g].count < groups[sparse].count)) {
        sparse = g;
      }
    }
    if (sparse == groups.size()) break;

    std::size_t target;
    if (sparse == 0) {
      target = 1;
    } else if (sparse + 1 == groups.size()) {
      target = sparse - 1;
    } else {
      const std::size_t left = groups[sparse - 1].count;
      const std::size_t right = groups[sparse + 1].count;
      if (left != right) {
        target = left > right ? sparse - 1 : sparse + 1;
      } else {
        // equal neighbours: fold toward the centre of the axis
        target = 2 * sparse < groups.size() - 1 ? sparse + 1 : sparse - 1;
      }
    }

    Group& into = groups[target];
    into.count += groups[sparse].count;
    into.inputs.insert(into.inputs.end(), groups[sparse].inputs.begin(), groups[sparse].inputs.end());
    groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(sparse));
  }

  BinMerge out;
  out.groups = groups.size();
  out.group_of_bin.assign(counts.size(), 0);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t i : groups[g].inputs) out.group_of_bin[i] = g;
  }
  return out;
}

JointTable::JointTable(std::vector<WindPair> members, BinSpec spec1, BinSpec spec2, BinMerge merge1,
                       BinMerge merge2)
    : members_(std::move(members)),
      spec1_(spec1),
      spec2_(spec2),
      merge1_(std::move(merge1)),
      merge2_(std::move(merge2)) {
  spec1_.validate();
  spec2_.validate();
  if (merge1_.group_of_bin.size() != spec1_.count() || merge2_.group_of_bin.size() != spec2_.count()) {
    throw DistError("merge map does not match bin specification");
  }
  counts_.assign(rows() * cols(), 0);
  w2_by_row_.assign(rows(), {});
  w1_by_col_.assign(cols(), {});
  for (const WindPair& m : members_) {
    const std::size_t r = group_of(Axis::w1, m.w1);
    const std::size_t c = group_of(Axis::w2, m.w2);
    ++counts_[r * cols() + c];
    w2_by_row_[r].push_back(m.w2);
    w1_by_col_[c].push_back(m.w1);
  }
}

std::vector<std::size_t> JointTable::marginal(Axis axis) const {
  std::vector<std::size_t> out(axis == Axis::w1 ? rows() : cols(), 0);
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t c = 0; c < cols(); ++c) out[axis == Axis::w1 ? r : c] += count(r, c);
  }
  return out;
}

std::size_t JointTable::group_of(Axis axis, double value) const {
  return merge(axis).group_of_bin[spec(axis).index_of(value)];
}

std::span<const double> JointTable::slice_values(Axis given, std::size_t group) const {
  if (given == Axis::w2) {
    if (group >= cols()) throw DistError("w2 bin index out of range");
    return w1_by_col_[group];
  }
  if (group >= rows()) throw DistError("w1 bin index out of range");
  return w2_by_row_[group];
}

JointTable build_joint_wind_table(const JointSeries& series, const BinSpec& spec1, const BinSpec& spec2) {
  if (series.empty()) throw DistError("cannot build a wind table from an empty series");
  std::vector<WindPair> members;
  members.reserve(series.size());
  for (const JointRecord& r : series.records) {
    spec1.index_of(r.w1);
    spec2.index_of(r.w2);
    members.push_back({r.w1, r.w2});
  }
  return JointTable(std::move(members), spec1, spec2, BinMerge::identity(spec1.count()),
                    BinMerge::identity(spec2.count()));
}

JointTable merge_sparse_bins(const JointTable& table, std::size_t min_count) {
  const BinMerge step1 = merge_marginal(table.marginal(Axis::w1), min_count);
  const BinMerge step2 = merge_marginal(table.marginal(Axis::w2), min_count);
  const auto members = table.members();
  return JointTable(std::vector<WindPair>(members.begin(), members.end()), table.spec(Axis::w1),
                    table.spec(Axis::w2), compose(table.merge(Axis::w1), step1),
                    compose(table.merge(Axis::w2), step2));
}

DiscreteDistribution conditional_slice(const JointTable& table, Axis given, std::size_t given_bin) {
  const auto values = table.slice_values(given, given_bin);
  if (values.empty()) {
    throw ErgodicityError("empty conditional slice for " + std::string(given == Axis::w1 ? "w1" : "w2") + " bin " +
                          std::to_string(given_bin) + "; merge sparse bins before sampling");
  }
  return DiscreteDistribution::from_samples(std::vector<double>(values.begin(), values.end()));
}

ConnectivityReport check_connectivity(const JointTable& table) {
  const std::size_t rows = table.rows(), cols = table.cols();
  constexpr std::size_t unseen = static_cast<std::size_t>(-1);
  ConnectivityReport report;
  report.row_component.assign(rows, unseen);
  report.col_component.assign(cols, unseen);

  // Nodes 0..rows-1 are w1 groups, rows..rows+cols-1 are w2 groups.
  const auto visit = [&](std::size_t start, std::size_t label) {
    std::queue<std::size_t> pending;
    pending.push(start);
    while (!pending.empty()) {
      const std::size_t node = pending.front();
      pending.pop();
      if (node < rows) {
        if (report.row_component[node] != unseen) continue;
        report.row_component[node] = label;
        for (std::size_t c = 0; c < cols; ++c) {
          if (table.count(node, c) > 0 && report.col_component[c] == unseen) pending.push(rows + c);
        }
      } else {
        const std::size_t c = node - rows;
        if (report.col_component[c] != unseen) continue;
        report.col_component[c] = label;
        for (std::size_t r = 0; r < rows; ++r) {
          if (table.count(r, c) > 0 && report.row_component[r] == unseen) pending.push(r);
        }
      }
    }
  };

  const auto row_marginal = table.marginal(Axis::w1);
  const auto col_marginal = table.marginal(Axis::w2);
  for (std::size_t r = 0; r < rows; ++r) {
    if (row_marginal[r] > 0 && report.row_component[r] == unseen) visit(r, report.components++);
  }
  for (std::size_t c = 0; c < cols; ++c) {
    if (col_marginal[c] > 0 && report.col_component[c] == unseen) visit(rows + c, report.components++);
  }
  return report;
}

void require_ergodic(const JointTable& table) {
  const ConnectivityReport report = check_connectivity(table);
  const auto row_marginal = table.marginal(Axis::w1);
  const auto col_marginal = table.marginal(Axis::w2);
  const bool empty_bins = std::find(row_marginal.begin(), row_marginal.end(), 0u) != row_marginal.end() ||
                          std::find(col_marginal.begin(), col_marginal.end(), 0u) != col_marginal.end();
  if (report.connected() && !empty_bins) return;

  std::ostringstream msg;
  msg << "wind table is not ergodic: ";
  if (!report.connected()) {
    msg << "nonempty cells form " << report.components << " disconnected components";
  } else {
    msg << "retained bins with zero count remain";
  }
  msg << "; increase min_count or the bin width";
  throw ErgodicityError(msg.str());
}

DemandConditional::DemandConditional(std::vector<DemandRecord> members, BinSpec wind_spec, BinSpec demand_spec,
                                     BinMerge wind_merge)
    : members_(std::move(members)),
      wind_spec_(wind_spec),
      demand_spec_(demand_spec),
      wind_merge_(std::move(wind_merge)) {
  wind_spec_.validate();
  demand_spec_.validate();
  if (wind_merge_.group_of_bin.size() != wind_spec_.count()) {
    throw DistError("merge map does not match mean-wind bin specification");
  }
  counts_.assign(rows() * cols(), 0);
  demand_by_row_.assign(rows(), {});
  for (const DemandRecord& m : members_) {
    const std::size_t r = row_of(m.mean_wind);
    ++counts_[r * cols() + demand_spec_.index_of(m.demand)];
    demand_by_row_[r].push_back(m.demand);
  }
}

std::vector<std::size_t> DemandConditional::row_totals() const {
  std::vector<std::size_t> out(rows(), 0);
  for (std::size_t r = 0; r < rows(); ++r) out[r] = demand_by_row_[r].size();
  return out;
}

std::size_t DemandConditional::row_of(double mean_wind) const {
  return wind_merge_.group_of_bin[wind_spec_.index_of(mean_wind)];
}

DemandConditional build_demand_conditional(const JointSeries& series, const BinSpec& wind_spec,
                                           const BinSpec& demand_spec) {
  if (series.empty()) throw DistError("cannot build a demand table from an empty series");
  std::vector<DemandRecord> members;
  members.reserve(series.size());
  for (const JointRecord& r : series.records) {
    const double mean_wind = 0.5 * (r.w1 + r.w2);
    wind_spec.index_of(mean_wind);
    demand_spec.index_of(r.demand);
    members.push_back({mean_wind, r.demand});
  }
  return DemandConditional(std::move(members), wind_spec, demand_spec, BinMerge::identity(wind_spec.count()));
}

DemandConditional merge_sparse_bins(const DemandConditional& table, std::size_t min_count) {
  const BinMerge step = merge_marginal(table.row_totals(), min_count);
  const auto members = table.members();
  return DemandConditional(std::vector<DemandRecord>(members.begin(), members.end()), table.wind_spec(),
                           table.demand_spec(), compose(table.wind_merge(), step));
}

DiscreteDistribution demand_given_mean_wind(const DemandConditional& table, double mean_wind) {
  const std::size_t row = table.row_of(mean_wind);
  const auto values = table.row_values(row);
  if (values.empty()) {
    throw ErgodicityError("no demand observations for mean wind " + value_text(mean_wind) +
                          "; merge sparse bins before sampling");
  }
  return DiscreteDistribution::from_samples(std::vector<double>(values.begin(), values.end()));
}

void write_table_csv(const JointTable& table, std::ostream& out) {
  out << "bin_i,bin_j,count\n";
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.cols(); ++c) {
      if (table.count(r, c) > 0) out << r << ',' << c << ',' << table.count(r, c) << '\n';
    }
  }
}

void write_merged_map_csv(const JointTable& table, std::ostream& out) {
  out << "axis,original_bin,merged_bin\n";
  for (Axis axis : {Axis::w1, Axis::w2}) {
    const auto map = table.merged_map(axis);
    for (std::size_t b = 0; b < map.size(); ++b) out << (axis == Axis::w1 ? "w1" : "w2") << ',' << b << ',' << map[b] << '\n';
  }
}

}  // namespace windgame
