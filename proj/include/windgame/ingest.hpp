#pragma once

// Loading and time-alignment of historic wind-speed and demand records.

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace windgame {

using Timestamp = std::chrono::sys_seconds;

// Parses "YYYY-MM-DD[(T| )HH[:MM[:SS]]][Z|(+|-)HH[:MM]]" into UTC seconds.
// Throws std::invalid_argument on malformed input.
Timestamp parse_iso8601(std::string_view text);
std::string format_iso8601(Timestamp t);

class IngestError : public std::runtime_error {
 public:
  enum class Kind {
    missing_file,
    missing_column,
    no_valid_rows,
    sub_hourly,
    empty_intersection,
    invalid_argument,
  };

  IngestError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

struct ColumnMap {
  std::string timestamp = "timestamp";
  std::string value = "value";
};

struct TimeSeries {
  std::string label;
  std::vector<Timestamp> timestamps;
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  bool empty() const noexcept { return values.empty(); }
  double mean() const;
};

// Rows dropped while loading, by reason.
struct GapReport {
  std::string source;
  std::size_t rows_read = 0;
  std::size_t missing_value = 0;
  std::size_t unparseable_value = 0;
  std::size_t unparseable_timestamp = 0;
  std::size_t negative_value = 0;
  std::size_t duplicate_timestamp = 0;
  std::vector<Timestamp> duplicates;  // timestamps whose later occurrences were dropped

  std::size_t dropped() const noexcept {
    return missing_value + unparseable_value + unparseable_timestamp + negative_value +
           duplicate_timestamp;
  }
  std::string summary() const;
};

struct LoadedSeries {
  TimeSeries series;
  GapReport gaps;
};

// Reads one value column against a timestamp column. Invalid rows are dropped
// and counted; the first of any duplicated timestamp is kept. The result is
// sorted and must be on an hourly (or coarser, whole-hour) lattice.
LoadedSeries load_series_csv(const std::filesystem::path& path, const ColumnMap& columns);

// Global rescale so the mean equals target_mean.
TimeSeries normalize_demand(const TimeSeries& series, double target_mean);

struct JointRecord {
  Timestamp time;
  double w1 = 0.0;
  double w2 = 0.0;
  double demand = 0.0;
};

struct JointSeries {
  std::vector<JointRecord> records;

  std::size_t size() const noexcept { return records.size(); }
  bool empty() const noexcept { return records.empty(); }
};

// Inner join on timestamp; only instants present in all three series survive.
JointSeries align_series(const TimeSeries& w1, const TimeSeries& w2, const TimeSeries& demand);

}  // namespace windgame
