#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "windgame/ingest.hpp"

using namespace windgame;
using test_support::hour;
using test_support::TempDir;

namespace {

const ColumnMap kWind{"timestamp", "wind_speed"};

TimeSeries series(const std::string& label, std::vector<int> hours, std::vector<double> values) {
  TimeSeries s;
  s.label = label;
  for (int h : hours) s.timestamps.push_back(hour(h));
  s.values = std::move(values);
  return s;
}

}  // namespace

TEST_CASE("iso8601 parsing accepts the common spellings") {
  const Timestamp base = hour(13);
  CHECK(parse_iso8601("2014-01-01T13:00:00Z") == base);
  CHECK(parse_iso8601("2014-01-01 13:00") == base);
  CHECK(parse_iso8601("2014-01-01T13") == base);
  CHECK(parse_iso8601("2014-01-01T14:00:00+01:00") == base);
  CHECK(parse_iso8601("2014-01-01T12:30:00-0030") == base);
  CHECK(parse_iso8601("2014-01-01") == hour(0));
  CHECK(format_iso8601(base) == "2014-01-01T13:00:00Z");
  CHECK_THROWS_AS(parse_iso8601("2014-02-30T00:00"), std::invalid_argument);
  CHECK_THROWS_AS(parse_iso8601("14-01-01"), std::invalid_argument);
  CHECK_THROWS_AS(parse_iso8601("2014-01-01T13:00:00Zjunk"), std::invalid_argument);
}

TEST_CASE("well-formed csv loads sorted") {
  TempDir dir;
  const auto file = dir.write("w.csv",
                              "timestamp,wind_speed\n"
                              "2014-01-01T02:00:00Z,7.5\n"
                              "2014-01-01T00:00:00Z,5.0\n"
                              "2014-01-01T01:00:00Z,6.25\n");
  const LoadedSeries loaded = load_series_csv(file, kWind);
  REQUIRE(loaded.series.size() == 3);
  CHECK(loaded.series.timestamps == std::vector<Timestamp>{hour(0), hour(1), hour(2)});
  CHECK(loaded.series.values == std::vector<double>{5.0, 6.25, 7.5});
  CHECK(loaded.gaps.dropped() == 0);
}

TEST_CASE("blank cell is dropped and reported") {
  TempDir dir;
  const auto file = dir.write("w.csv",
                              "timestamp,wind_speed\n"
                              "2014-01-01T00:00:00Z,5.0\n"
                              "2014-01-01T01:00:00Z,\n"
                              "2014-01-01T02:00:00Z,7.0\n");
  const LoadedSeries loaded = load_series_csv(file, kWind);
  CHECK(loaded.series.size() == 2);
  CHECK(loaded.gaps.dropped() == 1);
  CHECK(loaded.gaps.missing_value == 1);
  CHECK(loaded.gaps.summary().find("missing 1") != std::string::npos);
}

TEST_CASE("duplicated timestamp keeps the first occurrence") {
  TempDir dir;
  const auto file = dir.write("w.csv",
                              "timestamp,wind_speed\n"
                              "2014-01-01T00:00:00Z,5.0\n"
                              "2014-01-01T01:00:00Z,6.0\n"
                              "2014-01-01T01:00:00Z,99.0\n"
                              "2014-01-01T02:00:00Z,7.0\n");
  const LoadedSeries loaded = load_series_csv(file, kWind);
  CHECK(loaded.series.values == std::vector<double>{5.0, 6.0, 7.0});
  CHECK(loaded.gaps.duplicate_timestamp == 1);
  REQUIRE(loaded.gaps.duplicates.size() == 1);
  CHECK(loaded.gaps.duplicates[0] == hour(1));
  CHECK(loaded.gaps.summary().find("2014-01-01T01:00:00Z") != std::string::npos);
}

TEST_CASE("invalid rows are classified") {
  TempDir dir;
  const auto file = dir.write("w.csv",
                              "\xEF\xBB\xBF" "other,timestamp,wind_speed\r\n"
                              "x,2014-01-01T00:00:00Z,5.0\r\n"
                              "x,not-a-time,6.0\r\n"
                              "x,2014-01-01T02:00:00Z,abc\r\n"
                              "x,2014-01-01T03:00:00Z,-1\r\n"
                              "x,2014-01-01T04:00:00Z,nan\r\n"
                              "\"x,y\",2014-01-01T05:00:00Z,+8\r\n");
  const LoadedSeries loaded = load_series_csv(file, kWind);
  CHECK(loaded.series.values == std::vector<double>{5.0, 8.0});
  CHECK(loaded.gaps.rows_read == 6);
  CHECK(loaded.gaps.unparseable_timestamp == 1);
  CHECK(loaded.gaps.unparseable_value == 2);
  CHECK(loaded.gaps.negative_value == 1);
}

TEST_CASE("loading failures are distinct") {
  TempDir dir;
  const auto kind_of = [](auto&& fn) {
    try {
      fn();
    } catch (const IngestError& e) {
      return e.kind();
    }
    FAIL("no IngestError");
    return IngestError::Kind::invalid_argument;
  };
  CHECK(kind_of([&] { load_series_csv(dir.path() / "absent.csv", kWind); }) == IngestError::Kind::missing_file);
  const auto wrong = dir.write("wrong.csv", "timestamp,speed\n2014-01-01T00:00:00Z,1\n");
  CHECK(kind_of([&] { load_series_csv(wrong, kWind); }) == IngestError::Kind::missing_column);
  const auto empty = dir.write("empty.csv", "timestamp,wind_speed\n2014-01-01T00:00:00Z,\n");
  CHECK(kind_of([&] { load_series_csv(empty, kWind); }) == IngestError::Kind::no_valid_rows);
  const auto fine = dir.write("fine.csv",
                              "timestamp,wind_speed\n2014-01-01T00:00:00Z,1\n2014-01-01T00:30:00Z,2\n");
  CHECK(kind_of([&] { load_series_csv(fine, kWind); }) == IngestError::Kind::sub_hourly);
}

TEST_CASE("gaps of whole hours are accepted") {
  TempDir dir;
  const auto file = dir.write("w.csv", "timestamp,wind_speed\n2014-01-01T00:00:00Z,1\n2014-01-01T05:00:00Z,2\n");
  CHECK(load_series_csv(file, kWind).series.size() == 2);
}

TEST_CASE("loading is deterministic") {
  TempDir dir;
  const auto file = dir.write("w.csv", "timestamp,wind_speed\n2014-01-01T01:00:00Z,1.1\n2014-01-01T00:00:00Z,2.2\n");
  const auto a = load_series_csv(file, kWind).series;
  const auto b = load_series_csv(file, kWind).series;
  CHECK(a.timestamps == b.timestamps);
  CHECK(a.values == b.values);
}

TEST_CASE("normalize_demand") {
  SUBCASE("constant series") {
    const auto out = normalize_demand(series("d", {0, 1, 2}, {50, 50, 50}), 108.1830);
    for (double v : out.values) CHECK(v == doctest::Approx(108.1830).epsilon(1e-12));
  }
  SUBCASE("linear scaling") {
    const auto out = normalize_demand(series("d", {0, 1}, {10, 30}), 40.0);
    CHECK(out.values == std::vector<double>{20.0, 60.0});
  }
  SUBCASE("target equal to the current mean is the identity") {
    const auto in = series("d", {0, 1, 2}, {1, 2, 3});
    CHECK(normalize_demand(in, 2.0).values == in.values);
  }
  SUBCASE("idempotent") {
    const auto in = series("d", {0, 1, 2, 3}, {12.5, 77.1, 3.3, 41.0});
    const auto once = normalize_demand(in, 108.1830);
    const auto twice = normalize_demand(once, 108.1830);
    CHECK(std::abs(once.mean() - 108.1830) <= 1e-9 * 108.1830);
    for (std::size_t i = 0; i < once.size(); ++i) {
      CHECK(std::abs(twice.values[i] - once.values[i]) <= 1e-9 * once.values[i]);
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(normalize_demand(series("d", {0, 1}, {0, 0}), 10.0), IngestError);
    CHECK_THROWS_AS(normalize_demand(series("d", {0}, {5}), 0.0), IngestError);
    CHECK_THROWS_AS(normalize_demand(TimeSeries{}, 10.0), IngestError);
  }
}

TEST_CASE("align_series") {
  SUBCASE("full overlap") {
    const auto w1 = series("w1", {0, 1, 2, 3, 4}, {1, 2, 3, 4, 5});
    const auto w2 = series("w2", {0, 1, 2, 3, 4}, {6, 7, 8, 9, 10});
    const auto d = series("d", {0, 1, 2, 3, 4}, {11, 12, 13, 14, 15});
    const JointSeries j = align_series(w1, w2, d);
    REQUIRE(j.size() == 5);
    CHECK(j.records[2].w1 == 3);
    CHECK(j.records[2].w2 == 8);
    CHECK(j.records[2].demand == 13);
  }
  SUBCASE("restricted to the common period") {
    std::vector<int> long_hours, short_hours;
    std::vector<double> long_values, short_values;
    for (int h = 0; h < 170; ++h) long_hours.push_back(h), long_values.push_back(h * 0.5);
    for (int h = 70; h < 170; ++h) short_hours.push_back(h), short_values.push_back(1000.0 + h);
    const JointSeries j = align_series(series("w1", long_hours, long_values),
                                       series("w2", long_hours, long_values),
                                       series("d", short_hours, short_values));
    REQUIRE(j.size() == 100);
    CHECK(j.records.front().time == hour(70));
    CHECK(j.records.back().time == hour(169));
  }
  SUBCASE("fields equal the sources at each instant") {
    const auto w1 = series("w1", {0, 2, 3, 5, 8}, {1, 2, 3, 4, 5});
    const auto w2 = series("w2", {1, 2, 3, 4, 5, 8}, {6, 7, 8, 9, 10, 11});
    const auto d = series("d", {2, 5, 7, 8}, {20, 50, 70, 80});
    const JointSeries j = align_series(w1, w2, d);
    CHECK(j.size() <= std::min({w1.size(), w2.size(), d.size()}));
    REQUIRE(j.size() == 3);
    const auto at = [](const TimeSeries& s, Timestamp t) {
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.timestamps[i] == t) return s.values[i];
      }
      return -1.0;
    };
    for (const JointRecord& r : j.records) {
      CHECK(r.w1 == at(w1, r.time));
      CHECK(r.w2 == at(w2, r.time));
      CHECK(r.demand == at(d, r.time));
    }
  }
  SUBCASE("disjoint timestamps fail with coverage") {
    try {
      align_series(series("w1", {0, 1}, {1, 2}), series("w2", {0, 1}, {1, 2}), series("d", {5, 6}, {1, 2}));
      FAIL("expected failure");
    } catch (const IngestError& e) {
      CHECK(e.kind() == IngestError::Kind::empty_intersection);
      CHECK(std::string(e.what()).find("2014-01-01T05:00:00Z") != std::string::npos);
    }
  }
}
