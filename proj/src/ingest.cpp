#include "windgame/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "windgame/csv.hpp"

namespace windgame {

namespace {

constexpr std::chrono::seconds kHour{3600};

int parse_fixed(std::string_view text, std::size_t pos, std::size_t len) {
  if (pos + len > text.size()) throw std::invalid_argument("truncated timestamp");
  int value = 0;
  const char* first = text.data() + pos;
  const auto [ptr, ec] = std::from_chars(first, first + len, value);
  if (ec != std::errc{} || ptr != first + len) throw std::invalid_argument("bad digits in timestamp");
  return value;
}

void expect(std::string_view text, std::size_t pos, char c) {
  if (pos >= text.size() || text[pos] != c) throw std::invalid_argument("unexpected character in timestamp");
}

}  // namespace

Timestamp parse_iso8601(std::string_view text) {
  using namespace std::chrono;
  text = csv::trim(text);
  const int y = parse_fixed(text, 0, 4);
  expect(text, 4, '-');
  const int mo = parse_fixed(text, 5, 2);
  expect(text, 7, '-');
  const int d = parse_fixed(text, 8, 2);
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw std::invalid_argument("invalid calendar date");

  int hh = 0, mm = 0, ss = 0;
  std::size_t pos = 10;
  if (pos < text.size() && (text[pos] == 'T' || text[pos] == ' ')) {
    hh = parse_fixed(text, pos + 1, 2);
    pos += 3;
    if (pos < text.size() && text[pos] == ':') {
      mm = parse_fixed(text, pos + 1, 2);
      pos += 3;
      if (pos < text.size() && text[pos] == ':') {
        ss = parse_fixed(text, pos + 1, 2);
        pos += 3;
      }
    }
  }
  if (hh > 24 || mm > 59 || ss > 60 || (hh == 24 && (mm != 0 || ss != 0))) {
    throw std::invalid_argument("invalid time of day");
  }

  seconds offset{0};
  if (pos < text.size()) {
    const char c = text[pos];
    if (c == 'Z' && pos + 1 == text.size()) {
      pos += 1;
    } else if (c == '+' || c == '-') {
      const int oh = parse_fixed(text, pos + 1, 2);
      int om = 0;
      if (pos + 3 < text.size()) {
        std::size_t mpos = pos + 3;
        if (text[mpos] == ':') ++mpos;
        om = parse_fixed(text, mpos, 2);
        pos = mpos + 2;
      } else {
        pos += 3;
      }
      offset = hours{oh} + minutes{om};
      if (c == '-') offset = -offset;
    }
    if (pos != text.size()) throw std::invalid_argument("trailing characters in timestamp");
  }

  return sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss} - offset;
}

std::string format_iso8601(Timestamp t) {
  using namespace std::chrono;
  const auto day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  const hh_mm_ss hms{t - day_point};
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                static_cast<long>(hms.seconds().count()));
  return buffer;
}

double TimeSeries::mean() const {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

std::string GapReport::summary() const {
  std::ostringstream out;
  out << source << ": read " << rows_read << " rows, kept " << rows_read - dropped() << ", dropped "
      << dropped();
  if (dropped() > 0) {
    out << " (missing " << missing_value << ", unparseable value " << unparseable_value
        << ", unparseable timestamp " << unparseable_timestamp << ", negative " << negative_value
        << ", duplicate timestamp " << duplicate_timestamp << ")";
  }
  if (!duplicates.empty()) {
    out << "\n  duplicated timestamps:";
    const std::size_t shown = std::min<std::size_t>(duplicates.size(), 10);
    for (std::size_t i = 0; i < shown; ++i) out << ' ' << format_iso8601(duplicates[i]);
    if (duplicates.size() > shown) out << " ...";
  }
  return out.str();
}

LoadedSeries load_series_csv(const std::filesystem::path& path, const ColumnMap& columns) {
  std::ifstream in(path);
  if (!in) {
    throw IngestError(IngestError::Kind::missing_file, "cannot open series file '" + path.string() + "'");
  }

  std::string line;
  if (!csv::read_line(in, line)) {
    throw IngestError(IngestError::Kind::missing_column, "series file '" + path.string() + "' has no header row");
  }
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  const auto header = csv::split_record(line);
  const auto find_column = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (csv::trim(header[i]) == name) return i;
    }
    throw IngestError(IngestError::Kind::missing_column,
                      "column '" + name + "' not found in header of '" + path.string() + "'");
  };
  const std::size_t time_col = find_column(columns.timestamp);
  const std::size_t value_col = find_column(columns.value);

  LoadedSeries result;
  result.series.label = path.filename().string() + ":" + columns.value;
  result.gaps.source = result.series.label;

  struct Row {
    Timestamp time;
    double value;
  };
  std::vector<Row> rows;
  std::unordered_set<std::int64_t> seen;

  while (csv::read_line(in, line)) {
    if (csv::trim(line).empty()) continue;
    ++result.gaps.rows_read;
    const auto fields = csv::split_record(line);
    Timestamp time;
    try {
      if (time_col >= fields.size()) throw std::invalid_argument("missing");
      time = parse_iso8601(fields[time_col]);
    } catch (const std::invalid_argument&) {
      ++result.gaps.unparseable_timestamp;
      continue;
    }
    if (value_col >= fields.size() || csv::trim(fields[value_col]).empty()) {
      ++result.gaps.missing_value;
      continue;
    }
    const auto value = csv::parse_double(fields[value_col]);
    if (!value) {
      ++result.gaps.unparseable_value;
      continue;
    }
    if (*value < 0.0) {
      ++result.gaps.negative_value;
      continue;
    }
    if (!seen.insert(time.time_since_epoch().count()).second) {
      ++result.gaps.duplicate_timestamp;
      result.gaps.duplicates.push_back(time);
      continue;
    }
    rows.push_back({time, *value});
  }

  if (rows.empty()) {
    throw IngestError(IngestError::Kind::no_valid_rows,
                      "no valid rows in '" + path.string() + "'; " + result.gaps.summary());
  }

  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.time < b.time; });
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto step = rows[i].time - rows[i - 1].time;
    if (step < kHour || step % kHour != std::chrono::seconds{0}) {
      throw IngestError(IngestError::Kind::sub_hourly,
                        "'" + path.string() + "' is not on an hourly lattice: " +
                            format_iso8601(rows[i - 1].time) + " -> " + format_iso8601(rows[i].time));
    }
  }

  result.series.timestamps.reserve(rows.size());
  result.series.values.reserve(rows.size());
  for (const auto& row : rows) {
    result.series.timestamps.push_back(row.time);
    result.series.values.push_back(row.value);
  }
  return result;
}

TimeSeries normalize_demand(const TimeSeries& series, double target_mean) {
  if (series.empty()) {
    throw IngestError(IngestError::Kind::invalid_argument, "cannot normalise an empty series");
  }
  if (!(target_mean > 0.0) || !std::isfinite(target_mean)) {
    throw IngestError(IngestError::Kind::invalid_argument, "target mean must be positive");
  }
  const double current = series.mean();
  if (!(current > 0.0)) {
    throw IngestError(IngestError::Kind::invalid_argument,
                      "series '" + series.label + "' has non-positive mean; cannot normalise");
  }
  TimeSeries out = series;
  const double scale = target_mean / current;
  for (double& v : out.values) v *= scale;
  return out;
}

JointSeries align_series(const TimeSeries& w1, const TimeSeries& w2, const TimeSeries& demand) {
  for (const TimeSeries* s : {&w1, &w2, &demand}) {
    if (s->empty()) {
      throw IngestError(IngestError::Kind::invalid_argument, "cannot align empty series '" + s->label + "'");
    }
  }

  JointSeries joint;
  std::size_t a = 0, b = 0, c = 0;
  while (a < w1.size() && b < w2.size() && c < demand.size()) {
    const Timestamp ta = w1.timestamps[a], tb = w2.timestamps[b], tc = demand.timestamps[c];
    const Timestamp latest = std::max({ta, tb, tc});
    if (ta == latest && tb == latest && tc == latest) {
      joint.records.push_back({latest, w1.values[a], w2.values[b], demand.values[c]});
      ++a, ++b, ++c;
      continue;
    }
    if (ta < latest) ++a;
    if (tb < latest) ++b;
    if (tc < latest) ++c;
  }

  if (joint.empty()) {
    std::ostringstream msg;
    msg << "timestamps of the three series do not intersect;";
    for (const TimeSeries* s : {&w1, &w2, &demand}) {
      msg << " [" << s->label << ": " << s->size() << " points, " << format_iso8601(s->timestamps.front())
          << " .. " << format_iso8601(s->timestamps.back()) << "]";
    }
    throw IngestError(IngestError::Kind::empty_intersection, msg.str());
  }
  return joint;
}

}  // namespace windgame
