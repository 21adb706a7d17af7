#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace windgame::csv {

// Splits one CSV record. Double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_record(std::string_view line);

std::string_view trim(std::string_view s);

// Parses a finite double; empty or malformed text yields nullopt.
std::optional<double> parse_double(std::string_view text);

// Shortest representation that round-trips to the same double.
std::string format_double(double value);

// Reads a line, stripping a trailing '\r'. Returns false at end of stream.
bool read_line(std::istream& in, std::string& line);

}  // namespace windgame::csv
