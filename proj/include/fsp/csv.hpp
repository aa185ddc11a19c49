#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace fsp::csv {

std::vector<std::string> split_line(std::string_view line);

/// Strict numeric parse of a whole cell; throws std::runtime_error naming the cell.
double parse_double(std::string_view cell);

/// Shortest round-trip representation, so CSV output is byte-stable.
std::string format_double(double v);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Reads a comma-separated table whose first line is a header.
Table read_table(std::istream& in);

}  // namespace fsp::csv
