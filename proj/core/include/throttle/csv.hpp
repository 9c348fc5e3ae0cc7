#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace throttle::csv {

/// Rows of a comma-separated file whose first line must equal `header`.
/// Blank lines are skipped; CR before LF is tolerated on input.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  /// 1-based source line of each row, for diagnostics.
  std::vector<std::size_t> lines;
};

Table read(std::istream& in, std::string_view expected_header);
Table read_file(const std::string& path, std::string_view expected_header);

std::vector<std::string> split(std::string_view line, char sep = ',');
std::string_view trim(std::string_view text);

double to_double(std::string_view field, std::size_t line);
std::uint64_t to_u64(std::string_view field, std::size_t line);

/// Fixed six-decimal rendering used by every report.
std::string fixed6(double value);

}  // namespace throttle::csv
