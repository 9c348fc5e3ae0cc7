#include "throttle/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "throttle/error.hpp"

namespace throttle::csv {

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.emplace_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return text.substr(first, last - first + 1);
}

Table read(std::istream& in, std::string_view expected_header) {
  Table table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    if (!have_header) {
      if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
        line.erase(0, 3);
      if (trim(line) != expected_header)
        throw ParseError(fmt::format("expected header '{}', got '{}'", expected_header,
                                     trim(line)));
      table.columns = split(expected_header);
      have_header = true;
      continue;
    }
    auto fields = split(line);
    if (fields.size() != table.columns.size())
      throw ParseError(fmt::format("line {}: expected {} fields, got {}", line_no,
                                   table.columns.size(), fields.size()));
    table.rows.push_back(std::move(fields));
    table.lines.push_back(line_no);
  }
  if (!have_header) throw ParseError("empty file: missing header");
  return table;
}

Table read_file(const std::string& path, std::string_view expected_header) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    return read(in, expected_header);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

double to_double(std::string_view field, std::size_t line) {
  double value = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value))
    throw ParseError(fmt::format("line {}: '{}' is not a finite number", line, field));
  return value;
}

std::uint64_t to_u64(std::string_view field, std::size_t line) {
  std::uint64_t value = 0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc{} || ptr != end)
    throw ParseError(fmt::format("line {}: '{}' is not a non-negative integer", line, field));
  return value;
}

std::string fixed6(double value) {
  // Avoid "-0.000000" so logs stay byte-stable.
  if (value == 0.0 || std::abs(value) < 5e-7) value = 0.0;
  return fmt::format("{:.6f}", value);
}

}  // namespace throttle::csv
