#pragma once

// Small text helpers shared by the file readers.

#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace snowball::text {

/// Split on `delim`, honouring double-quoted fields ("" escapes a quote).
std::vector<std::string> split_fields(std::string_view line, char delim);

std::string_view trim(std::string_view s);

std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

/// Shortest representation that round-trips.
std::string format_double(double v);

/// Opens for reading; throws IoError naming the path on failure.
std::ifstream open_input(const std::string& path);
/// Opens for writing (truncating); throws IoError naming the path on failure.
std::ofstream open_output(const std::string& path);

} // namespace snowball::text
