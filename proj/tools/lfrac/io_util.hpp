#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

namespace lfrac::cli {

// Shortest decimal that round-trips to the same double; '.' separator,
// no locale involvement.
std::string format_double(double v);

// Fixed 17 significant digits, enough to reproduce any double exactly.
std::string format_double17(double v);

double parse_double(std::string_view text);  // throws std::invalid_argument

std::uint64_t fnv1a(std::string_view bytes);
std::string fnv1a_hex(std::string_view bytes);

std::string read_file(const std::string& path);   // throws std::runtime_error
void write_file(const std::string& path, std::string_view content);

// 1-based line and column of a byte offset inside a text blob.
std::pair<int, int> line_column(std::string_view text, std::size_t byte);

// "points.csv" -> "points.distances.csv"; no extension appends the suffix.
std::string with_suffix(const std::string& path, const std::string& suffix);

}  // namespace lfrac::cli
