#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hmmix::text {

// Shortest representation that round-trips exactly.
std::string format_double(double value);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view line, char delimiter);

// Strict parses: the whole (trimmed) field must be consumed.
std::optional<double> parse_double(std::string_view field);
std::optional<std::int64_t> parse_int(std::string_view field);

// Comma- or whitespace-separated list of reals.
std::optional<std::vector<double>> parse_double_list(std::string_view field);
std::string join_doubles(const std::vector<double>& values, char delimiter = ',');

}  // namespace hmmix::text
