#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace har_audit {

// Fixed float formatting for every text artifact: 12 significant digits,
// trailing zeros dropped. Identical inputs always give identical bytes.
std::string format_double(double value);

// Shortest text that parses back to exactly the same double.
std::string format_double_exact(double value);

std::vector<std::string> split_csv_line(std::string_view line);

std::string_view trim(std::string_view s);

std::optional<double> parse_double(std::string_view s);
std::optional<std::int64_t> parse_int(std::string_view s);

}  // namespace har_audit
