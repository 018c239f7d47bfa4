#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vvkrr::text {

// Shortest round-trip decimal form, '.' separator, independent of the
// global locale. Parsing the result yields the identical double.
std::string format_double(double value);

// Locale-independent strict parse; throws std::invalid_argument on trailing
// garbage or empty input.
double parse_double(std::string_view token);
long long parse_integer(std::string_view token);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

/// Whitespace- or comma-separated list of reals.
std::vector<double> parse_double_list(std::string_view s);
std::string format_double_list(const std::vector<double>& values);

struct KeyValue {
  std::string key;
  std::string value;
  int line = 0;
};

// Parses "key = value" lines. A "[name]" header prefixes the keys that follow
// with "name.". Blank lines and lines starting with '#' or ';' are skipped.
// Throws std::invalid_argument naming the offending line.
std::vector<KeyValue> parse_key_values(std::string_view body);

}  // namespace vvkrr::text
