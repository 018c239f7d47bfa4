#include "vvkrr/textio.hpp"

#include <array>
#include <charconv>
#include <stdexcept>
#include <system_error>

namespace vvkrr::text {

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) {
    throw std::runtime_error("format_double: conversion failed");
  }
  return std::string(buf.data(), ptr);
}

double parse_double(std::string_view token) {
  token = trim(token);
  if (token.empty()) {
    throw std::invalid_argument("expected a real number, got an empty value");
  }
  // from_chars rejects a leading '+', which config files commonly carry.
  if (token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw std::invalid_argument("expected a real number, got '" + std::string(token) + "'");
  }
  return value;
}

long long parse_integer(std::string_view token) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  long long value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
    throw std::invalid_argument("expected an integer, got '" + std::string(token) + "'");
  }
  return value;
}

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto pos = s.find(sep, start);
    const auto end = pos == std::string_view::npos ? s.size() : pos;
    out.emplace_back(trim(s.substr(start, end - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<double> parse_double_list(std::string_view s) {
  std::vector<double> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == ',')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != ',') ++j;
    if (j > i) out.push_back(parse_double(s.substr(i, j - i)));
    i = j;
  }
  return out;
}

std::string format_double_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ' ';
    out += format_double(values[i]);
  }
  return out;
}

std::vector<KeyValue> parse_key_values(std::string_view body) {
  std::vector<KeyValue> out;
  int line_no = 0;
  std::string section;
  std::size_t pos = 0;
  while (pos <= body.size()) {
    const auto nl = body.find('\n', pos);
    const auto raw = body.substr(pos, nl == std::string_view::npos ? body.size() - pos : nl - pos);
    ++line_no;
    const auto line = trim(raw);
    if (!line.empty() && line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw std::invalid_argument("line " + std::to_string(line_no) + ": malformed section header");
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
    } else if (!line.empty() && line.front() != '#' && line.front() != ';') {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 'key = value'");
      }
      const auto bare = trim(line.substr(0, eq));
      KeyValue kv{bare.empty() || section.empty() ? std::string(bare) : section + "." + std::string(bare), std::string(trim(line.substr(eq + 1))), line_no};
      if (bare.empty()) {
        throw std::invalid_argument("line " + std::to_string(line_no) + ": empty key");
      }
      out.push_back(std::move(kv));
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return out;
}

}  // namespace vvkrr::text
