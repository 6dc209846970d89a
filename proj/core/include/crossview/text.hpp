#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace crossview {

/// Shortest decimal representation that round-trips the exact double.
std::string format_double(double value);

std::vector<std::string_view> split_fields(std::string_view line, char sep = ',');

/// Strict numeric parsing; `context` is prefixed to error messages.
double parse_double(std::string_view field, const std::string& context);
long long parse_int(std::string_view field, const std::string& context);

}  // namespace crossview
