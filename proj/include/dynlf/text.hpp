#pragma once

#include <string>
#include <string_view>

namespace dynlf {

/// Shortest decimal rendering that parses back to the same double.
std::string format_double(double x);

/// Full-token numeric parses; throw invalid_config with the offending token.
/// Callers that know the line context catch and rewrap.
double parse_double(std::string_view token);
long long parse_int(std::string_view token);

}  // namespace dynlf
