#include "dynlf/text.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

#include "dynlf/errors.hpp"

namespace dynlf {

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) fail(Errc::io_error, "failed to render double");
  return std::string(buf, ptr);
}

double parse_double(std::string_view token) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size())
    fail(Errc::invalid_config, "not a number: '" + std::string(token) + "'");
  return value;
}

long long parse_int(std::string_view token) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size())
    fail(Errc::invalid_config, "not an integer: '" + std::string(token) + "'");
  return value;
}

}  // namespace dynlf
