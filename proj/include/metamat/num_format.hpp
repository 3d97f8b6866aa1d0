#pragma once

#include <charconv>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>

namespace metamat {

/// Shortest decimal form that parses back to the same double bit pattern.
/// All CSV/JSON exports go through this so files round-trip exactly.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline bool try_parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc{} && res.ptr == last;
}

inline double parse_double(std::string_view s, const std::string& what) {
  double v = 0.0;
  if (!try_parse_double(s, v))
    throw std::invalid_argument(what + ": not a number: '" + std::string(s) +
                                "'");
  return v;
}

}  // namespace metamat
