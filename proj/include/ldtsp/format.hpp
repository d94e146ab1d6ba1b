#pragma once

#include <charconv>
#include <cstdio>
#include <string>

namespace ldtsp {

/// Shortest decimal form that round-trips the double (std::to_chars default).
inline std::string fmt_shortest(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// 17 significant digits, the instance-file convention.
inline std::string fmt_sig17(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

} // namespace ldtsp
