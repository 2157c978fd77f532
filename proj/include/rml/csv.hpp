#pragma once

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>
#include <system_error>

namespace rml {

// Shortest round-trip decimal form, independent of stream locale and
// precision state, so reports are byte-reproducible.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc{}) return "nan";
  return std::string(buf, res.ptr);
}

inline void write_number(std::ostream& os, double v) { os << format_number(v); }

}  // namespace rml
