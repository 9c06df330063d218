#pragma once

#include <cstdio>
#include <string>

namespace regraph {

// Fixed 12-significant-digit rendering used by every CSV writer.
inline std::string format_real(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", value == 0.0 ? 0.0 : value);
  return buf;
}

}  // namespace regraph
