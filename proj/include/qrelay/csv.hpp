#pragma once

#include <cstdio>
#include <string>

namespace qrelay {

// Fixed 12-significant-digit rendering used by every CSV writer.
inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace qrelay
