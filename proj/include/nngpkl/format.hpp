#pragma once

#include <cstdio>
#include <string>

namespace nngpkl {

// All floating-point output goes through this: 17 significant digits are
// enough for a double to round-trip exactly through text.
inline std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace nngpkl
