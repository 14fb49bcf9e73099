#pragma once

#include <cstdio>
#include <string>

namespace focklab {

/// 17 significant digits, '.' decimal point: lossless for doubles.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace focklab
