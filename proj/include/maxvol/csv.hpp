#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>

namespace maxvol::csv {

/// Locale-independent numeric formatting; reruns must be byte-identical.
inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

/// Versioned schema line followed by the header row.
inline void header(std::ostream& out, std::string_view kind, std::string_view columns) {
  out << "# maxvol csv v1 " << kind << "\n" << columns << "\n";
}

}  // namespace maxvol::csv
