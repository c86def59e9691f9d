#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "pwca/errors.hpp"

namespace pwca {

// All reals in emitted files use 17 significant digits, enough for binary64
// round-trip exactness and byte-stable output.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << content;
  if (!out) throw DataError("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace pwca
