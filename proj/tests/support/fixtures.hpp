#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace invkit::testing {

inline std::string fixture_path(const std::string& name) {
  return std::string(INVKIT_FIXTURE_DIR) + "/" + name;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string read_fixture(const std::string& name) { return read_text(fixture_path(name)); }

}  // namespace invkit::testing
