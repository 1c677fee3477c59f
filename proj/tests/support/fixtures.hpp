#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "maua/io.hpp"

namespace maua::testing {

inline std::string fixture_path(std::string_view name) {
  return std::string(MAUA_FIXTURE_DIR) + "/" + std::string(name);
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline DecisionProblem load_fixture(std::string_view name) {
  return parse_problem(read_text(fixture_path(name)));
}

}  // namespace maua::testing
