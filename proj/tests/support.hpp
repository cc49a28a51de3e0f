#pragma once

#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "rerl/parser.hpp"
#include "rerl/reversible.hpp"

namespace rerl::testing {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline std::string program_path(const std::string& name) { return std::string(RERL_PROGRAMS_DIR) + "/" + name; }

inline std::shared_ptr<const Module> load_program(const std::string& name) {
  return std::make_shared<const Module>(parse_module(read_file(program_path(name))));
}

inline std::shared_ptr<const Module> module_of(const std::string& text) {
  return std::make_shared<const Module>(parse_module(text));
}

inline FunName main0() { return FunName{"main", 0}; }

}  // namespace rerl::testing
