#pragma once

// Command-line front end: run, explore, check, debug and serve.
// Exit status 0 on success, 1 on bad input or a runtime error in the
// program, 2 when a check finds violations.

#include <iosfwd>
#include <string>
#include <vector>

namespace rerl {

/// `args` excludes the program name. `in` feeds the debug REPL.
int execute_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace rerl
