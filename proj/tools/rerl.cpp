#include <iostream>

#include "rerl/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return rerl::execute_cli(args, std::cin, std::cout, std::cerr);
}
