#include <iostream>
#include <string>
#include <vector>

#include "maua/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return maua::run_cli(args, std::cin, std::cout, std::cerr);
}
