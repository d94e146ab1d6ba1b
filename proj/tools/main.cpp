#include <iostream>
#include <vector>

#include "ldtsp/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ldtsp::run_cli(std::move(args), std::cout, std::cerr);
}
