#include <iostream>
#include <string>
#include <vector>

#include "morphogrid/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return morphogrid::cli::run(std::move(args), std::cout, std::cerr);
}
