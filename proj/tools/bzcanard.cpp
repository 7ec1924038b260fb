#include <iostream>
#include <string>
#include <vector>

#include "bz/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return bz::cli::run(args, std::cout, std::cerr);
}
