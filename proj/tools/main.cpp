#include <iostream>

#include "dtization/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dtz::cli::run(args, std::cout, std::cerr);
}
