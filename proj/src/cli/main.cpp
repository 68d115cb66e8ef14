#include <iostream>

#include "umlab/cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return umlab::cli::cli_main(args, std::cout, std::cerr);
}
