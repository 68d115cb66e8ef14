// Acceptance criteria 1-10, one PASS/FAIL line each. Optional arguments pick
// a subset by number.

#include <cstdlib>
#include <iostream>
#include <string>

#include "umlab/acceptance/acceptance.hpp"
#include "umlab/cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  if (ids.empty()) ids = umlab::acceptance::all_criteria();
  try {
    const int fails = umlab::acceptance::run_suite(ids, umlab::cli::cli_main, std::cout);
    std::cout << (ids.size() - static_cast<std::size_t>(fails)) << "/" << ids.size() << " criteria passed\n";
    return fails == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "acceptance: " << e.what() << '\n';
    return 1;
  }
}
