#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace umlab::acceptance {

/// Criterion 10 drives the command line; passing it in keeps this library
/// below the cli one.
using CliFn = std::function<int(const std::vector<std::string>&, std::ostream&, std::ostream&)>;

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

std::vector<int> all_criteria();
std::string criterion_name(int id);

/// Throws ConfigError for an unknown id.
CriterionResult run_criterion(int id, const CliFn& cli);

/// Prints one PASS/FAIL line per criterion. Returns the number of failures.
int run_suite(const std::vector<int>& ids, const CliFn& cli, std::ostream& out);

}  // namespace umlab::acceptance
