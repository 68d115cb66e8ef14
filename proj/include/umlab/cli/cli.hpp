#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace umlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitBoundViolated = 2;

/// Whole command line minus argv[0]. Everything the binary does goes through
/// here so tests can drive it with captured streams.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace umlab::cli
