#pragma once

#include <string>

#include "umlab/primitives/bytes.hpp"

namespace umlab {

/// Self-describing record of the hash function and every domain tag, so a
/// transcript produced under one suite is never replayed under another.
struct SuiteHeader {
  std::string hash;
  std::vector<std::string> tags;

  Bytes serialize() const;
  static SuiteHeader deserialize(ByteView bytes);

  friend bool operator==(const SuiteHeader&, const SuiteHeader&) = default;
};

SuiteHeader current_suite();

}  // namespace umlab
