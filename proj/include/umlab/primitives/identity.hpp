#pragma once

#include <compare>
#include <string>

#include "umlab/primitives/bytes.hpp"

namespace umlab {

/// Party name: nonempty, at most 64 bytes.
class PartyId {
 public:
  PartyId() = default;
  explicit PartyId(std::string name);

  const std::string& name() const { return name_; }
  Bytes bytes() const { return to_bytes(name_); }

  friend bool operator==(const PartyId&, const PartyId&) = default;
  friend auto operator<=>(const PartyId&, const PartyId&) = default;

 private:
  std::string name_;
};

}  // namespace umlab
