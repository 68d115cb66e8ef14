#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "umlab/primitives/bytes.hpp"

namespace umlab::proto {

/// One protocol payload: [u8 kind][u8 step][u8 nfields] followed by
/// nfields labeled fields in the canonical TLV layout.
struct Message {
  std::uint8_t kind = 0;
  std::uint8_t step = 0;
  std::vector<std::pair<std::string, Bytes>> fields;

  Bytes encode() const;
  /// Throws DecodeError on truncation or trailing bytes.
  static Message decode(ByteView payload);

  /// Throws ProtocolError when the label is missing.
  const Bytes& get(std::string_view label) const;
  bool has(std::string_view label) const;
  std::vector<std::string> labels() const;

  friend bool operator==(const Message&, const Message&) = default;
};

/// Decodes and checks kind, step and the exact ordered label list. Any
/// mismatch is a ProtocolError.
Message expect_message(ByteView payload, std::uint8_t kind, std::uint8_t step,
                       std::initializer_list<std::string_view> labels);
Message expect_message(ByteView payload, std::uint8_t kind, std::uint8_t step,
                       const std::vector<std::string>& labels);

}  // namespace umlab::proto
