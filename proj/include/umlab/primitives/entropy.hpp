#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "umlab/primitives/bytes.hpp"
#include "umlab/primitives/identity.hpp"

namespace umlab {

inline constexpr unsigned kMinEntropyBits = 4;
inline constexpr unsigned kMaxEntropyBits = 64;

/// Short session digest G(...) truncated to n_e bits. The value is kept
/// right-aligned in a u64, so the unused high bits are zero.
struct EntropyValue {
  std::uint64_t value = 0;
  unsigned bits = 0;

  Bytes bytes() const;  // ceil(bits/8) big-endian bytes
  std::string hex() const;

  friend bool operator==(const EntropyValue&, const EntropyValue&) = default;
};

struct LabeledElement {
  std::string label;
  Bytes value;
};

/// Reserved label used for the receiver TLV.
inline constexpr std::string_view kReceiverLabel = "receiver";

/// Canonical G input: optional receiver TLV, then every (label, value) as
/// [u8 label-len][label][u32 value-len][value], in order.
/// Throws ConfigError on empty, duplicate or reserved labels.
Bytes entropy_input(const std::optional<PartyId>& receiver, const std::vector<LabeledElement>& elements);

/// Top n_e bits of H_ent(entropy_input(...)). Throws ConfigError unless
/// 4 <= n_e <= 64.
EntropyValue entropy(const std::optional<PartyId>& receiver, const std::vector<LabeledElement>& elements,
                     unsigned n_e);

void require_entropy_bits(unsigned n_e);

}  // namespace umlab
