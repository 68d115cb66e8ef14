#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <string_view>

#include "umlab/primitives/bytes.hpp"

namespace umlab {

using Digest = std::array<std::uint8_t, 32>;

/// Domain-separation tags. Each hash role in the suite gets its own tag so
/// that no two roles can ever be fed the same preimage.
namespace tags {
inline constexpr std::string_view kCommitment = "CS/v1";
inline constexpr std::string_view kKdf = "KDF/v1";
inline constexpr std::string_view kDerandomize = "FO/v1";
inline constexpr std::string_view kEntropy = "ENT/v1";
inline constexpr std::string_view kPkeStream = "PKE/v1";
inline constexpr std::string_view kSeed = "SEED/v1";
inline constexpr std::string_view kExponent = "EXP/v1";
}  // namespace tags

inline constexpr std::string_view kHashName = "SHA-256";

/// Incremental SHA-256 over `[u8 tag-len][tag] || input`.
class TaggedHash {
 public:
  explicit TaggedHash(std::string_view tag);
  ~TaggedHash();
  TaggedHash(TaggedHash&&) noexcept;
  TaggedHash& operator=(TaggedHash&&) noexcept;
  TaggedHash(const TaggedHash&) = delete;
  TaggedHash& operator=(const TaggedHash&) = delete;

  TaggedHash& update(ByteView data);
  TaggedHash& update_u32(std::uint32_t v);
  TaggedHash& update_u64(std::uint64_t v);
  Digest finish();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Digest tagged_hash(std::string_view tag, std::initializer_list<ByteView> parts);

}  // namespace umlab
