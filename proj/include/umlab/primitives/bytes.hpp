#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace umlab {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

std::string to_hex(ByteView data);
Bytes from_hex(std::string_view hex);
Bytes to_bytes(std::string_view text);

inline ByteView view(const Bytes& b) { return {b.data(), b.size()}; }

template <std::size_t N>
ByteView view(const std::array<std::uint8_t, N>& a) {
  return {a.data(), a.size()};
}

/// Big-endian writer for the canonical wire and hash-input encoding.
///
/// A labeled field is `[u8 label-len][label][u32 value-len][value]`; a blob
/// is `[u32 len][data]`.
class ByteWriter {
 public:
  ByteWriter& u8(std::uint8_t v);
  ByteWriter& u16(std::uint16_t v);
  ByteWriter& u32(std::uint32_t v);
  ByteWriter& u64(std::uint64_t v);
  ByteWriter& raw(ByteView data);
  ByteWriter& blob(ByteView data);
  ByteWriter& str(std::string_view s);  // u16 length prefix
  ByteWriter& field(std::string_view label, ByteView value);

  const Bytes& bytes() const { return out_; }
  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
};

/// Reader counterpart of ByteWriter. Every accessor throws DecodeError when
/// the input runs out.
class ByteReader {
 public:
  explicit ByteReader(ByteView in) : in_(in) {}

  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  std::uint64_t u64();
  Bytes raw(std::size_t n);
  Bytes blob();
  std::string str();
  std::pair<std::string, Bytes> field();

  bool done() const { return pos_ == in_.size(); }
  std::size_t remaining() const { return in_.size() - pos_; }
  void expect_done() const;

 private:
  ByteView take(std::size_t n);

  ByteView in_;
  std::size_t pos_ = 0;
};

}  // namespace umlab
