#include "umlab/primitives/bytes.hpp"

#include <limits>

#include "umlab/primitives/error.hpp"

namespace umlab {

std::string to_hex(ByteView data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (auto b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

namespace {
int nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw DecodeError("odd-length hex string");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = nibble(hex[2 * i]);
    int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw DecodeError("invalid hex digit");
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

Bytes to_bytes(std::string_view text) { return Bytes(text.begin(), text.end()); }

ByteWriter& ByteWriter::u8(std::uint8_t v) {
  out_.push_back(v);
  return *this;
}

ByteWriter& ByteWriter::u16(std::uint16_t v) {
  out_.push_back(static_cast<std::uint8_t>(v >> 8));
  out_.push_back(static_cast<std::uint8_t>(v));
  return *this;
}

ByteWriter& ByteWriter::u32(std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
  return *this;
}

ByteWriter& ByteWriter::u64(std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
  return *this;
}

ByteWriter& ByteWriter::raw(ByteView data) {
  out_.insert(out_.end(), data.begin(), data.end());
  return *this;
}

ByteWriter& ByteWriter::blob(ByteView data) {
  if (data.size() > std::numeric_limits<std::uint32_t>::max()) throw SizeError("blob too large");
  u32(static_cast<std::uint32_t>(data.size()));
  return raw(data);
}

ByteWriter& ByteWriter::str(std::string_view s) {
  if (s.size() > std::numeric_limits<std::uint16_t>::max()) throw SizeError("string too long");
  u16(static_cast<std::uint16_t>(s.size()));
  out_.insert(out_.end(), s.begin(), s.end());
  return *this;
}

ByteWriter& ByteWriter::field(std::string_view label, ByteView value) {
  if (label.empty() || label.size() > 255) throw SizeError("field label must be 1..255 bytes");
  u8(static_cast<std::uint8_t>(label.size()));
  out_.insert(out_.end(), label.begin(), label.end());
  return blob(value);
}

ByteView ByteReader::take(std::size_t n) {
  if (remaining() < n) throw DecodeError("truncated input");
  auto s = in_.subspan(pos_, n);
  pos_ += n;
  return s;
}

std::uint8_t ByteReader::u8() { return take(1)[0]; }

std::uint16_t ByteReader::u16() {
  auto s = take(2);
  return static_cast<std::uint16_t>((s[0] << 8) | s[1]);
}

std::uint32_t ByteReader::u32() {
  auto s = take(4);
  std::uint32_t v = 0;
  for (auto b : s) v = (v << 8) | b;
  return v;
}

std::uint64_t ByteReader::u64() {
  auto s = take(8);
  std::uint64_t v = 0;
  for (auto b : s) v = (v << 8) | b;
  return v;
}

Bytes ByteReader::raw(std::size_t n) {
  auto s = take(n);
  return Bytes(s.begin(), s.end());
}

Bytes ByteReader::blob() { return raw(u32()); }

std::string ByteReader::str() {
  auto s = take(u16());
  return std::string(s.begin(), s.end());
}

std::pair<std::string, Bytes> ByteReader::field() {
  auto label = take(u8());
  std::string name(label.begin(), label.end());
  return {std::move(name), blob()};
}

void ByteReader::expect_done() const {
  if (!done()) throw DecodeError("trailing bytes");
}

}  // namespace umlab
