#include "umlab/primitives/rng.hpp"

#include "umlab/primitives/hash.hpp"

namespace umlab {

void Rng::fill(std::span<std::uint8_t> out) {
  std::size_t i = 0;
  while (i < out.size()) {
    std::uint64_t word = engine_();
    for (int k = 0; k < 8 && i < out.size(); ++k, ++i) {
      out[i] = static_cast<std::uint8_t>(word >> (56 - 8 * k));
    }
  }
}

Bytes Rng::bytes(std::size_t n) {
  Bytes out(n);
  fill(out);
  return out;
}

namespace {
std::uint64_t first_u64(const Digest& d) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | d[i];
  return v;
}
}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  TaggedHash h(tags::kSeed);
  h.update_u64(base).update_u64(index);
  return first_u64(h.finish());
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view label, ByteView extra) {
  TaggedHash h(tags::kSeed);
  h.update_u64(base);
  h.update_u32(static_cast<std::uint32_t>(label.size()));
  h.update({reinterpret_cast<const std::uint8_t*>(label.data()), label.size()});
  h.update(extra);
  return first_u64(h.finish());
}

}  // namespace umlab
