#include "umlab/primitives/entropy.hpp"

#include <set>

#include "umlab/primitives/error.hpp"
#include "umlab/primitives/hash.hpp"

namespace umlab {

Bytes EntropyValue::bytes() const {
  const unsigned n = (bits + 7) / 8;
  Bytes out(n);
  for (unsigned i = 0; i < n; ++i) out[n - 1 - i] = static_cast<std::uint8_t>(value >> (8 * i));
  return out;
}

std::string EntropyValue::hex() const { return to_hex(bytes()); }

void require_entropy_bits(unsigned n_e) {
  if (n_e < kMinEntropyBits || n_e > kMaxEntropyBits)
    throw ConfigError("n_e must be within 4..64, got " + std::to_string(n_e));
}

Bytes entropy_input(const std::optional<PartyId>& receiver, const std::vector<LabeledElement>& elements) {
  ByteWriter w;
  if (receiver) w.field(kReceiverLabel, receiver->bytes());
  std::set<std::string_view> seen;
  for (const auto& e : elements) {
    if (e.label.empty() || e.label.size() > 255) throw ConfigError("entropy label must be 1..255 bytes");
    if (e.label == kReceiverLabel) throw ConfigError("entropy label 'receiver' is reserved");
    if (!seen.insert(e.label).second) throw ConfigError("duplicate entropy label '" + e.label + "'");
    w.field(e.label, e.value);
  }
  return w.take();
}

EntropyValue entropy(const std::optional<PartyId>& receiver, const std::vector<LabeledElement>& elements,
                     unsigned n_e) {
  require_entropy_bits(n_e);
  Digest d = tagged_hash(tags::kEntropy, {view(entropy_input(receiver, elements))});
  std::uint64_t top = 0;
  for (int i = 0; i < 8; ++i) top = (top << 8) | d[i];
  return EntropyValue{n_e == 64 ? top : top >> (64 - n_e), n_e};
}

}  // namespace umlab
