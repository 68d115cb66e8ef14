#include "umlab/primitives/commitment.hpp"

#include "umlab/primitives/error.hpp"

namespace umlab {

namespace {
Digest commitment_digest(std::string_view tag, ByteView message, const Blinder& blinder) {
  TaggedHash h(tag);
  h.update_u32(static_cast<std::uint32_t>(message.size())).update(message).update(blinder);
  return h.finish();
}
}  // namespace

CommitResult commit_with_blinder(ByteView message, const Blinder& blinder) {
  if (message.size() > kMaxCommitMessage) throw SizeError("commitment message exceeds 2^16 bytes");
  CommitResult out;
  out.commitment.digest = commitment_digest(out.commitment.tag, message, blinder);
  out.opening.message.assign(message.begin(), message.end());
  out.opening.blinder = blinder;
  return out;
}

CommitResult commit(ByteView message, Rng& rng) {
  if (message.size() > kMaxCommitMessage) throw SizeError("commitment message exceeds 2^16 bytes");
  return commit_with_blinder(message, rng.array<kBlinderBytes>());
}

std::optional<Bytes> open(const Commitment& c, const Opening& d) {
  if (d.message.size() > kMaxCommitMessage) return std::nullopt;
  if (commitment_digest(c.tag, d.message, d.blinder) != c.digest) return std::nullopt;
  return d.message;
}

}  // namespace umlab
