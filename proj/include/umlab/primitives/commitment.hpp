#pragma once

#include <array>
#include <optional>
#include <string>

#include "umlab/primitives/bytes.hpp"
#include "umlab/primitives/hash.hpp"
#include "umlab/primitives/rng.hpp"

namespace umlab {

inline constexpr std::size_t kMaxCommitMessage = std::size_t{1} << 16;
inline constexpr std::size_t kBlinderBytes = 32;

using Blinder = std::array<std::uint8_t, kBlinderBytes>;

/// c = H_com(tag || len(m) || m || r).
struct Commitment {
  Digest digest{};
  std::string tag{tags::kCommitment};

  friend bool operator==(const Commitment&, const Commitment&) = default;
};

struct Opening {
  Bytes message;
  Blinder blinder{};

  friend bool operator==(const Opening&, const Opening&) = default;
};

struct CommitResult {
  Commitment commitment;
  Opening opening;
};

/// Commits with a fresh 32-byte blinder drawn from rng. Throws SizeError for
/// messages longer than 2^16 bytes.
CommitResult commit(ByteView message, Rng& rng);

/// Deterministic form with a caller-chosen blinder. The KEM-commit instance
/// uses this with the blinder playing the role of its random string m.
CommitResult commit_with_blinder(ByteView message, const Blinder& blinder);

/// Returns the committed message, or nullopt (reject) when the opening does
/// not reproduce the digest. Rejection is a value, never an exception.
std::optional<Bytes> open(const Commitment& c, const Opening& d);

}  // namespace umlab
