#pragma once

#include "umlab/primitives/kem.hpp"

namespace umlab {

inline constexpr std::size_t kMaxPkePlaintext = std::size_t{1} << 16;

/// Hybrid encryption: a fresh probabilistic KEM encapsulation, then a
/// SHA-256 counter-mode stream keyed by K XORed over the plaintext.
///
/// Layout: encode(c1) || encode(c2) || u32 len || body.
Bytes pke_encrypt(const GroupParams& params, const GroupElement& pk, ByteView plaintext, Rng& rng);

/// Throws DecodeError on truncated input, MalformedError on bad elements.
/// A wrong key yields garbage, not an error.
Bytes pke_decrypt(const GroupParams& params, const mpz_class& sk, ByteView ciphertext);

}  // namespace umlab
