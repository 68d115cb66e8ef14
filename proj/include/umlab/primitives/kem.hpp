#pragma once

#include <string_view>

#include "umlab/primitives/kex.hpp"

namespace umlab {

/// Probabilistic: fresh encapsulation randomness r per call.
/// Deterministic: r = H_r(x || pk) under the "FO/v1" tag.
enum class KemMode { Probabilistic, Deterministic };

std::string_view to_string(KemMode mode);
KemMode parse_kem_mode(std::string_view text);  // "prob" | "det"

struct KemKeyPair {
  mpz_class secret;
  GroupElement public_key;
};

/// ElGamal-style encapsulation (g^r, x * pk^r).
struct Encapsulation {
  GroupElement c1;
  GroupElement c2;

  friend bool operator==(const Encapsulation&, const Encapsulation&) = default;
};

Bytes encode_encapsulation(const GroupParams& params, const Encapsulation& ct);
Encapsulation decode_encapsulation(const GroupParams& params, ByteView bytes);

struct EncapsResult {
  Encapsulation ct;
  SharedKey key;
  GroupElement secret;  // x; protocol-facing code must not forward it
};

struct DecapsResult {
  GroupElement secret;
  SharedKey key;
};

KemKeyPair kem_keygen(const GroupParams& params, Rng& rng);

/// Samples x uniformly from the subgroup, then encapsulates it.
EncapsResult kem_encaps(const GroupParams& params, const GroupElement& pk, KemMode mode, Rng& rng);

/// Encaps*: encapsulates the caller's x. rng is only drawn from in
/// Probabilistic mode. Throws MalformedError for x or pk out of range.
EncapsResult kem_encaps_star(const GroupParams& params, const GroupElement& pk, const GroupElement& x,
                             KemMode mode, Rng& rng);

/// Decaps*: x = c2 * (c1^sk)^-1, K = H_key(x). A tampered c2 yields a
/// different x without error.
DecapsResult kem_decaps_star(const GroupParams& params, const mpz_class& sk, const Encapsulation& ct);
SharedKey kem_decaps(const GroupParams& params, const mpz_class& sk, const Encapsulation& ct);

}  // namespace umlab
