#pragma once

#include "umlab/primitives/group.hpp"
#include "umlab/primitives/hash.hpp"

namespace umlab {

/// 32-byte session key, H_key over a canonical group-element encoding.
struct SharedKey {
  Digest bytes{};

  friend bool operator==(const SharedKey&, const SharedKey&) = default;
};

/// H_key(encode(e)) under the "KDF/v1" tag.
SharedKey derive_key(const GroupParams& params, const GroupElement& e);

struct KexKeyPair {
  mpz_class secret;
  GroupElement public_element;
};

/// Secret uniform in [1, q-1]; public = g^secret mod p.
KexKeyPair kex_keygen(const GroupParams& params, Rng& rng);
KexKeyPair kex_keypair_from_secret(const GroupParams& params, const mpz_class& secret);

/// H_key(peer^secret). Throws MalformedError when the peer element is 0 or >= p.
SharedKey kex_agree(const GroupParams& params, const KexKeyPair& own, const GroupElement& peer_public);

}  // namespace umlab
