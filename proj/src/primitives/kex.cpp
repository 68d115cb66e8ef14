#include "umlab/primitives/kex.hpp"

#include "umlab/primitives/error.hpp"

namespace umlab {

SharedKey derive_key(const GroupParams& params, const GroupElement& e) {
  return SharedKey{tagged_hash(tags::kKdf, {view(params.encode(e))})};
}

KexKeyPair kex_keygen(const GroupParams& params, Rng& rng) {
  return kex_keypair_from_secret(params, params.random_exponent(rng));
}

KexKeyPair kex_keypair_from_secret(const GroupParams& params, const mpz_class& secret) {
  if (secret < 1) throw ConfigError("secret exponent must be positive");
  return KexKeyPair{secret, params.pow_g(secret)};
}

SharedKey kex_agree(const GroupParams& params, const KexKeyPair& own, const GroupElement& peer_public) {
  params.require_range(peer_public, "peer public element");
  return derive_key(params, params.pow(peer_public, own.secret));
}

}  // namespace umlab
