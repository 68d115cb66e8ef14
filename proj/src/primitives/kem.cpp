#include "umlab/primitives/kem.hpp"

#include "umlab/primitives/error.hpp"

namespace umlab {

std::string_view to_string(KemMode mode) { return mode == KemMode::Deterministic ? "det" : "prob"; }

KemMode parse_kem_mode(std::string_view text) {
  if (text == "det" || text == "deterministic") return KemMode::Deterministic;
  if (text == "prob" || text == "probabilistic") return KemMode::Probabilistic;
  throw ConfigError("unknown KEM mode '" + std::string(text) + "' (expected det or prob)");
}

Bytes encode_encapsulation(const GroupParams& params, const Encapsulation& ct) {
  Bytes out = params.encode(ct.c1);
  Bytes c2 = params.encode(ct.c2);
  out.insert(out.end(), c2.begin(), c2.end());
  return out;
}

Encapsulation decode_encapsulation(const GroupParams& params, ByteView bytes) {
  const std::size_t n = params.element_bytes();
  if (bytes.size() != 2 * n) throw MalformedError("encapsulation has wrong encoded length");
  return Encapsulation{params.decode(bytes.first(n)), params.decode(bytes.subspan(n))};
}

KemKeyPair kem_keygen(const GroupParams& params, Rng& rng) {
  mpz_class sk = params.random_exponent(rng);
  return KemKeyPair{sk, params.pow_g(sk)};
}

EncapsResult kem_encaps(const GroupParams& params, const GroupElement& pk, KemMode mode, Rng& rng) {
  GroupElement x = params.random_element(rng);
  return kem_encaps_star(params, pk, x, mode, rng);
}

EncapsResult kem_encaps_star(const GroupParams& params, const GroupElement& pk, const GroupElement& x,
                             KemMode mode, Rng& rng) {
  params.require_subgroup(pk, "KEM public key");
  params.require_range(x, "encapsulated secret");
  mpz_class r;
  if (mode == KemMode::Deterministic) {
    ByteWriter w;
    w.raw(params.encode(x)).raw(params.encode(pk));
    r = params.hash_to_exponent(tags::kDerandomize, w.bytes());
  } else {
    r = params.random_exponent(rng);
  }
  Encapsulation ct{params.pow_g(r), params.mul(x, params.pow(pk, r))};
  return EncapsResult{std::move(ct), derive_key(params, x), x};
}

DecapsResult kem_decaps_star(const GroupParams& params, const mpz_class& sk, const Encapsulation& ct) {
  params.require_subgroup(ct.c1, "encapsulation c1");
  params.require_range(ct.c2, "encapsulation c2");
  GroupElement shared = params.pow(ct.c1, sk);
  GroupElement x = params.mul(ct.c2, params.inverse(shared));
  SharedKey key = derive_key(params, x);
  return DecapsResult{std::move(x), key};
}

SharedKey kem_decaps(const GroupParams& params, const mpz_class& sk, const Encapsulation& ct) {
  return kem_decaps_star(params, sk, ct).key;
}

}  // namespace umlab
