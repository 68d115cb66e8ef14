#include "umlab/primitives/pke.hpp"

#include "umlab/primitives/error.hpp"

namespace umlab {

namespace {

void xor_stream(const SharedKey& key, Bytes& body) {
  std::uint32_t counter = 0;
  for (std::size_t off = 0; off < body.size(); off += 32, ++counter) {
    TaggedHash h(tags::kPkeStream);
    h.update(view(key.bytes)).update_u32(counter);
    Digest block = h.finish();
    for (std::size_t i = 0; i < 32 && off + i < body.size(); ++i) body[off + i] ^= block[i];
  }
}

}  // namespace

Bytes pke_encrypt(const GroupParams& params, const GroupElement& pk, ByteView plaintext, Rng& rng) {
  if (plaintext.size() > kMaxPkePlaintext) throw SizeError("PKE plaintext longer than 2^16 bytes");
  EncapsResult enc = kem_encaps(params, pk, KemMode::Probabilistic, rng);
  Bytes body(plaintext.begin(), plaintext.end());
  xor_stream(enc.key, body);
  ByteWriter w;
  w.raw(encode_encapsulation(params, enc.ct)).blob(body);
  return w.take();
}

Bytes pke_decrypt(const GroupParams& params, const mpz_class& sk, ByteView ciphertext) {
  ByteReader r(ciphertext);
  Bytes head = r.raw(2 * params.element_bytes());
  Bytes body = r.blob();
  r.expect_done();
  Encapsulation ct = decode_encapsulation(params, head);
  xor_stream(kem_decaps(params, sk, ct), body);
  return body;
}

}  // namespace umlab
