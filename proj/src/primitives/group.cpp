#include "umlab/primitives/group.hpp"

#include "umlab/primitives/error.hpp"
#include "umlab/primitives/hash.hpp"

namespace umlab {

namespace {

constexpr const char* kToy256P = "ae4d79a39b82a91594305155c6d4d28e52db7e624151e484b9eb1d485453ccbb";
constexpr const char* kToy256Q = "5726bcd1cdc1548aca1828aae36a6947296dbf3120a8f2425cf58ea42a29e65d";

constexpr const char* kModp2048P =
    "ffffffffffffffffc90fdaa22168c234c4c6628b80dc1cd129024e088a67cc74020bbea63b139b22514a08798e3404dd"
    "ef9519b3cd3a431b302b0a6df25f14374fe1356d6d51c245e485b576625e7ec6f44c42e9a637ed6b0bff5cb6f406b7ed"
    "ee386bfb5a899fa5ae9f24117c4b1fe649286651ece45b3dc2007cb8a163bf0598da48361c55d39a69163fa8fd24cf5f"
    "83655d23dca3ad961c62f356208552bb9ed529077096966d670c354e4abc9804f1746c08ca18217c32905e462e36ce3b"
    "e39e772c180e86039b2783a2ec07a28fb5c55df06f4c52c9de2bcbf6955817183995497cea956ae515d2261898fa0510"
    "15728e5a8aacaa68ffffffffffffffff";

std::size_t byte_length(const mpz_class& v) { return (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8; }

}  // namespace

Bytes mpz_to_bytes(const mpz_class& v, std::size_t width) {
  if (v < 0) throw MalformedError("negative integer has no encoding");
  std::size_t len = v == 0 ? 0 : byte_length(v);
  if (width == 0) width = len;
  if (len > width) throw MalformedError("integer does not fit the encoding width");
  Bytes out(width, 0);
  if (len > 0) {
    std::size_t written = 0;
    mpz_export(out.data() + (width - len), &written, 1, 1, 1, 0, v.get_mpz_t());
  }
  return out;
}

mpz_class mpz_from_bytes(ByteView bytes) {
  mpz_class v;
  if (!bytes.empty()) mpz_import(v.get_mpz_t(), bytes.size(), 1, 1, 1, 0, bytes.data());
  return v;
}

GroupParams::GroupParams(mpz_class p, mpz_class g, mpz_class q, std::string name)
    : p_(std::move(p)), g_(std::move(g)), q_(std::move(q)), name_(std::move(name)) {
  element_bytes_ = byte_length(p_);
}

GroupParams GroupParams::make(mpz_class p, mpz_class g, mpz_class q, std::string name) {
  if (p < 5 || mpz_probab_prime_p(p.get_mpz_t(), 40) == 0) throw ConfigError("group modulus is not prime");
  if (g <= 1 || g >= p) throw ConfigError("generator out of range");
  if (q <= 1) throw ConfigError("group order must exceed 1");
  mpz_class pm1 = p - 1;
  if (mpz_divisible_p(pm1.get_mpz_t(), q.get_mpz_t()) == 0) throw ConfigError("order does not divide p-1");
  mpz_class check;
  mpz_powm(check.get_mpz_t(), g.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
  if (check != 1) throw ConfigError("generator order does not divide q");
  return GroupParams(std::move(p), std::move(g), std::move(q), std::move(name));
}

std::shared_ptr<const GroupParams> GroupParams::toy256() {
  static const auto params = std::make_shared<const GroupParams>(
      make(mpz_class(kToy256P, 16), mpz_class(4), mpz_class(kToy256Q, 16), "toy256"));
  return params;
}

std::shared_ptr<const GroupParams> GroupParams::modp2048() {
  static const auto params = [] {
    mpz_class p(kModp2048P, 16);
    mpz_class q = (p - 1) / 2;
    return std::make_shared<const GroupParams>(make(p, mpz_class(2), q, "modp2048"));
  }();
  return params;
}

std::shared_ptr<const GroupParams> GroupParams::by_name(std::string_view name) {
  if (name == "toy256") return toy256();
  if (name == "modp2048") return modp2048();
  throw ConfigError("unknown group '" + std::string(name) + "' (expected toy256 or modp2048)");
}

bool GroupParams::prime_order() const { return mpz_probab_prime_p(q_.get_mpz_t(), 40) != 0; }

GroupElement GroupParams::pow_g(const mpz_class& exponent) const { return pow(GroupElement{g_}, exponent); }

GroupElement GroupParams::pow(const GroupElement& base, const mpz_class& exponent) const {
  GroupElement out;
  mpz_powm(out.value.get_mpz_t(), base.value.get_mpz_t(), exponent.get_mpz_t(), p_.get_mpz_t());
  return out;
}

GroupElement GroupParams::mul(const GroupElement& a, const GroupElement& b) const {
  GroupElement out{a.value * b.value};
  mpz_mod(out.value.get_mpz_t(), out.value.get_mpz_t(), p_.get_mpz_t());
  return out;
}

GroupElement GroupParams::inverse(const GroupElement& a) const {
  GroupElement out;
  if (mpz_invert(out.value.get_mpz_t(), a.value.get_mpz_t(), p_.get_mpz_t()) == 0) {
    throw MalformedError("element has no inverse");
  }
  return out;
}

bool GroupParams::in_subgroup(const GroupElement& e) const {
  return in_range(e) && pow(e, q_).value == 1;
}

void GroupParams::require_range(const GroupElement& e, std::string_view what) const {
  if (!in_range(e)) throw MalformedError(std::string(what) + ": element outside [1, p-1]");
}

void GroupParams::require_subgroup(const GroupElement& e, std::string_view what) const {
  require_range(e, what);
  if (pow(e, q_).value != 1) throw MalformedError(std::string(what) + ": element outside the order-q subgroup");
}

Bytes GroupParams::encode(const GroupElement& e) const {
  require_range(e, "encode");
  return mpz_to_bytes(e.value, element_bytes_);
}

GroupElement GroupParams::decode(ByteView bytes) const {
  if (bytes.size() != element_bytes_) throw MalformedError("group element has wrong encoded length");
  GroupElement e{mpz_from_bytes(bytes)};
  require_range(e, "decode");
  return e;
}

mpz_class GroupParams::random_exponent(Rng& rng) const {
  // 64 surplus bits keep the modular bias below 2^-64.
  const std::size_t n = byte_length(q_) + 8;
  Bytes buf = rng.bytes(n);
  mpz_class v = mpz_from_bytes(buf);
  mpz_class range = q_ - 1;
  mpz_mod(v.get_mpz_t(), v.get_mpz_t(), range.get_mpz_t());
  return v + 1;
}

mpz_class GroupParams::hash_to_exponent(std::string_view tag, ByteView input) const {
  const std::size_t n = byte_length(q_) + 8;
  Bytes buf;
  for (std::uint32_t counter = 0; buf.size() < n; ++counter) {
    TaggedHash h(tag);
    h.update_u32(counter).update(input);
    auto d = h.finish();
    buf.insert(buf.end(), d.begin(), d.end());
  }
  buf.resize(n);
  mpz_class v = mpz_from_bytes(buf);
  mpz_class range = q_ - 1;
  mpz_mod(v.get_mpz_t(), v.get_mpz_t(), range.get_mpz_t());
  return v + 1;
}

Bytes GroupParams::serialize() const {
  ByteWriter w;
  w.str(name_);
  w.blob(mpz_to_bytes(p_)).blob(mpz_to_bytes(g_)).blob(mpz_to_bytes(q_));
  return w.take();
}

GroupParams GroupParams::deserialize(ByteView bytes) {
  ByteReader r(bytes);
  std::string name = r.str();
  mpz_class p = mpz_from_bytes(r.blob());
  mpz_class g = mpz_from_bytes(r.blob());
  mpz_class q = mpz_from_bytes(r.blob());
  r.expect_done();
  return make(std::move(p), std::move(g), std::move(q), std::move(name));
}

}  // namespace umlab
