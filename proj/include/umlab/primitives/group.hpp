#pragma once

#include <gmpxx.h>

#include <memory>
#include <string>
#include <string_view>

#include "umlab/primitives/bytes.hpp"
#include "umlab/primitives/rng.hpp"

namespace umlab {

/// An element of Z_p^*. Strong type so exponents and elements do not mix.
struct GroupElement {
  mpz_class value;

  friend bool operator==(const GroupElement& a, const GroupElement& b) { return a.value == b.value; }
};

/// Multiplicative group parameters (p, g, q): g generates a subgroup of
/// order q in Z_p^*.
class GroupParams {
 public:
  /// Validates p prime, 1 < g < p, q | p-1 and g^q = 1 (mod p).
  /// Throws ConfigError otherwise.
  static GroupParams make(mpz_class p, mpz_class g, mpz_class q, std::string name = "custom");

  /// 256-bit safe-prime group (p = 2q + 1, g = 4) for fast attack loops.
  static std::shared_ptr<const GroupParams> toy256();
  /// 2048-bit MODP safe-prime group (RFC 3526 group 14, g = 2).
  static std::shared_ptr<const GroupParams> modp2048();
  /// "toy256" or "modp2048"; throws ConfigError for anything else.
  static std::shared_ptr<const GroupParams> by_name(std::string_view name);

  const mpz_class& p() const { return p_; }
  const mpz_class& g() const { return g_; }
  const mpz_class& q() const { return q_; }
  const std::string& name() const { return name_; }
  bool prime_order() const;

  /// Fixed byte length of an encoded element (byte length of p).
  std::size_t element_bytes() const { return element_bytes_; }

  GroupElement generator() const { return {g_}; }
  GroupElement pow_g(const mpz_class& exponent) const;
  GroupElement pow(const GroupElement& base, const mpz_class& exponent) const;
  GroupElement mul(const GroupElement& a, const GroupElement& b) const;
  GroupElement inverse(const GroupElement& a) const;

  bool in_range(const GroupElement& e) const { return e.value >= 1 && e.value < p_; }
  bool in_subgroup(const GroupElement& e) const;

  /// Throws MalformedError unless 1 <= e < p.
  void require_range(const GroupElement& e, std::string_view what) const;
  /// Throws MalformedError unless e is in the order-q subgroup.
  void require_subgroup(const GroupElement& e, std::string_view what) const;

  /// Minimal big-endian bytes, left-padded to element_bytes().
  Bytes encode(const GroupElement& e) const;
  /// Inverse of encode; throws MalformedError on wrong length or range.
  GroupElement decode(ByteView bytes) const;

  /// Uniform exponent in [1, q-1].
  mpz_class random_exponent(Rng& rng) const;
  /// Hash-derived exponent in [1, q-1] (counter-mode expansion of the input).
  mpz_class hash_to_exponent(std::string_view tag, ByteView input) const;
  /// Uniform element of the generated subgroup.
  GroupElement random_element(Rng& rng) const { return pow_g(random_exponent(rng)); }

  /// Canonical description: name, then p, g, q as length-prefixed blobs.
  Bytes serialize() const;
  static GroupParams deserialize(ByteView bytes);

 private:
  GroupParams(mpz_class p, mpz_class g, mpz_class q, std::string name);

  mpz_class p_, g_, q_;
  std::string name_;
  std::size_t element_bytes_ = 0;
};

Bytes mpz_to_bytes(const mpz_class& v, std::size_t width = 0);
mpz_class mpz_from_bytes(ByteView bytes);

}  // namespace umlab
