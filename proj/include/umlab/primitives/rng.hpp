#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string_view>

#include "umlab/primitives/bytes.hpp"

namespace umlab {

/// Seeded, reproducible random source. Every consumer of randomness in the
/// lab takes one of these explicitly; there is no global generator.
///
/// Satisfies std::uniform_random_bit_generator.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  static constexpr result_type min() { return std::numeric_limits<result_type>::min(); }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return engine_(); }

  std::uint64_t seed() const { return seed_; }

  void fill(std::span<std::uint8_t> out);
  Bytes bytes(std::size_t n);

  template <std::size_t N>
  std::array<std::uint8_t, N> array() {
    std::array<std::uint8_t, N> out{};
    fill(out);
    return out;
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// Counter-mode seed derivation: SHA-256 over (base, index) truncated to 64
/// bits. Used for per-trial and per-session streams.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);
std::uint64_t derive_seed(std::uint64_t base, std::string_view label, ByteView extra = {});

}  // namespace umlab
