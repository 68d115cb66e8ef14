#pragma once
// Reference arithmetic and statistics written without the library, used to
// derive expected values in tests.

#include <cmath>
#include <cstdint>

namespace oracle {

inline std::uint64_t modexp(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) {
  unsigned __int128 result = 1, b = base % mod;
  while (exp) {
    if (exp & 1) result = result * b % mod;
    b = b * b % mod;
    exp >>= 1;
  }
  return static_cast<std::uint64_t>(result);
}

inline std::uint64_t modinv_prime(std::uint64_t a, std::uint64_t p) { return modexp(a, p - 2, p); }

// Wilson bounds as the two roots of (phat - p)^2 = z^2 p (1 - p) / n, found
// by bisection instead of the closed form.
inline double wilson_root(std::uint64_t k, std::uint64_t n, bool upper) {
  const double z = 1.959963984540054;
  const double phat = static_cast<double>(k) / static_cast<double>(n);
  auto f = [&](double p) { return (phat - p) * (phat - p) - z * z * p * (1 - p) / static_cast<double>(n); };
  double lo = upper ? phat : 0.0, hi = upper ? 1.0 : phat;
  if (upper && f(1.0) < 0) return 1.0;
  if (!upper && f(0.0) < 0) return 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = (lo + hi) / 2;
    const bool inside = f(mid) <= 0;
    if (upper == inside) lo = mid; else hi = mid;
  }
  return (lo + hi) / 2;
}

inline double binomial_sigma(double p, double n) { return std::sqrt(p * (1 - p) / n); }

// Mean of the geometric law on {1, 2, ...} with success probability p.
inline double geometric_mean(double p) { return 1.0 / p; }

}  // namespace oracle
