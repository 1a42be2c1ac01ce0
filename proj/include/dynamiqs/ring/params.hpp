#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include "dynamiqs/errors.hpp"

namespace dynamiqs::ring {

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t q) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % q);
}

inline std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t q) {
  std::uint64_t result = 1 % q;
  base %= q;
  while (exp) {
    if (exp & 1) result = mul_mod(result, base, q);
    base = mul_mod(base, base, q);
    exp >>= 1;
  }
  return result;
}

// q must be prime.
inline std::uint64_t inv_mod(std::uint64_t a, std::uint64_t q) {
  if (a % q == 0) throw NotInvertible();
  return pow_mod(a, q - 2, q);
}

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

// Parameters of R = Z_q[x]/(x^N + 1) plus the two Gaussian widths used by key
// generation and extraction. Widths are standard deviations.
struct RingParams {
  std::uint32_t n = 0;
  std::uint64_t q = 0;
  double sigma_f = 0;
  double sigma_extract = 0;

  friend bool operator==(const RingParams&, const RingParams&) = default;

  void validate() const {
    if (n < 4 || (n & (n - 1)) != 0) throw InvalidParams("N must be a power of two >= 4");
    if (n > 0xffff) throw InvalidParams("N must fit 16 bits");
    if (q >= (1ull << 31)) throw InvalidParams("q must be below 2^31");
    if (!is_prime(q)) throw InvalidParams("q must be prime");
    if (q % (2ull * n) != 1) throw InvalidParams("q must be 1 mod 2N");
    if (!(sigma_f > 0) || !(sigma_extract > 0)) throw InvalidParams("Gaussian widths must be positive");
  }

  // Upper bound on the Euclidean norm of a centered (s1, s2) pair.
  double norm_bound() const { return 1.1 * sigma_extract * std::sqrt(2.0 * n); }

  // Bits per serialized coefficient, rounded up to whole bytes.
  std::size_t coeff_width() const {
    std::size_t bits = 0;
    for (auto v = q; v; v >>= 1) ++bits;
    return (bits + 7) / 8;
  }

  std::uint64_t half_q() const { return q / 2; }

  // Widths that follow the usual NTRU trapdoor sizing: ||(f, g)|| close to
  // 1.17 sqrt(q) and an extraction width above the smoothing threshold of the
  // resulting Gram-Schmidt basis.
  static RingParams with_default_widths(std::uint32_t n, std::uint64_t q) {
    RingParams p;
    p.n = n;
    p.q = q;
    p.sigma_f = 1.17 * std::sqrt(static_cast<double>(q) / (2.0 * n));
    p.sigma_extract = kExtractWidthFactor * std::sqrt(static_cast<double>(q));
    p.validate();
    return p;
  }

  static RingParams toy() { return with_default_widths(16, 97); }
  static RingParams test() { return with_default_widths(64, 12289); }
  static RingParams standard() { return with_default_widths(512, 8380417); }

  static RingParams from_tier(std::string_view tier) {
    if (tier == "toy") return toy();
    if (tier == "test") return test();
    if (tier == "default") return standard();
    throw InvalidParams("unknown params tier: " + std::string(tier));
  }

  std::string tier_name() const {
    if (*this == toy()) return "toy";
    if (*this == test()) return "test";
    if (*this == standard()) return "default";
    return "custom";
  }

  static constexpr double kExtractWidthFactor = 1.55;
};

}  // namespace dynamiqs::ring
