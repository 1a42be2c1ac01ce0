#pragma once

#include <cmath>
#include <optional>
#include <utility>

#include "dynamiqs/ibe/fft.hpp"
#include "dynamiqs/ring/integer_poly.hpp"

namespace dynamiqs::ibe {

using ring::BigInt;
using ring::IntegerPolynomial;

struct NtruCompletion {
  IntegerPolynomial F;
  IntegerPolynomial G;
};

namespace detail {

inline std::size_t bit_size(const BigInt& v) {
  if (v.is_zero()) return 0;
  return boost::multiprecision::msb(boost::multiprecision::abs(v)) + 1;
}

inline std::size_t max_bit_size(const IntegerPolynomial& a, const IntegerPolynomial& b) {
  std::size_t s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s = std::max({s, bit_size(a[i]), bit_size(b[i])});
  return s;
}

// Top 53 bits of each coefficient after dropping `shift` low bits.
inline std::vector<double> scaled_down(const IntegerPolynomial& p, std::size_t shift) {
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    BigInt mag = boost::multiprecision::abs(p[i]) >> shift;
    const double d = mag.convert_to<double>();
    out[i] = p[i] < 0 ? -d : d;
  }
  return out;
}

// Extended Euclid: returns (d, u, v) with u*a + v*b = d = gcd(a, b).
inline std::tuple<BigInt, BigInt, BigInt> xgcd(BigInt a, BigInt b) {
  BigInt x0 = 1, y0 = 0, x1 = 0, y1 = 1;
  while (!b.is_zero()) {
    BigInt qt = a / b;
    BigInt t = a - qt * b;
    a = b;
    b = t;
    t = x0 - qt * x1;
    x0 = x1;
    x1 = t;
    t = y0 - qt * y1;
    y0 = y1;
    y1 = t;
  }
  if (a < 0) return {-a, -x0, -y0};
  return {a, x0, y0};
}

// Babai-style size reduction of (F, G) against (f, g): repeatedly subtract
// round((F f* + G g*) / (f f* + g g*)) * (f, g), working on 53-bit
// approximations of the leading bits.
inline void reduce(const IntegerPolynomial& f, const IntegerPolynomial& g, IntegerPolynomial& F, IntegerPolynomial& G) {
  const std::size_t n = f.size();
  const std::size_t size = std::max<std::size_t>(53, max_bit_size(f, g));
  const auto fa = fft::forward(scaled_down(f, size - 53));
  const auto ga = fft::forward(scaled_down(g, size - 53));
  fft::Spectrum den(n);
  for (std::size_t k = 0; k < n; ++k) den[k] = std::norm(fa[k]) + std::norm(ga[k]);

  for (;;) {
    const std::size_t big = std::max<std::size_t>(53, max_bit_size(F, G));
    if (big < size) break;
    const auto Fa = fft::forward(scaled_down(F, big - 53));
    const auto Ga = fft::forward(scaled_down(G, big - 53));
    fft::Spectrum num(n);
    for (std::size_t k = 0; k < n; ++k) num[k] = (Fa[k] * std::conj(fa[k]) + Ga[k] * std::conj(ga[k])) / den[k];
    const auto kr = fft::inverse(std::move(num));
    IntegerPolynomial kp(n);
    bool all_zero = true;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = std::round(kr[i]);
      if (r != 0) all_zero = false;
      kp[i] = BigInt(static_cast<long long>(r));
    }
    if (all_zero) break;
    const auto fk = f * kp;
    const auto gk = g * kp;
    const std::size_t shift = big - size;
    for (std::size_t i = 0; i < n; ++i) {
      F[i] -= fk[i] << shift;
      G[i] -= gk[i] << shift;
    }
  }
}

inline std::optional<NtruCompletion> solve(const IntegerPolynomial& f, const IntegerPolynomial& g, const BigInt& q) {
  const std::size_t n = f.size();
  if (n == 1) {
    auto [d, u, v] = xgcd(f[0], g[0]);
    if (d != 1) return std::nullopt;
    return NtruCompletion{IntegerPolynomial::constant(1, -q * v), IntegerPolynomial::constant(1, q * u)};
  }
  auto sub = solve(f.field_norm(), g.field_norm(), q);
  if (!sub) return std::nullopt;
  IntegerPolynomial F = sub->F.lift() * g.galois_conjugate();
  IntegerPolynomial G = sub->G.lift() * f.galois_conjugate();
  reduce(f, g, F, G);
  return NtruCompletion{std::move(F), std::move(G)};
}

}  // namespace detail

// Finds short F, G with f*G - g*F = q in Z[x]/(x^N + 1) by descending through
// field norms to the integers and lifting back with size reduction. Returns
// nullopt when the resultants of f and g are not coprime.
inline std::optional<NtruCompletion> solve_ntru(const IntegerPolynomial& f, const IntegerPolynomial& g,
                                                std::uint64_t q) {
  auto sol = detail::solve(f, g, BigInt(q));
  if (!sol) return std::nullopt;
  if (f * sol->G - g * sol->F != IntegerPolynomial::constant(f.size(), BigInt(q))) return std::nullopt;
  return sol;
}

}  // namespace dynamiqs::ibe
