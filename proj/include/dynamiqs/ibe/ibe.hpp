#pragma once

#include <cmath>
#include <vector>

#include "dynamiqs/ibe/keys.hpp"
#include "dynamiqs/ring/gaussian.hpp"

namespace dynamiqs::ibe {

using BitString = std::vector<std::uint8_t>;  // one 0/1 value per entry

enum class PayloadKind : std::uint8_t { KeyEncapsulation = 1, RawBits = 2 };

struct IbeCiphertext {
  RingElement u;
  RingElement v;
  PayloadKind kind = PayloadKind::RawBits;

  friend bool operator==(const IbeCiphertext&, const IbeCiphertext&) = default;
};

inline constexpr int kMaxKeygenAttempts = 2000;
inline constexpr int kMaxSamplerAttempts = 64;

namespace detail {

// max(||(g, -f)||, ||(q f*/(ff* + gg*), q g*/(ff* + gg*))||), the Gram-Schmidt
// norm of the NTRU basis, from FFT evaluations.
inline double gs_norm_estimate(const IntegerPolynomial& f, const IntegerPolynomial& g, std::uint64_t q) {
  const auto n = static_cast<double>(f.size());
  const double first = std::sqrt(f.norm_sq() + g.norm_sq());
  const auto fa = fft::forward(f), ga = fft::forward(g);
  double acc = 0;
  for (std::size_t k = 0; k < fa.size(); ++k) acc += 1.0 / (std::norm(fa[k]) + std::norm(ga[k]));
  const double second = static_cast<double>(q) * std::sqrt(acc / n);
  return std::max(first, second);
}

}  // namespace detail

// Samples short f, g, completes them with F, G and publishes h = g / f mod q.
inline MasterKeyPair master_key_gen(const RingParams& params, SeededRandomSource& rng) {
  params.validate();
  const double bound = gs_bound(params);
  for (int attempt = 0; attempt < kMaxKeygenAttempts; ++attempt) {
    auto f = ring::sample_gaussian_poly(params, params.sigma_f, rng);
    auto g = ring::sample_gaussian_poly(params, params.sigma_f, rng);
    const auto f_mod = f.reduce(params);
    if (!ring::is_invertible(f_mod)) continue;
    if (detail::gs_norm_estimate(f, g, params.q) > bound) continue;
    auto sol = solve_ntru(f, g, params.q);
    if (!sol || !sol->F.fits_int64() || !sol->G.fits_int64()) continue;
    MasterSecretKey sk(params, std::move(f), std::move(g), std::move(sol->F), std::move(sol->G));
    if (sk.sampler().max_gs_norm() > bound) continue;
    MasterPublicKey pk{params, sk.g().reduce(params) * ring::ring_inverse(f_mod)};
    return {std::move(sk), std::move(pk)};
  }
  throw ResampleExhausted("no usable master key after " + std::to_string(kMaxKeygenAttempts) + " attempts");
}

inline bool within_norm_bound(const RingElement& s1, const RingElement& s2) {
  const double bound = s1.params().norm_bound();
  return s1.centered_norm_sq() + s2.centered_norm_sq() <= bound * bound;
}

// Short (s1, s2) with s1 + s2*h = t, via Gaussian sampling of a lattice
// point near (t, 0).
inline std::pair<RingElement, RingElement> sample_preimage(const MasterSecretKey& msk, const RingElement& t,
                                                           SeededRandomSource& rng) {
  const auto& p = msk.params();
  const auto& sampler = msk.sampler();
  std::vector<double> target(2 * p.n, 0.0);
  for (std::uint32_t i = 0; i < p.n; ++i) target[i] = static_cast<double>(t[i]);
  for (int attempt = 0; attempt < kMaxSamplerAttempts; ++attempt) {
    const auto v = sampler.sample_near(target, rng);
    std::vector<std::int64_t> s1(p.n), s2(p.n);
    for (std::uint32_t i = 0; i < p.n; ++i) {
      s1[i] = static_cast<std::int64_t>(t[i]) - v[i];
      s2[i] = -v[p.n + i];
    }
    auto r1 = RingElement::from_signed(p, s1);
    auto r2 = RingElement::from_signed(p, s2);
    if (within_norm_bound(r1, r2)) return {std::move(r1), std::move(r2)};
  }
  throw SamplerFailure("norm bound not met after " + std::to_string(kMaxSamplerAttempts) + " samples");
}

// Extraction is deterministic per (master key, identity) and cached.
inline UserSecretKey extract(const MasterSecretKey& msk, ByteView identity) {
  auto t = ring::identity_digest(identity, msk.params());
  const Bytes digest = ring::serialize(t);
  if (auto hit = msk.cached(digest)) return *hit;
  auto rng = SeededRandomSource(msk.fingerprint()).derive(digest);
  auto [s1, s2] = sample_preimage(msk, t, rng);
  return msk.remember(digest, UserSecretKey{std::move(t), std::move(s1), std::move(s2)});
}

inline UserSecretKey extract(const MasterSecretKey& msk, std::string_view identity) {
  return extract(msk, as_view(identity));
}

inline IbeCiphertext encrypt(const MasterPublicKey& mpk, ByteView identity, const BitString& message,
                             SeededRandomSource& rng, PayloadKind kind = PayloadKind::RawBits) {
  const auto& p = mpk.params;
  if (message.size() != p.n) throw LengthError("message must have exactly N bits");
  const auto t = ring::identity_digest(identity, p);
  const auto r = ring::sample_ternary(p, rng);
  const auto e1 = ring::sample_ternary(p, rng);
  const auto e2 = ring::sample_ternary(p, rng);
  std::vector<std::uint64_t> m(p.n);
  for (std::size_t i = 0; i < p.n; ++i) m[i] = message[i] ? p.half_q() : 0;
  return {r * mpk.h + e1, r * t + e2 + RingElement(p, std::move(m)), kind};
}

inline IbeCiphertext encrypt(const MasterPublicKey& mpk, std::string_view identity, const BitString& message,
                             SeededRandomSource& rng) {
  return encrypt(mpk, as_view(identity), message, rng);
}

// w = v - u*s2 = r*s1 + e2 - e1*s2 + floor(q/2)*m; bit i is set when w_i lies
// within q/4 of floor(q/2).
inline BitString decrypt(const UserSecretKey& usk, const IbeCiphertext& ct) {
  const auto w = ct.v - ct.u * usk.s2;
  const auto& p = w.params();
  const auto half = static_cast<std::int64_t>(p.half_q());
  const auto quarter = static_cast<double>(p.q) / 4.0;
  BitString out(p.n);
  for (std::size_t i = 0; i < p.n; ++i)
    out[i] = std::abs(static_cast<std::int64_t>(w[i]) - half) < quarter ? 1 : 0;
  return out;
}

inline RingElement signature_digest(const RingParams& p, const Block32& salt, ByteView message) {
  return ring::hash_to_ring(concat({as_view(ring::kSignatureTag), salt, message}), p);
}

inline Signature sign(const MasterSecretKey& msk, ByteView message, SeededRandomSource& rng) {
  Signature sig;
  sig.salt = rng.block32();
  auto t = signature_digest(msk.params(), sig.salt, message);
  std::tie(sig.s1, sig.s2) = sample_preimage(msk, t, rng);
  return sig;
}

inline bool verify(const MasterPublicKey& mpk, ByteView message, const Signature& sig) {
  const auto& p = mpk.params;
  if (!(sig.s1.params() == p) || !(sig.s2.params() == p)) return false;
  if (!within_norm_bound(sig.s1, sig.s2)) return false;
  return sig.s1 + sig.s2 * mpk.h == signature_digest(p, sig.salt, message);
}

// Extract-equation check for issued keys.
inline bool key_matches(const MasterPublicKey& mpk, const UserSecretKey& usk) {
  return usk.s1 + usk.s2 * mpk.h == usk.id_digest && within_norm_bound(usk.s1, usk.s2);
}

}  // namespace dynamiqs::ibe
