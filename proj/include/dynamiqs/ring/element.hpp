#pragma once

#include <cstdint>
#include <vector>

#include "dynamiqs/bytes.hpp"
#include "dynamiqs/ring/ntt.hpp"
#include "dynamiqs/ring/params.hpp"

namespace dynamiqs::ring {

// Element of Z_q[x]/(x^N + 1); coefficients are kept canonical in [0, q).
class RingElement {
 public:
  RingElement() = default;

  explicit RingElement(const RingParams& params) : params_(params), coeffs_(params.n, 0) {}

  RingElement(const RingParams& params, std::vector<std::uint64_t> coeffs)
      : params_(params), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != params_.n) throw LengthError("ring element needs exactly N coefficients");
    for (auto& c : coeffs_) c %= params_.q;
  }

  // Reduces signed values (e.g. short Gaussian samples) into [0, q).
  static RingElement from_signed(const RingParams& params, const std::vector<std::int64_t>& values) {
    if (values.size() != params.n) throw LengthError("ring element needs exactly N coefficients");
    std::vector<std::uint64_t> c(params.n);
    const auto q = static_cast<std::int64_t>(params.q);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = static_cast<std::uint64_t>(((values[i] % q) + q) % q);
    return RingElement(params, std::move(c));
  }

  static RingElement zero(const RingParams& params) { return RingElement(params); }

  static RingElement constant(const RingParams& params, std::uint64_t c) {
    RingElement r(params);
    r.coeffs_[0] = c % params.q;
    return r;
  }

  static RingElement one(const RingParams& params) { return constant(params, 1); }

  // x^k, with the negacyclic sign folded in for k >= N.
  static RingElement monomial(const RingParams& params, std::uint32_t k) {
    RingElement r(params);
    const std::uint32_t idx = k % params.n;
    const bool negate = (k / params.n) % 2 == 1;
    r.coeffs_[idx] = negate ? params.q - 1 : 1;
    return r;
  }

  const RingParams& params() const { return params_; }
  std::uint32_t size() const { return params_.n; }
  const std::vector<std::uint64_t>& coeffs() const { return coeffs_; }
  std::uint64_t operator[](std::size_t i) const { return coeffs_[i]; }

  // Representative in (-q/2, q/2].
  std::int64_t centered(std::size_t i) const {
    const auto c = static_cast<std::int64_t>(coeffs_[i]);
    const auto q = static_cast<std::int64_t>(params_.q);
    return c > q / 2 ? c - q : c;
  }

  std::vector<std::int64_t> centered() const {
    std::vector<std::int64_t> out(coeffs_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = centered(i);
    return out;
  }

  double centered_norm_sq() const {
    double acc = 0;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      const double c = static_cast<double>(centered(i));
      acc += c * c;
    }
    return acc;
  }

  bool is_zero() const {
    for (auto c : coeffs_)
      if (c) return false;
    return true;
  }

  friend bool operator==(const RingElement& a, const RingElement& b) {
    return a.params_ == b.params_ && a.coeffs_ == b.coeffs_;
  }

 private:
  friend RingElement operator+(const RingElement&, const RingElement&);
  friend RingElement operator-(const RingElement&, const RingElement&);
  friend RingElement operator-(const RingElement&);

  RingParams params_;
  std::vector<std::uint64_t> coeffs_;
};

inline void check_same(const RingElement& a, const RingElement& b) {
  if (!(a.params() == b.params())) throw ParamsMismatch();
}

inline RingElement operator+(const RingElement& a, const RingElement& b) {
  check_same(a, b);
  RingElement r(a.params_);
  const auto q = a.params_.q;
  for (std::size_t i = 0; i < r.coeffs_.size(); ++i) {
    auto s = a.coeffs_[i] + b.coeffs_[i];
    r.coeffs_[i] = s >= q ? s - q : s;
  }
  return r;
}

inline RingElement operator-(const RingElement& a) {
  RingElement r(a.params_);
  const auto q = a.params_.q;
  for (std::size_t i = 0; i < r.coeffs_.size(); ++i) r.coeffs_[i] = a.coeffs_[i] ? q - a.coeffs_[i] : 0;
  return r;
}

inline RingElement operator-(const RingElement& a, const RingElement& b) { return a + (-b); }

inline RingElement ring_add(const RingElement& a, const RingElement& b) { return a + b; }

inline RingElement scale(const RingElement& a, std::uint64_t k) {
  std::vector<std::uint64_t> c(a.coeffs());
  for (auto& v : c) v = mul_mod(v, k, a.params().q);
  return RingElement(a.params(), std::move(c));
}


inline std::vector<std::uint64_t> to_ntt(const RingElement& a) {
  auto v = a.coeffs();
  NegacyclicNtt::get(a.params().n, a.params().q)->forward(v);
  return v;
}

inline RingElement from_ntt(const RingParams& p, std::vector<std::uint64_t> v) {
  NegacyclicNtt::get(p.n, p.q)->inverse(v);
  return RingElement(p, std::move(v));
}

inline RingElement ring_mul(const RingElement& a, const RingElement& b) {
  check_same(a, b);
  auto fa = to_ntt(a);
  auto fb = to_ntt(b);
  const auto q = a.params().q;
  for (std::size_t i = 0; i < fa.size(); ++i) fa[i] = mul_mod(fa[i], fb[i], q);
  return from_ntt(a.params(), std::move(fa));
}

inline RingElement operator*(const RingElement& a, const RingElement& b) { return ring_mul(a, b); }

// x^N + 1 splits into distinct linear factors mod q, so a is a unit exactly
// when none of its NTT evaluations vanish.
inline bool is_invertible(const RingElement& a) {
  for (auto v : to_ntt(a))
    if (v == 0) return false;
  return true;
}

inline RingElement ring_inverse(const RingElement& a) {
  auto fa = to_ntt(a);
  const auto q = a.params().q;
  for (auto& v : fa) {
    if (v == 0) throw NotInvertible();
    v = inv_mod(v, q);
  }
  return from_ntt(a.params(), std::move(fa));
}

// Serialized form: N (u16 LE), q (u64 LE), then N coefficients of
// coeff_width() bytes each, little-endian.
inline void write_element(ByteWriter& w, const RingElement& a) {
  const auto& p = a.params();
  w.u16(static_cast<std::uint16_t>(p.n));
  w.u64(p.q);
  const auto width = p.coeff_width();
  for (auto c : a.coeffs()) w.uint_le(c, width);
}

// `params` supplies the Gaussian widths; N and q are checked against the
// header.
inline RingElement read_element(ByteReader& r, const RingParams& params) {
  const auto n = r.u16();
  const auto q = r.u64();
  if (n != params.n || q != params.q) throw ParamsMismatch();
  const auto width = params.coeff_width();
  std::vector<std::uint64_t> c(n);
  for (auto& v : c) {
    v = r.uint_le(width);
    if (v >= q) throw FormatError("coefficient out of range");
  }
  return RingElement(params, std::move(c));
}

inline Bytes serialize(const RingElement& a) {
  ByteWriter w;
  write_element(w, a);
  return std::move(w).take();
}

inline RingElement deserialize_element(ByteView data, const RingParams& params) {
  ByteReader r(data);
  auto e = read_element(r, params);
  r.expect_done();
  return e;
}

}  // namespace dynamiqs::ring
