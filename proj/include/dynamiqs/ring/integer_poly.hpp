#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <vector>

#include "dynamiqs/bytes.hpp"
#include "dynamiqs/ring/element.hpp"

namespace dynamiqs::ring {

using BigInt = boost::multiprecision::cpp_int;

// Polynomial in Z[x]/(x^N + 1) with unreduced arbitrary-precision
// coefficients.
class IntegerPolynomial {
 public:
  IntegerPolynomial() = default;
  explicit IntegerPolynomial(std::size_t n) : c_(n) {}
  explicit IntegerPolynomial(std::vector<BigInt> c) : c_(std::move(c)) {}

  static IntegerPolynomial from_signed(const std::vector<std::int64_t>& v) {
    std::vector<BigInt> c(v.begin(), v.end());
    return IntegerPolynomial(std::move(c));
  }

  static IntegerPolynomial constant(std::size_t n, const BigInt& v) {
    IntegerPolynomial p(n);
    p.c_[0] = v;
    return p;
  }

  std::size_t size() const { return c_.size(); }
  const BigInt& operator[](std::size_t i) const { return c_[i]; }
  BigInt& operator[](std::size_t i) { return c_[i]; }
  const std::vector<BigInt>& coeffs() const { return c_; }

  friend bool operator==(const IntegerPolynomial&, const IntegerPolynomial&) = default;

  friend IntegerPolynomial operator+(const IntegerPolynomial& a, const IntegerPolynomial& b) {
    check(a, b);
    IntegerPolynomial r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r.c_[i] = a.c_[i] + b.c_[i];
    return r;
  }

  friend IntegerPolynomial operator-(const IntegerPolynomial& a, const IntegerPolynomial& b) {
    check(a, b);
    IntegerPolynomial r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r.c_[i] = a.c_[i] - b.c_[i];
    return r;
  }

  friend IntegerPolynomial operator-(const IntegerPolynomial& a) {
    IntegerPolynomial r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r.c_[i] = -a.c_[i];
    return r;
  }

  // Negacyclic product.
  friend IntegerPolynomial operator*(const IntegerPolynomial& a, const IntegerPolynomial& b) {
    check(a, b);
    const std::size_t n = a.size();
    std::vector<BigInt> acc(2 * n);
    BigInt t;
    for (std::size_t i = 0; i < n; ++i) {
      if (a.c_[i].is_zero()) continue;
      for (std::size_t j = 0; j < n; ++j) {
        boost::multiprecision::multiply(t, a.c_[i], b.c_[j]);
        acc[i + j] += t;
      }
    }
    IntegerPolynomial r(n);
    for (std::size_t i = 0; i < n; ++i) r.c_[i] = acc[i] - acc[i + n];
    return r;
  }

  // f(-x).
  IntegerPolynomial galois_conjugate() const {
    IntegerPolynomial r(*this);
    for (std::size_t i = 1; i < r.size(); i += 2) r.c_[i] = -r.c_[i];
    return r;
  }

  // Norm down to Z[y]/(y^{N/2} + 1): f0^2 - y f1^2 where f = f0(x^2) + x f1(x^2).
  IntegerPolynomial field_norm() const {
    const std::size_t half = size() / 2;
    IntegerPolynomial f0(half), f1(half);
    for (std::size_t i = 0; i < half; ++i) {
      f0.c_[i] = c_[2 * i];
      f1.c_[i] = c_[2 * i + 1];
    }
    auto a = f0 * f0;
    auto b = f1 * f1;
    IntegerPolynomial r(half);
    r.c_[0] = a.c_[0] + b.c_[half - 1];
    for (std::size_t i = 1; i < half; ++i) r.c_[i] = a.c_[i] - b.c_[i - 1];
    return r;
  }

  // F(y) -> F(x^2) in the ring of twice the degree.
  IntegerPolynomial lift() const {
    IntegerPolynomial r(2 * size());
    for (std::size_t i = 0; i < size(); ++i) r.c_[2 * i] = c_[i];
    return r;
  }

  RingElement reduce(const RingParams& p) const {
    if (size() != p.n) throw LengthError("polynomial degree does not match ring");
    std::vector<std::uint64_t> out(p.n);
    const BigInt q = p.q;
    for (std::size_t i = 0; i < p.n; ++i) {
      BigInt m = c_[i] % q;
      if (m < 0) m += q;
      out[i] = m.convert_to<std::uint64_t>();
    }
    return RingElement(p, std::move(out));
  }

  bool fits_int64() const {
    for (const auto& v : c_)
      if (boost::multiprecision::abs(v) > BigInt(INT64_MAX)) return false;
    return true;
  }

  std::vector<std::int64_t> to_int64() const {
    if (!fits_int64()) throw Error("coefficient exceeds 64 bits");
    std::vector<std::int64_t> out(size());
    for (std::size_t i = 0; i < size(); ++i) out[i] = c_[i].convert_to<std::int64_t>();
    return out;
  }

  double norm_sq() const {
    double acc = 0;
    for (const auto& v : c_) {
      const double d = v.convert_to<double>();
      acc += d * d;
    }
    return acc;
  }

 private:
  static void check(const IntegerPolynomial& a, const IntegerPolynomial& b) {
    if (a.size() != b.size()) throw LengthError("polynomial size mismatch");
  }

  std::vector<BigInt> c_;
};

// Each coefficient: sign byte (0 or 1), u16 magnitude length, magnitude bytes
// little-endian.
inline void write_integer_poly(ByteWriter& w, const IntegerPolynomial& p) {
  w.u16(static_cast<std::uint16_t>(p.size()));
  for (const auto& v : p.coeffs()) {
    w.u8(v < 0 ? 1 : 0);
    Bytes mag;
    BigInt a = boost::multiprecision::abs(v);
    boost::multiprecision::export_bits(a, std::back_inserter(mag), 8, false);
    if (a.is_zero()) mag.clear();
    w.u16(static_cast<std::uint16_t>(mag.size()));
    w.raw(mag);
  }
}

inline IntegerPolynomial read_integer_poly(ByteReader& r, std::size_t expected_n) {
  const auto n = r.u16();
  if (n != expected_n) throw ParamsMismatch();
  IntegerPolynomial p(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto sign = r.u8();
    if (sign > 1) throw FormatError("bad sign byte");
    const auto len = r.u16();
    auto mag = r.raw(len);
    BigInt v;
    if (len) boost::multiprecision::import_bits(v, mag.begin(), mag.end(), 8, false);
    p[i] = sign ? BigInt(-v) : v;
  }
  return p;
}

}  // namespace dynamiqs::ring
