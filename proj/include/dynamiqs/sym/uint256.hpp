#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include "dynamiqs/bytes.hpp"

namespace dynamiqs::sym {

using boost::multiprecision::uint256_t;
using boost::multiprecision::uint512_t;

// Fixed-width big-endian encodings.
inline Block32 to_be32(const uint256_t& v) {
  Block32 out{};
  Bytes tmp;
  boost::multiprecision::export_bits(v, std::back_inserter(tmp), 8, true);
  std::copy(tmp.begin(), tmp.end(), out.end() - static_cast<std::ptrdiff_t>(tmp.size()));
  return out;
}

inline uint256_t from_be32(ByteView b) {
  if (b.size() != 32) throw LengthError("256-bit value needs 32 bytes");
  uint256_t v;
  boost::multiprecision::import_bits(v, b.begin(), b.end(), 8, true);
  return v;
}

inline std::array<std::uint8_t, 64> to_be64(const uint512_t& v) {
  std::array<std::uint8_t, 64> out{};
  Bytes tmp;
  boost::multiprecision::export_bits(v, std::back_inserter(tmp), 8, true);
  std::copy(tmp.begin(), tmp.end(), out.end() - static_cast<std::ptrdiff_t>(tmp.size()));
  return out;
}

// Unsigned 256-bit arithmetic wraps modulo 2^256.
inline uint256_t add_mod256(const uint256_t& a, const uint256_t& b) { return a + b; }

}  // namespace dynamiqs::sym
