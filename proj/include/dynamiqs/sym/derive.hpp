#pragma once

#include <cstdint>

#include "dynamiqs/sym/aead.hpp"
#include "dynamiqs/sym/sha256.hpp"
#include "dynamiqs/sym/uint256.hpp"

namespace dynamiqs::sym {

struct Pseudonym {
  Digest value{};
  std::uint32_t index = 0;

  friend bool operator==(const Pseudonym&, const Pseudonym&) = default;
};

// K_AES = SHA-256(N_EV || N_CSPA).
inline SymmetricKey derive_session_key(ByteView n_ev, ByteView n_cspa) {
  if (n_ev.size() != 32 || n_cspa.size() != 32) throw LengthError("session nonces must be 32 bytes");
  return {Sha256().update(n_ev).update(n_cspa).finish(), KeyRole::Session};
}

// PS^i = SHA-256(ID_EV || be64(d_EV * a_i)).
inline Pseudonym derive_pseudonym(ByteView id_ev, const uint256_t& d_ev, const uint256_t& a_i, std::uint32_t index) {
  if (d_ev.is_zero() || a_i.is_zero()) throw Error("pseudonym multipliers must be nonzero");
  const uint512_t product = uint512_t(d_ev) * uint512_t(a_i);
  const auto enc = to_be64(product);
  return {Sha256().update(id_ev).update(enc).finish(), index};
}

// Timestamps: u64 milliseconds, little-endian, zero-padded to 32 bytes.
inline Block32 encode_timestamp(std::uint64_t ms) {
  Block32 out{};
  for (std::size_t i = 0; i < 8; ++i) out[i] = static_cast<std::uint8_t>(ms >> (8 * i));
  return out;
}

inline std::uint64_t decode_timestamp(ByteView b) {
  if (b.size() != 32) throw LengthError("timestamp field must be 32 bytes");
  for (std::size_t i = 8; i < 32; ++i)
    if (b[i] != 0) throw FormatError("timestamp padding must be zero");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < 8; ++i) v |= std::uint64_t{b[i]} << (8 * i);
  return v;
}

}  // namespace dynamiqs::sym
