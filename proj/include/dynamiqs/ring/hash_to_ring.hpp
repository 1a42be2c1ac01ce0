#pragma once

#include "dynamiqs/ring/element.hpp"
#include "dynamiqs/sym/sha256.hpp"

namespace dynamiqs::ring {

// Counter-mode SHA-256 expansion of `input`: block k is SHA-256(input || k)
// with k a 32-bit little-endian counter. Each 32-bit little-endian word is
// kept if it falls below the largest multiple of q under 2^32, then reduced.
inline RingElement hash_to_ring(ByteView input, const RingParams& params) {
  const std::uint64_t q = params.q;
  const std::uint64_t limit = (std::uint64_t{1} << 32) / q * q;
  std::vector<std::uint64_t> coeffs;
  coeffs.reserve(params.n);
  for (std::uint32_t counter = 0; coeffs.size() < params.n; ++counter) {
    std::uint8_t ctr[4] = {static_cast<std::uint8_t>(counter), static_cast<std::uint8_t>(counter >> 8),
                           static_cast<std::uint8_t>(counter >> 16), static_cast<std::uint8_t>(counter >> 24)};
    auto block = sym::Sha256().update(input).update(ByteView(ctr, 4)).finish();
    for (std::size_t w = 0; w < 8 && coeffs.size() < params.n; ++w) {
      std::uint64_t word = 0;
      for (std::size_t b = 0; b < 4; ++b) word |= std::uint64_t{block[4 * w + b]} << (8 * b);
      if (word < limit) coeffs.push_back(word % q);
    }
  }
  return RingElement(params, std::move(coeffs));
}

inline RingElement hash_to_ring(std::string_view input, const RingParams& params) {
  return hash_to_ring(as_view(input), params);
}

// Domain tags separating identity digests from signature digests.
inline constexpr std::string_view kIdentityTag = "ID|";
inline constexpr std::string_view kSignatureTag = "SIG|";

// t = H(identity), the public key of an identity.
inline RingElement identity_digest(ByteView identity, const RingParams& params) {
  return hash_to_ring(concat({as_view(kIdentityTag), identity}), params);
}

inline RingElement identity_digest(std::string_view identity, const RingParams& params) {
  return identity_digest(as_view(identity), params);
}

}  // namespace dynamiqs::ring
