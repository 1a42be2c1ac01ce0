#pragma once

#include "dynamiqs/ibe/ibe.hpp"
#include "dynamiqs/sym/aead.hpp"

namespace dynamiqs::ibe {

// A fresh 256-bit content key is IBE-encrypted to the identity; the payload is
// sealed under it with AES-256-GCM. At N >= 256 one block carries the key;
// smaller rings spread it over ceil(256 / N) raw-bit blocks.
struct HybridCiphertext {
  std::vector<IbeCiphertext> blocks;
  Bytes sealed;

  friend bool operator==(const HybridCiphertext&, const HybridCiphertext&) = default;
};

inline std::vector<IbeCiphertext> encapsulate(const MasterPublicKey& mpk, ByteView identity, const Block32& key,
                                              SeededRandomSource& rng) {
  const std::size_t n = mpk.params.n;
  const std::size_t nblocks = (256 + n - 1) / n;
  const auto kind = nblocks == 1 ? PayloadKind::KeyEncapsulation : PayloadKind::RawBits;
  std::vector<IbeCiphertext> out;
  for (std::size_t b = 0; b < nblocks; ++b) {
    BitString bits(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t bit = b * n + i;
      if (bit < 256) bits[i] = (key[bit / 8] >> (bit % 8)) & 1;
    }
    out.push_back(encrypt(mpk, identity, bits, rng, kind));
  }
  return out;
}

inline Block32 decapsulate(const UserSecretKey& usk, const std::vector<IbeCiphertext>& blocks) {
  const std::size_t n = usk.params().n;
  if (blocks.size() != (256 + n - 1) / n) throw FormatError("wrong number of key blocks");
  Block32 key{};
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto bits = decrypt(usk, blocks[b]);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t bit = b * n + i;
      if (bit < 256 && bits[i]) key[bit / 8] |= static_cast<std::uint8_t>(1u << (bit % 8));
    }
  }
  return key;
}

inline HybridCiphertext hybrid_seal(const MasterPublicKey& mpk, ByteView identity, ByteView plaintext,
                                    ByteView associated_data, SeededRandomSource& rng) {
  const sym::SymmetricKey content{rng.block32(), sym::KeyRole::Content};
  HybridCiphertext ct;
  ct.blocks = encapsulate(mpk, identity, content.bytes, rng);
  ct.sealed = sym::aead_seal(content, plaintext, associated_data, rng);
  return ct;
}

// Throws AuthenticationFailure when the key does not match or anything was
// altered.
inline Bytes hybrid_open(const UserSecretKey& usk, const HybridCiphertext& ct, ByteView associated_data) {
  for (const auto& b : ct.blocks)
    if (!(b.u.params() == usk.params()) || !(b.v.params() == usk.params())) throw AuthenticationFailure();
  const sym::SymmetricKey content{decapsulate(usk, ct.blocks), sym::KeyRole::Content};
  return sym::aead_open(content, ct.sealed, associated_data);
}

inline void write_hybrid(ByteWriter& w, const HybridCiphertext& ct) {
  w.u8(static_cast<std::uint8_t>(ct.blocks.size()));
  for (const auto& b : ct.blocks) {
    w.u8(static_cast<std::uint8_t>(b.kind));
    ring::write_element(w, b.u);
    ring::write_element(w, b.v);
  }
  w.blob(ct.sealed);
}

inline HybridCiphertext read_hybrid(ByteReader& r, const RingParams& params) {
  HybridCiphertext ct;
  const auto count = r.u8();
  for (std::size_t i = 0; i < count; ++i) {
    IbeCiphertext b;
    const auto kind = r.u8();
    if (kind != 1 && kind != 2) throw FormatError("unknown payload kind");
    b.kind = static_cast<PayloadKind>(kind);
    b.u = ring::read_element(r, params);
    b.v = ring::read_element(r, params);
    ct.blocks.push_back(std::move(b));
  }
  ct.sealed = r.blob();
  return ct;
}

}  // namespace dynamiqs::ibe
