#pragma once

#include <cmath>

#include "dynamiqs/ibe/ibe.hpp"

namespace dynamiqs::ibe {

// Container: magic "DQS1", record type, params header (N u16, q u64,
// sigma_f f64, sigma_extract f64, norm bound f64), then the record body.
enum class RecordType : std::uint8_t {
  MasterPublicKey = 1,
  MasterSecretKey = 2,
  UserSecretKey = 3,
  Signature = 4,
  AuthorityState = 5,
  VehicleCredentials = 6,
  CspaDataset = 7,
};

inline constexpr std::string_view kMagic = "DQS1";

inline void write_header(ByteWriter& w, RecordType type, const RingParams& p) {
  w.raw(as_view(kMagic));
  w.u8(static_cast<std::uint8_t>(type));
  w.u16(static_cast<std::uint16_t>(p.n));
  w.u64(p.q);
  w.f64(p.sigma_f);
  w.f64(p.sigma_extract);
  w.f64(p.norm_bound());
}

inline RingParams read_header(ByteReader& r, RecordType expected) {
  auto magic = r.raw(4);
  if (!std::equal(magic.begin(), magic.end(), kMagic.begin())) throw FormatError("bad magic");
  if (r.u8() != static_cast<std::uint8_t>(expected)) throw FormatError("unexpected record type");
  RingParams p;
  p.n = r.u16();
  p.q = r.u64();
  p.sigma_f = r.f64();
  p.sigma_extract = r.f64();
  const double bound = r.f64();
  p.validate();
  if (bound != p.norm_bound()) throw FormatError("norm bound does not match params");
  return p;
}

inline void write_user_key(ByteWriter& w, const UserSecretKey& k) {
  ring::write_element(w, k.id_digest);
  ring::write_element(w, k.s1);
  ring::write_element(w, k.s2);
}

inline UserSecretKey read_user_key(ByteReader& r, const RingParams& p) {
  UserSecretKey k;
  k.id_digest = ring::read_element(r, p);
  k.s1 = ring::read_element(r, p);
  k.s2 = ring::read_element(r, p);
  return k;
}

inline void write_master_secret(ByteWriter& w, const MasterSecretKey& k) {
  for (const auto* poly : {&k.f(), &k.g(), &k.F(), &k.G()}) ring::write_integer_poly(w, *poly);
}

inline MasterSecretKey read_master_secret(ByteReader& r, const RingParams& p) {
  auto f = ring::read_integer_poly(r, p.n);
  auto g = ring::read_integer_poly(r, p.n);
  auto F = ring::read_integer_poly(r, p.n);
  auto G = ring::read_integer_poly(r, p.n);
  MasterSecretKey k(p, std::move(f), std::move(g), std::move(F), std::move(G));
  if (!k.satisfies_ntru_equation()) throw FormatError("master key violates f*G - g*F = q");
  return k;
}

template <RecordType Type, typename Body>
Bytes encode_record(const RingParams& p, Body&& body) {
  ByteWriter w;
  write_header(w, Type, p);
  body(w);
  return std::move(w).take();
}

inline Bytes encode(const MasterPublicKey& k) {
  return encode_record<RecordType::MasterPublicKey>(k.params, [&](ByteWriter& w) { ring::write_element(w, k.h); });
}

inline Bytes encode(const MasterSecretKey& k) {
  return encode_record<RecordType::MasterSecretKey>(k.params(), [&](ByteWriter& w) { write_master_secret(w, k); });
}

inline Bytes encode(const UserSecretKey& k) {
  return encode_record<RecordType::UserSecretKey>(k.params(), [&](ByteWriter& w) { write_user_key(w, k); });
}

inline Bytes encode(const Signature& s) {
  return encode_record<RecordType::Signature>(s.s1.params(), [&](ByteWriter& w) {
    w.raw(s.salt);
    ring::write_element(w, s.s1);
    ring::write_element(w, s.s2);
  });
}

inline MasterPublicKey decode_master_public(ByteView data) {
  ByteReader r(data);
  auto p = read_header(r, RecordType::MasterPublicKey);
  MasterPublicKey k{p, ring::read_element(r, p)};
  r.expect_done();
  return k;
}

inline MasterSecretKey decode_master_secret(ByteView data) {
  ByteReader r(data);
  auto p = read_header(r, RecordType::MasterSecretKey);
  auto k = read_master_secret(r, p);
  r.expect_done();
  return k;
}

inline UserSecretKey decode_user_key(ByteView data) {
  ByteReader r(data);
  auto p = read_header(r, RecordType::UserSecretKey);
  auto k = read_user_key(r, p);
  r.expect_done();
  return k;
}

inline Signature decode_signature(ByteView data) {
  ByteReader r(data);
  auto p = read_header(r, RecordType::Signature);
  Signature s;
  s.salt = to_block32(r.raw(32));
  s.s1 = ring::read_element(r, p);
  s.s2 = ring::read_element(r, p);
  r.expect_done();
  return s;
}

}  // namespace dynamiqs::ibe
