#pragma once

#include "dynamiqs/pki/registration.hpp"

namespace dynamiqs::pki {

using ibe::RecordType;

namespace detail {

inline void write_u256(ByteWriter& w, const uint256_t& v) { w.raw(sym::to_be32(v)); }
inline uint256_t read_u256(ByteReader& r) { return sym::from_be32(r.raw(32)); }

}  // namespace detail

inline Bytes encode(const RegistrationAuthority& ra) {
  return ibe::encode_record<RecordType::AuthorityState>(ra.params(), [&](ByteWriter& w) {
    w.raw(ra.seed());
    ibe::write_master_secret(w, ra.msk());
    ring::write_element(w, ra.mpk().h);
    w.u32(static_cast<std::uint32_t>(ra.cspas().size()));
    for (const auto& id : ra.cspas()) w.str(id);
    w.u32(static_cast<std::uint32_t>(ra.vehicles().size()));
    for (const auto& [id, rec] : ra.vehicles()) {
      w.blob(rec.id_ev);
      detail::write_u256(w, rec.d_ev);
      w.u32(static_cast<std::uint32_t>(rec.issued.size()));
      for (const auto& e : rec.issued) {
        w.u32(e.index);
        detail::write_u256(w, e.a);
        w.raw(e.pseudonym);
        detail::write_u256(w, e.z);
        detail::write_u256(w, e.w);
      }
    }
  });
}

inline RegistrationAuthority decode_authority(ByteView data) {
  ByteReader r(data);
  const auto p = ibe::read_header(r, RecordType::AuthorityState);
  const auto seed = to_block32(r.raw(32));
  auto msk = ibe::read_master_secret(r, p);
  MasterPublicKey mpk{p, ring::read_element(r, p)};
  if (!(mpk.h * msk.f().reduce(p) == msk.g().reduce(p))) throw FormatError("public key does not match master key");
  std::set<std::string> cspas;
  for (auto count = r.u32(); count > 0; --count) cspas.insert(r.str());
  std::map<Bytes, RegistrationAuthority::VehicleRecord> vehicles;
  for (auto count = r.u32(); count > 0; --count) {
    RegistrationAuthority::VehicleRecord rec;
    rec.id_ev = r.blob();
    rec.d_ev = detail::read_u256(r);
    for (auto n = r.u32(); n > 0; --n) {
      RegistrationAuthority::VehicleRecord::Issued e;
      e.index = r.u32();
      e.a = detail::read_u256(r);
      e.pseudonym = to_block32(r.raw(32));
      e.z = detail::read_u256(r);
      e.w = detail::read_u256(r);
      rec.issued.push_back(e);
    }
    auto key = rec.id_ev;
    vehicles.emplace(std::move(key), std::move(rec));
  }
  r.expect_done();
  RegistrationAuthority ra(seed, std::move(msk), std::move(mpk));
  ra.restore(std::move(cspas), std::move(vehicles));
  return ra;
}

inline Bytes encode(const VehicleCredentials& c, const RingParams& p) {
  return ibe::encode_record<RecordType::VehicleCredentials>(p, [&](ByteWriter& w) {
    w.blob(c.id_ev);
    detail::write_u256(w, c.d_ev);
    w.u32(static_cast<std::uint32_t>(c.entries.size()));
    for (const auto& e : c.entries) {
      w.u32(e.index);
      detail::write_u256(w, e.a);
      w.raw(e.pseudonym.value);
      ibe::write_user_key(w, e.usk);
      detail::write_u256(w, e.z);
      detail::write_u256(w, e.w);
      w.u8(e.used ? 1 : 0);
    }
  });
}

inline VehicleCredentials decode_credentials(ByteView data) {
  ByteReader r(data);
  const auto p = ibe::read_header(r, RecordType::VehicleCredentials);
  VehicleCredentials c;
  c.id_ev = r.blob();
  c.d_ev = detail::read_u256(r);
  for (auto n = r.u32(); n > 0; --n) {
    CredentialEntry e;
    e.index = r.u32();
    e.a = detail::read_u256(r);
    e.pseudonym = {to_block32(r.raw(32)), e.index};
    e.usk = ibe::read_user_key(r, p);
    e.z = detail::read_u256(r);
    e.w = detail::read_u256(r);
    e.used = r.u8() != 0;
    c.entries.push_back(std::move(e));
  }
  r.expect_done();
  return c;
}

inline Bytes encode(const CspaDataset& ds, const RingParams& p) {
  return ibe::encode_record<RecordType::CspaDataset>(p, [&](ByteWriter& w) {
    w.u32(static_cast<std::uint32_t>(ds.records.size()));
    for (const auto& [ps, rec] : ds.records) {
      w.raw(ps);
      detail::write_u256(w, rec.z);
      detail::write_u256(w, rec.w);
      w.u8(rec.consumed ? 1 : 0);
    }
  });
}

inline CspaDataset decode_dataset(ByteView data) {
  ByteReader r(data);
  ibe::read_header(r, RecordType::CspaDataset);
  CspaDataset ds;
  for (auto n = r.u32(); n > 0; --n) {
    const auto ps = to_block32(r.raw(32));
    CspaRecord rec;
    rec.z = detail::read_u256(r);
    rec.w = detail::read_u256(r);
    rec.consumed = r.u8() != 0;
    if (!ds.records.emplace(ps, rec).second) throw FormatError("duplicate pseudonym in dataset");
  }
  r.expect_done();
  return ds;
}

}  // namespace dynamiqs::pki
