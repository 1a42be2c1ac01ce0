#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "dynamiqs/ibe/keyfile.hpp"
#include "dynamiqs/sym/derive.hpp"

namespace dynamiqs::pki {

using ibe::MasterPublicKey;
using ibe::MasterSecretKey;
using ibe::UserSecretKey;
using ring::RingParams;
using sym::Digest;
using sym::uint256_t;

// On-disk size of one pseudonym's secret payload: PS^i plus (z_i, w_i).
inline constexpr std::size_t kPseudonymRecordBytes = 32 + 64;

struct CredentialEntry {
  std::uint32_t index = 0;
  uint256_t a{};
  sym::Pseudonym pseudonym;
  UserSecretKey usk;
  uint256_t z{};
  uint256_t w{};
  bool used = false;  // EV-side bookkeeping

  friend bool operator==(const CredentialEntry&, const CredentialEntry&) = default;
};

struct VehicleCredentials {
  Bytes id_ev;
  uint256_t d_ev{};
  std::vector<CredentialEntry> entries;

  std::size_t secret_payload_bytes() const { return entries.size() * kPseudonymRecordBytes; }

  const CredentialEntry* next_unused() const {
    for (const auto& e : entries)
      if (!e.used) return &e;
    return nullptr;
  }

  friend bool operator==(const VehicleCredentials&, const VehicleCredentials&) = default;
};

struct CspaRecord {
  uint256_t z{};
  uint256_t w{};
  bool consumed = false;

  friend bool operator==(const CspaRecord&, const CspaRecord&) = default;
};

// CSPA's copy: pseudonym -> (z_i, w_i, consumed). Holds nothing that links a
// pseudonym to a vehicle.
struct CspaDataset {
  std::map<Digest, CspaRecord> records;

  std::size_t size() const { return records.size(); }
  CspaRecord* find(const Digest& ps) {
    auto it = records.find(ps);
    return it == records.end() ? nullptr : &it->second;
  }
  const CspaRecord* find(const Digest& ps) const {
    auto it = records.find(ps);
    return it == records.end() ? nullptr : &it->second;
  }

  friend bool operator==(const CspaDataset&, const CspaDataset&) = default;
};

struct StorageEstimate {
  std::uint64_t per_vehicle_bytes = 0;
  std::uint64_t total_bytes = 0;

  friend bool operator==(const StorageEstimate&, const StorageEstimate&) = default;
};

inline StorageEstimate storage_estimate(std::uint64_t vehicle_count, std::uint64_t pseudonyms_per_vehicle,
                                        std::uint64_t bytes_per_record) {
  if (vehicle_count == 0 || pseudonyms_per_vehicle == 0 || bytes_per_record == 0)
    throw InvalidParams("storage estimate inputs must be positive");
  const auto per_vehicle = pseudonyms_per_vehicle * bytes_per_record;
  return {per_vehicle, per_vehicle * vehicle_count};
}

namespace detail {

inline uint256_t random_nonzero(SeededRandomSource& rng) {
  for (;;) {
    auto v = sym::from_be32(rng.block32());
    if (!v.is_zero()) return v;
  }
}

}  // namespace detail

class RegistrationAuthority {
 public:
  struct VehicleRecord {
    Bytes id_ev;
    uint256_t d_ev{};
    struct Issued {
      std::uint32_t index = 0;
      uint256_t a{};
      Digest pseudonym{};
      uint256_t z{};
      uint256_t w{};
      friend bool operator==(const Issued&, const Issued&) = default;
    };
    std::vector<Issued> issued;
    friend bool operator==(const VehicleRecord&, const VehicleRecord&) = default;
  };

  RegistrationAuthority(const Block32& seed, MasterSecretKey msk, MasterPublicKey mpk)
      : seed_(seed), msk_(std::move(msk)), mpk_(std::move(mpk)) {}

  const Block32& seed() const { return seed_; }
  const RingParams& params() const { return mpk_.params; }
  const MasterSecretKey& msk() const { return msk_; }
  const MasterPublicKey& mpk() const { return mpk_; }
  const std::set<std::string>& cspas() const { return cspas_; }
  const std::map<Bytes, VehicleRecord>& vehicles() const { return vehicles_; }
  std::size_t issued_pseudonyms() const { return pseudonyms_.size(); }

  UserSecretKey register_cspa(std::string_view id_cspa) {
    if (!cspas_.emplace(id_cspa).second) throw DuplicateRegistration(std::string(id_cspa));
    return ibe::extract(msk_, id_cspa);
  }

  // Keys for an already registered CSPA.
  UserSecretKey cspa_key(std::string_view id_cspa) const {
    if (!cspas_.contains(std::string(id_cspa))) throw Error("CSPA not registered: " + std::string(id_cspa));
    return ibe::extract(msk_, id_cspa);
  }

  VehicleCredentials register_vehicle(ByteView id_ev, std::size_t pseudonym_count) {
    if (pseudonym_count == 0) throw InvalidParams("pseudonym count must be at least 1");
    const Bytes id(id_ev.begin(), id_ev.end());
    if (vehicles_.contains(id)) throw DuplicateRegistration(std::string(id.begin(), id.end()));

    auto rng = SeededRandomSource(seed_).derive(concat({as_view("vehicle|"), id_ev}));
    VehicleRecord record{id, detail::random_nonzero(rng), {}};
    VehicleCredentials creds{id, record.d_ev, {}};
    std::set<uint256_t> multipliers;
    for (std::uint32_t i = 0; i < pseudonym_count; ++i) {
      uint256_t a;
      sym::Pseudonym ps;
      do {
        a = detail::random_nonzero(rng);
        ps = sym::derive_pseudonym(id_ev, record.d_ev, a, i);
      } while (multipliers.contains(a) || pseudonyms_.contains(ps.value));
      multipliers.insert(a);
      pseudonyms_.insert(ps.value);
      const auto z = sym::from_be32(rng.block32()), w = sym::from_be32(rng.block32());
      record.issued.push_back({i, a, ps.value, z, w});
      creds.entries.push_back({i, a, ps, ibe::extract(msk_, ByteView(ps.value)), z, w, false});
    }
    vehicles_.emplace(id, std::move(record));
    return creds;
  }

  // Re-issues the credentials of a registered vehicle, e.g. after a restart.
  VehicleCredentials credentials(ByteView id_ev) const {
    const auto it = vehicles_.find(Bytes(id_ev.begin(), id_ev.end()));
    if (it == vehicles_.end()) throw Error("vehicle not registered");
    const auto& rec = it->second;
    VehicleCredentials creds{rec.id_ev, rec.d_ev, {}};
    for (const auto& e : rec.issued)
      creds.entries.push_back({e.index, e.a, {e.pseudonym, e.index}, ibe::extract(msk_, ByteView(e.pseudonym)), e.z,
                               e.w, false});
    return creds;
  }

  CspaDataset export_cspa_dataset() const {
    if (vehicles_.empty()) throw EmptyRegistry();
    CspaDataset ds;
    for (const auto& [id, rec] : vehicles_)
      for (const auto& e : rec.issued) ds.records.emplace(e.pseudonym, CspaRecord{e.z, e.w, false});
    return ds;
  }

  // Restores registry contents read back from a state file.
  void restore(std::set<std::string> cspas, std::map<Bytes, VehicleRecord> vehicles) {
    cspas_ = std::move(cspas);
    vehicles_ = std::move(vehicles);
    pseudonyms_.clear();
    for (const auto& [id, rec] : vehicles_)
      for (const auto& e : rec.issued)
        if (!pseudonyms_.insert(e.pseudonym).second) throw FormatError("duplicate pseudonym in authority state");
  }

 private:
  Block32 seed_;
  MasterSecretKey msk_;
  MasterPublicKey mpk_;
  std::set<std::string> cspas_;
  std::map<Bytes, VehicleRecord> vehicles_;
  std::set<Digest> pseudonyms_;
};

inline RegistrationAuthority ra_setup(const RingParams& params, const Block32& seed) {
  auto rng = SeededRandomSource(seed).derive("master-keys");
  auto keys = ibe::master_key_gen(params, rng);
  return RegistrationAuthority(seed, std::move(keys.secret), std::move(keys.public_key));
}

inline RegistrationAuthority ra_setup(const RingParams& params, std::uint64_t seed) {
  return ra_setup(params, SeededRandomSource(seed).material());
}

}  // namespace dynamiqs::pki
