#pragma once

#include <map>
#include <set>
#include <optional>

#include "dynamiqs/ibe/hybrid.hpp"
#include "dynamiqs/pki/registration.hpp"
#include "dynamiqs/protocol/messages.hpp"
#include "dynamiqs/protocol/result.hpp"
#include "dynamiqs/sym/hash_chain.hpp"

namespace dynamiqs::protocol {

using ibe::MasterPublicKey;
using ibe::UserSecretKey;
using sym::Digest;
using sym::SymmetricKey;
using sym::uint256_t;

inline constexpr std::uint64_t kDefaultFreshnessMs = 2000;

inline bool fresh(std::uint64_t now_ms, std::uint64_t t_ms, std::uint64_t window_ms) {
  const auto gap = now_ms > t_ms ? now_ms - t_ms : t_ms - now_ms;
  return gap <= window_ms;
}

inline std::string pad_name(std::size_t j) { return "CP" + std::to_string(j); }

enum class EvState { Idle, SentM1, AuthenticatedCspa, SentM4, AuthenticatedRsu, Charging, Done, Aborted };

inline std::string_view to_string(EvState s) {
  switch (s) {
    case EvState::Idle: return "Idle";
    case EvState::SentM1: return "SentM1";
    case EvState::AuthenticatedCspa: return "AuthenticatedCspa";
    case EvState::SentM4: return "SentM4";
    case EvState::AuthenticatedRsu: return "AuthenticatedRsu";
    case EvState::Charging: return "Charging";
    case EvState::Done: return "Done";
    case EvState::Aborted: return "Aborted";
  }
  return "?";
}

// EV/OBU side of one charging session, bound to one credential entry.
class EvSession {
 public:
  EvSession(MasterPublicKey mpk, std::string id_cspa, pki::CredentialEntry entry, SeededRandomSource rng,
            std::uint64_t window_ms = kDefaultFreshnessMs)
      : mpk_(std::move(mpk)),
        id_cspa_(std::move(id_cspa)),
        entry_(std::move(entry)),
        rng_(std::move(rng)),
        window_(window_ms) {}

  EvState state() const { return state_; }
  std::size_t current_pad() const { return pad_; }
  std::optional<Rejection> abort_reason() const { return abort_reason_; }
  const pki::CredentialEntry& entry() const { return entry_; }
  const std::optional<sym::HashChain>& chain() const { return chain_; }
  const SymmetricKey& session_key() const { return k_aes_; }

  // m1 = E_{ID_CSPA}{PS^i, N_EV, t1, z_i}
  Result<Message> compose_m1(std::uint64_t now_ms) {
    if (state_ != EvState::Idle) return Rejection::WrongState;
    if (entry_.used) return Rejection::NoUnusedPseudonym;
    entry_.used = true;
    n_ev_ = rng_.block32();
    const auto body = TlvWriter()
                          .put(Field::Pseudonym, entry_.pseudonym.value)
                          .put(Field::NonceEv, n_ev_)
                          .put(Field::Timestamp, sym::encode_timestamp(now_ms))
                          .put(Field::SecretZ, sym::to_be32(entry_.z))
                          .take();
    const auto ct = ibe::hybrid_seal(mpk_, as_view(id_cspa_), body, Message::associated_data(MessageKind::M1), rng_);
    ByteWriter w;
    ibe::write_hybrid(w, ct);
    state_ = EvState::SentM1;
    return make_message(MessageKind::M1, "EV", "CSPA", w.bytes());
  }

  Result<Accepted> handle_m2(const Message& msg, std::uint64_t now_ms) {
    if (state_ != EvState::SentM1 || msg.kind != MessageKind::M2) return Rejection::WrongState;
    Bytes plain;
    try {
      ByteReader r(msg.body());
      const auto ct = ibe::read_hybrid(r, mpk_.params);
      r.expect_done();
      plain = ibe::hybrid_open(entry_.usk, ct, Message::associated_data(MessageKind::M2));
    } catch (const Error&) {
      return abort(Rejection::DecryptFailure);
    }
    try {
      TlvReader t(plain);
      const auto token = t.get32(Field::Token);
      const auto n_cspa = t.get32(Field::NonceCspa);
      const auto t2 = sym::decode_timestamp(t.get(Field::Timestamp, 32));
      const auto sum = sym::from_be32(t.get(Field::SecretSum, 32));
      t.done();
      if (!fresh(now_ms, t2, window_)) return abort(Rejection::StaleTimestamp);
      if (sum != sym::add_mod256(entry_.z, entry_.w)) return abort(Rejection::SecretMismatch);
      token_ = token;
      k_aes_ = sym::derive_session_key(n_ev_, n_cspa);
    } catch (const Error&) {
      return abort(Rejection::MalformedMessage);
    }
    state_ = EvState::AuthenticatedCspa;
    return Accepted{};
  }

  // m4 = E_{K_AES}{PS^i, N_RSU, t4}
  Result<Message> compose_m4(std::uint64_t now_ms) {
    if (state_ != EvState::AuthenticatedCspa) return Rejection::WrongState;
    n_rsu_ = rng_.block32();
    const auto body = TlvWriter()
                          .put(Field::Pseudonym, entry_.pseudonym.value)
                          .put(Field::NonceRsu, n_rsu_)
                          .put(Field::Timestamp, sym::encode_timestamp(now_ms))
                          .take();
    state_ = EvState::SentM4;
    return make_message(MessageKind::M4, "EV", "RSU",
                        sym::aead_seal(k_aes_, body, Message::associated_data(MessageKind::M4), rng_));
  }

  Result<Accepted> handle_m5(const Message& msg, std::uint64_t now_ms) {
    if (state_ != EvState::SentM4 || msg.kind != MessageKind::M5) return Rejection::WrongState;
    Bytes plain;
    try {
      plain = sym::aead_open(k_aes_, msg.body(), Message::associated_data(MessageKind::M5));
    } catch (const AuthenticationFailure&) {
      return abort(Rejection::DecryptFailure);
    }
    try {
      TlvReader t(plain);
      const auto reply = sym::from_be32(t.get(Field::NonceRsuReply, 32));
      const auto m_ev = t.get32(Field::ChainNonce);
      const auto t5 = sym::decode_timestamp(t.get(Field::Timestamp, 32));
      const auto n = t.get_u32(Field::ChainLength);
      t.done();
      if (!fresh(now_ms, t5, window_)) return abort(Rejection::StaleTimestamp);
      if (reply != sym::add_mod256(sym::from_be32(n_rsu_), 1)) return abort(Rejection::NonceMismatch);
      if (n == 0) return abort(Rejection::MalformedMessage);
      chain_.emplace(sym::build_hash_chain(token_, m_ev, n));
    } catch (const Error&) {
      return abort(Rejection::MalformedMessage);
    }
    state_ = EvState::AuthenticatedRsu;
    return Accepted{};
  }

  // Pad j receives link[n - j]: m7 for the first pad, m9 for the second and
  // chain steps after that.
  Result<Message> compose_chain_value(std::size_t j) {
    const bool first = state_ == EvState::AuthenticatedRsu && j == 1;
    const bool next = state_ == EvState::Charging && j == pad_ + 1 && pad_accepted_;
    if (!first && !next) return Rejection::WrongState;
    if (j > chain_->length()) return Rejection::WrongState;
    pad_ = j;
    pad_accepted_ = false;
    state_ = EvState::Charging;
    const auto kind = j == 1 ? MessageKind::M7 : j == 2 ? MessageKind::M9 : MessageKind::ChainStep;
    return make_message(kind, "EV", pad_name(j), chain_->value_for_pad(j));
  }

  // Outcome reported by pad j for the value just sent.
  void pad_result(std::size_t j, bool accepted) {
    if (state_ != EvState::Charging || j != pad_) return;
    if (!accepted) {
      abort(Rejection::ChainMismatch);
      return;
    }
    pad_accepted_ = true;
    if (j == chain_->length()) state_ = EvState::Done;
  }

 private:
  Rejection abort(Rejection r) {
    state_ = EvState::Aborted;
    abort_reason_ = r;
    return r;
  }

  MasterPublicKey mpk_;
  std::string id_cspa_;
  pki::CredentialEntry entry_;
  SeededRandomSource rng_;
  std::uint64_t window_;
  EvState state_ = EvState::Idle;
  std::optional<Rejection> abort_reason_;
  Block32 n_ev_{}, token_{}, n_rsu_{};
  SymmetricKey k_aes_{};
  std::optional<sym::HashChain> chain_;
  std::size_t pad_ = 0;
  bool pad_accepted_ = false;
};

struct CspaOutput {
  Message m2;
  Message m3;
};

class Cspa {
 public:
  struct Issued {
    Block32 token{};
    SymmetricKey k_aes{};
  };

  Cspa(std::string id, UserSecretKey usk, MasterPublicKey mpk, pki::CspaDataset dataset, SymmetricKey gk_cspa_rsu,
       SeededRandomSource rng, std::uint64_t window_ms = kDefaultFreshnessMs)
      : id_(std::move(id)),
        usk_(std::move(usk)),
        mpk_(std::move(mpk)),
        dataset_(std::move(dataset)),
        gk_(gk_cspa_rsu),
        rng_(std::move(rng)),
        window_(window_ms) {}

  const pki::CspaDataset& dataset() const { return dataset_; }
  const std::map<Digest, Issued>& issued() const { return issued_; }

  Result<CspaOutput> handle_m1(const Message& msg, std::uint64_t now_ms) {
    if (msg.kind != MessageKind::M1) return Rejection::WrongState;
    Bytes plain;
    try {
      ByteReader r(msg.body());
      const auto ct = ibe::read_hybrid(r, mpk_.params);
      r.expect_done();
      plain = ibe::hybrid_open(usk_, ct, Message::associated_data(MessageKind::M1));
    } catch (const Error&) {
      return Rejection::DecryptFailure;
    }
    Digest ps;
    Block32 n_ev;
    std::uint64_t t1;
    uint256_t z;
    try {
      TlvReader t(plain);
      ps = t.get32(Field::Pseudonym);
      n_ev = t.get32(Field::NonceEv);
      t1 = sym::decode_timestamp(t.get(Field::Timestamp, 32));
      z = sym::from_be32(t.get(Field::SecretZ, 32));
      t.done();
    } catch (const Error&) {
      return Rejection::MalformedMessage;
    }
    auto* record = dataset_.find(ps);
    if (!record) return Rejection::UnknownPseudonym;
    if (record->consumed) return Rejection::PseudonymReuse;
    if (record->z != z) return Rejection::SecretMismatch;
    if (!fresh(now_ms, t1, window_)) return Rejection::StaleTimestamp;

    const auto token = rng_.block32();
    const auto n_cspa = rng_.block32();
    const auto k_aes = sym::derive_session_key(n_ev, n_cspa);
    // m2 = E_{PS^i}{T, N_CSPA, t2, z_i + w_i}
    const auto m2_body = TlvWriter()
                             .put(Field::Token, token)
                             .put(Field::NonceCspa, n_cspa)
                             .put(Field::Timestamp, sym::encode_timestamp(now_ms))
                             .put(Field::SecretSum, sym::to_be32(sym::add_mod256(record->z, record->w)))
                             .take();
    const auto ct = ibe::hybrid_seal(mpk_, ByteView(ps), m2_body, Message::associated_data(MessageKind::M2), rng_);
    ByteWriter w;
    ibe::write_hybrid(w, ct);
    // m3 = E_{GK_CSPA-RSU}{H(T), PS^i, K_AES, t3}
    const auto m3_body = TlvWriter()
                             .put(Field::TokenHash, sym::sha256(token))
                             .put(Field::Pseudonym, ps)
                             .put(Field::SessionKey, k_aes.bytes)
                             .put(Field::Timestamp, sym::encode_timestamp(now_ms))
                             .take();
    record->consumed = true;
    issued_[ps] = {token, k_aes};
    return CspaOutput{make_message(MessageKind::M2, "CSPA", "EV", w.bytes()),
                      make_message(MessageKind::M3, "CSPA", "RSU",
                                   sym::aead_seal(gk_, m3_body, Message::associated_data(MessageKind::M3), rng_))};
  }

 private:
  std::string id_;
  UserSecretKey usk_;
  MasterPublicKey mpk_;
  pki::CspaDataset dataset_;
  SymmetricKey gk_;
  std::map<Digest, Issued> issued_;
  SeededRandomSource rng_;
  std::uint64_t window_;
};

class Rsu {
 public:
  struct Pending {
    Digest token_hash{};
    SymmetricKey k_aes{};
  };

  Rsu(SymmetricKey gk_cspa_rsu, SymmetricKey gk_rsu_cp, std::uint32_t n_pads, SeededRandomSource rng,
      std::uint64_t window_ms = kDefaultFreshnessMs)
      : gk_cspa_(gk_cspa_rsu), gk_cp_(gk_rsu_cp), n_(n_pads), rng_(std::move(rng)), window_(window_ms) {
    if (n_pads == 0) throw InvalidParams("a lane needs at least one pad");
  }

  std::uint32_t n_pads() const { return n_; }
  const std::map<Digest, Pending>& pending() const { return pending_; }
  const std::optional<sym::HashChain>& active_chain() const { return chain_; }

  Result<Accepted> handle_m3(const Message& msg, std::uint64_t now_ms) {
    if (msg.kind != MessageKind::M3) return Rejection::WrongState;
    Bytes plain;
    try {
      plain = sym::aead_open(gk_cspa_, msg.body(), Message::associated_data(MessageKind::M3));
    } catch (const AuthenticationFailure&) {
      return Rejection::DecryptFailure;
    }
    try {
      TlvReader t(plain);
      const auto th = t.get32(Field::TokenHash);
      const auto ps = t.get32(Field::Pseudonym);
      const SymmetricKey k{t.get32(Field::SessionKey), sym::KeyRole::Session};
      const auto t3 = sym::decode_timestamp(t.get(Field::Timestamp, 32));
      t.done();
      if (!fresh(now_ms, t3, window_)) return Rejection::StaleTimestamp;
      if (pending_.contains(ps) || served_.contains(ps)) return Rejection::DuplicatePending;
      pending_.emplace(ps, Pending{th, k});
    } catch (const Error&) {
      return Rejection::MalformedMessage;
    }
    return Accepted{};
  }

  // m4 carries its pseudonym only inside the ciphertext, so the RSU tries the
  // session keys of its pending entries.
  Result<Message> handle_m4(const Message& msg, std::uint64_t now_ms) {
    if (msg.kind != MessageKind::M4) return Rejection::WrongState;
    if (pending_.empty()) return Rejection::UnknownPseudonym;
    for (auto it = pending_.begin(); it != pending_.end(); ++it) {
      Bytes plain;
      try {
        plain = sym::aead_open(it->second.k_aes, msg.body(), Message::associated_data(MessageKind::M4));
      } catch (const AuthenticationFailure&) {
        continue;
      }
      Digest ps;
      Block32 n_rsu;
      std::uint64_t t4;
      try {
        TlvReader t(plain);
        ps = t.get32(Field::Pseudonym);
        n_rsu = t.get32(Field::NonceRsu);
        t4 = sym::decode_timestamp(t.get(Field::Timestamp, 32));
        t.done();
      } catch (const Error&) {
        return Rejection::MalformedMessage;
      }
      if (ps != it->first) return Rejection::UnknownPseudonym;
      if (!fresh(now_ms, t4, window_)) return Rejection::StaleTimestamp;

      const auto m_ev = rng_.block32();
      const auto entry = it->second;
      pending_.erase(it);
      served_.insert(ps);
      chain_.emplace(entry.token_hash, sym::sha256(m_ev), n_);
      // m5 = E_{K_AES}{N_RSU + 1, M_EV, t5, n}
      const auto body = TlvWriter()
                            .put(Field::NonceRsuReply, sym::to_be32(sym::add_mod256(sym::from_be32(n_rsu), 1)))
                            .put(Field::ChainNonce, m_ev)
                            .put(Field::Timestamp, sym::encode_timestamp(now_ms))
                            .put_u32(Field::ChainLength, n_)
                            .take();
      return make_message(MessageKind::M5, "RSU", "EV",
                          sym::aead_seal(entry.k_aes, body, Message::associated_data(MessageKind::M5), rng_));
    }
    return Rejection::DecryptFailure;
  }

  // m6 = E_{GK_RSU-CP}{link[n]}
  Result<Message> provision_first_cp() {
    if (!chain_) return Rejection::WrongState;
    const auto body = TlvWriter().put(Field::ChainValue, chain_->head()).take();
    return make_message(MessageKind::M6, "RSU", pad_name(1),
                        sym::aead_seal(gk_cp_, body, Message::associated_data(MessageKind::M6), rng_));
  }

 private:
  SymmetricKey gk_cspa_, gk_cp_;
  std::uint32_t n_;
  std::map<Digest, Pending> pending_;
  std::set<Digest> served_;
  std::optional<sym::HashChain> chain_;
  SeededRandomSource rng_;
  std::uint64_t window_;
};

struct PadAccept {
  std::optional<Message> forward;  // m8 to the next pad
};

class ChargingPad {
 public:
  ChargingPad(std::size_t index, std::size_t lane_length, SymmetricKey gk_rsu_cp, SeededRandomSource rng)
      : j_(index), lane_(lane_length), gk_(gk_rsu_cp), rng_(std::move(rng)) {}

  std::size_t index() const { return j_; }
  bool provisioned() const { return expected_.has_value(); }
  bool consumed() const { return consumed_; }
  std::size_t charge_events() const { return charges_; }
  const std::optional<Digest>& expected_head() const { return expected_; }

  // m6 from the RSU at pad 1, m8 from the previous pad elsewhere.
  Result<Accepted> handle_provisioning(const Message& msg) {
    const auto expected_kind = j_ == 1 ? MessageKind::M6 : MessageKind::M8;
    if (msg.kind != expected_kind) return Rejection::WrongState;
    if (expected_) return Rejection::AlreadyConsumed;
    Bytes plain;
    try {
      plain = sym::aead_open(gk_, msg.body(), Message::associated_data(msg.kind));
    } catch (const AuthenticationFailure&) {
      return Rejection::DecryptFailure;
    }
    try {
      TlvReader t(plain);
      expected_ = t.get32(Field::ChainValue);
      t.done();
    } catch (const Error&) {
      return Rejection::MalformedMessage;
    }
    return Accepted{};
  }

  Result<PadAccept> handle_chain(const Message& msg) {
    if (msg.kind != MessageKind::M7 && msg.kind != MessageKind::M9 && msg.kind != MessageKind::ChainStep)
      return Rejection::WrongState;
    if (!expected_) return Rejection::NotProvisioned;
    if (consumed_) return Rejection::AlreadyConsumed;
    if (msg.body().size() != 32) return Rejection::MalformedMessage;
    const auto candidate = to_block32(msg.body());
    if (!sym::chain_verify(candidate, *expected_)) return Rejection::ChainMismatch;
    consumed_ = true;
    ++charges_;
    PadAccept out;
    if (j_ < lane_) {
      const auto body = TlvWriter().put(Field::ChainValue, candidate).take();
      out.forward = make_message(MessageKind::M8, pad_name(j_), pad_name(j_ + 1),
                                 sym::aead_seal(gk_, body, Message::associated_data(MessageKind::M8), rng_));
    }
    return out;
  }

 private:
  std::size_t j_, lane_;
  SymmetricKey gk_;
  SeededRandomSource rng_;
  std::optional<Digest> expected_;
  bool consumed_ = false;
  std::size_t charges_ = 0;
};

}  // namespace dynamiqs::protocol
