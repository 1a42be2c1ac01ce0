#include <gtest/gtest.h>

#include <set>

#include "deployment.hpp"
#include "dynamiqs/protocol/parties.hpp"

using namespace dynamiqs;
using namespace dynamiqs::protocol;
using dynamiqs::testing::shared_deployment;

namespace {

constexpr std::uint64_t kNow = 1'700'000'000'000;

struct Parties {
  const netsim::Deployment& dep = shared_deployment();
  SeededRandomSource rng{std::uint64_t{77}};
  Cspa cspa{dep.cspa_id, dep.cspa_key, dep.ra.mpk(), dep.dataset, dep.gk_cspa_rsu, rng.derive("cspa")};
  Rsu rsu{dep.gk_cspa_rsu, dep.gk_rsu_cp, 3, rng.derive("rsu")};
  std::vector<ChargingPad> pads;

  Parties() {
    for (std::size_t j = 1; j <= 3; ++j) pads.emplace_back(j, 3, dep.gk_rsu_cp, rng.derive("cp" + std::to_string(j)));
  }

  EvSession ev(std::size_t entry = 0, std::string label = "ev") const {
    return EvSession(dep.ra.mpk(), dep.cspa_id, dep.vehicle.entries.at(entry), rng.derive(label));
  }
};

// Runs m1..m5 and returns the outputs so later steps can be poked at.
struct Handshake {
  Message m1, m2, m3, m4, m5;
};

Handshake handshake(Parties& p, EvSession& ev) {
  Handshake h;
  h.m1 = ev.compose_m1(kNow).value();
  auto out = p.cspa.handle_m1(h.m1, kNow);
  EXPECT_TRUE(out.ok());
  h.m2 = out->m2;
  h.m3 = out->m3;
  EXPECT_TRUE(ev.handle_m2(h.m2, kNow).ok());
  EXPECT_TRUE(p.rsu.handle_m3(h.m3, kNow).ok());
  h.m4 = ev.compose_m4(kNow).value();
  auto m5 = p.rsu.handle_m4(h.m4, kNow);
  EXPECT_TRUE(m5.ok());
  h.m5 = m5.value();
  EXPECT_TRUE(ev.handle_m5(h.m5, kNow).ok());
  return h;
}

}  // namespace

TEST(Freshness, WindowIsInclusiveAndSymmetric) {
  EXPECT_TRUE(fresh(1000, 1000, 0));
  EXPECT_TRUE(fresh(3000, 1000, 2000));
  EXPECT_FALSE(fresh(3001, 1000, 2000));
  EXPECT_TRUE(fresh(1000, 3000, 2000));
  EXPECT_FALSE(fresh(1000, 3001, 2000));
}

TEST(Messages, WireStartsWithKindAndTlvRoundTrips) {
  const auto m = make_message(MessageKind::M7, "EV", "CP1", Bytes(32, 7));
  EXPECT_EQ(m.wire.size(), 33u);
  EXPECT_EQ(m.wire[0], 7);
  EXPECT_EQ(m.body().size(), 32u);
  EXPECT_EQ(m.nominal_size(), 32u);
  EXPECT_EQ(nominal_size(MessageKind::M1), 128u);
  EXPECT_EQ(nominal_size(MessageKind::M5), 96u);

  const Block32 a{1, 2, 3};
  const auto body = TlvWriter().put(Field::Token, a).put_u32(Field::ChainLength, 200).take();
  TlvReader r(body);
  EXPECT_EQ(r.get32(Field::Token), a);
  EXPECT_EQ(r.get_u32(Field::ChainLength), 200u);
  r.done();

  TlvReader wrong_tag(body);
  EXPECT_THROW(wrong_tag.get32(Field::NonceEv), FormatError);
  TlvReader wrong_len(body);
  EXPECT_THROW(wrong_len.get(Field::Token, 16), FormatError);
  TlvReader trailing(body);
  trailing.get32(Field::Token);
  EXPECT_THROW(trailing.done(), FormatError);
}

TEST(Protocol, HonestHandshakeAndChain) {
  Parties p;
  auto ev = p.ev();
  const auto h = handshake(p, ev);
  EXPECT_EQ(ev.state(), EvState::AuthenticatedRsu);
  // Both ends derived the same chain head.
  ASSERT_TRUE(ev.chain() && p.rsu.active_chain());
  EXPECT_EQ(ev.chain()->head(), p.rsu.active_chain()->head());
  EXPECT_EQ(ev.chain()->length(), 3u);
  EXPECT_TRUE(p.cspa.dataset().find(ev.entry().pseudonym.value)->consumed);
  EXPECT_TRUE(p.rsu.pending().empty());

  ASSERT_TRUE(p.pads[0].handle_provisioning(p.rsu.provision_first_cp().value()).ok());
  for (std::size_t j = 1; j <= 3; ++j) {
    auto value = ev.compose_chain_value(j);
    ASSERT_TRUE(value.ok());
    EXPECT_EQ(value->kind, j == 1 ? MessageKind::M7 : j == 2 ? MessageKind::M9 : MessageKind::ChainStep);
    auto accepted = p.pads[j - 1].handle_chain(value.value());
    ASSERT_TRUE(accepted.ok()) << to_string(accepted.rejection());
    ev.pad_result(j, true);
    if (j < 3) {
      ASSERT_TRUE(accepted->forward.has_value());
      EXPECT_EQ(accepted->forward->kind, MessageKind::M8);
      ASSERT_TRUE(p.pads[j].handle_provisioning(*accepted->forward).ok());
    } else {
      EXPECT_FALSE(accepted->forward.has_value());
    }
  }
  EXPECT_EQ(ev.state(), EvState::Done);
  for (const auto& pad : p.pads) EXPECT_EQ(pad.charge_events(), 1u);
  EXPECT_EQ(h.m1.kind, MessageKind::M1);
}

TEST(Protocol, EvRefusesOutOfOrderAndSpentEntries) {
  Parties p;
  auto ev = p.ev();
  EXPECT_EQ(ev.compose_m4(kNow).rejection(), Rejection::WrongState);
  EXPECT_EQ(ev.compose_chain_value(1).rejection(), Rejection::WrongState);
  ASSERT_TRUE(ev.compose_m1(kNow).ok());
  EXPECT_EQ(ev.compose_m1(kNow).rejection(), Rejection::WrongState);

  auto spent_entry = p.dep.vehicle.entries[0];
  spent_entry.used = true;
  EvSession spent(p.dep.ra.mpk(), p.dep.cspa_id, spent_entry, p.rng.derive("spent"));
  EXPECT_EQ(spent.compose_m1(kNow).rejection(), Rejection::NoUnusedPseudonym);
}

TEST(Cspa, RejectsWrongRecipientTamperingAndMalformed) {
  Parties p;
  auto wrong = EvSession(p.dep.ra.mpk(), "CSPA-2", p.dep.vehicle.entries[0], p.rng.derive("w"));
  EXPECT_EQ(p.cspa.handle_m1(wrong.compose_m1(kNow).value(), kNow).rejection(), Rejection::DecryptFailure);

  auto ev = p.ev();
  auto m1 = ev.compose_m1(kNow).value();
  auto flipped = m1;
  flipped.wire.back() ^= 1;
  EXPECT_EQ(p.cspa.handle_m1(flipped, kNow).rejection(), Rejection::DecryptFailure);
  auto truncated = m1;
  truncated.wire.resize(10);
  EXPECT_EQ(p.cspa.handle_m1(truncated, kNow).rejection(), Rejection::DecryptFailure);
  auto relabeled = m1;
  relabeled.kind = MessageKind::M3;
  EXPECT_EQ(p.cspa.handle_m1(relabeled, kNow).rejection(), Rejection::WrongState);
  // Rejections above must not spend the pseudonym.
  EXPECT_FALSE(p.cspa.dataset().find(ev.entry().pseudonym.value)->consumed);
  EXPECT_TRUE(p.cspa.handle_m1(m1, kNow).ok());
}

TEST(Cspa, ChecksPseudonymSecretAndTimestamp) {
  Parties p;
  auto ev = p.ev();
  const auto m1 = ev.compose_m1(kNow).value();

  Cspa empty(p.dep.cspa_id, p.dep.cspa_key, p.dep.ra.mpk(), {}, p.dep.gk_cspa_rsu, p.rng.derive("e"));
  EXPECT_EQ(empty.handle_m1(m1, kNow).rejection(), Rejection::UnknownPseudonym);

  auto bad_z = p.dep.vehicle.entries[1];
  bad_z.z = sym::add_mod256(bad_z.z, 1);
  EvSession ev_bad(p.dep.ra.mpk(), p.dep.cspa_id, bad_z, p.rng.derive("z"));
  EXPECT_EQ(p.cspa.handle_m1(ev_bad.compose_m1(kNow).value(), kNow).rejection(), Rejection::SecretMismatch);

  EXPECT_EQ(p.cspa.handle_m1(m1, kNow + protocol::kDefaultFreshnessMs + 1).rejection(), Rejection::StaleTimestamp);
  EXPECT_TRUE(p.cspa.handle_m1(m1, kNow + protocol::kDefaultFreshnessMs).ok());
  EXPECT_EQ(p.cspa.handle_m1(m1, kNow).rejection(), Rejection::PseudonymReuse);
}

TEST(Ev, AuthenticatesCspaThroughSecretSum) {
  Parties p;
  // A CSPA whose record for the pseudonym carries a different w.
  auto ds = p.dep.dataset;
  const auto& ps = p.dep.vehicle.entries[0].pseudonym.value;
  ds.find(ps)->w = sym::add_mod256(ds.find(ps)->w, 5);
  Cspa impostor(p.dep.cspa_id, p.dep.cspa_key, p.dep.ra.mpk(), ds, p.dep.gk_cspa_rsu, p.rng.derive("i"));
  auto ev = p.ev();
  auto out = impostor.handle_m1(ev.compose_m1(kNow).value(), kNow);
  ASSERT_TRUE(out.ok());
  EXPECT_EQ(ev.handle_m2(out->m2, kNow).rejection(), Rejection::SecretMismatch);
  EXPECT_EQ(ev.state(), EvState::Aborted);
  EXPECT_EQ(ev.abort_reason(), Rejection::SecretMismatch);
}

TEST(Ev, RejectsTamperedAndStaleM2) {
  Parties p;
  auto ev = p.ev();
  auto out = p.cspa.handle_m1(ev.compose_m1(kNow).value(), kNow);
  ASSERT_TRUE(out.ok());
  auto tampered = out->m2;
  tampered.wire[tampered.wire.size() / 2] ^= 0x40;
  auto ev2 = p.ev(2, "ev2");
  auto out2 = p.cspa.handle_m1(ev2.compose_m1(kNow).value(), kNow);
  ASSERT_TRUE(out2.ok());
  EXPECT_EQ(ev.handle_m2(tampered, kNow).rejection(), Rejection::DecryptFailure);
  EXPECT_EQ(ev2.handle_m2(out2->m2, kNow + 2001).rejection(), Rejection::StaleTimestamp);
}

TEST(Rsu, RejectsForgedDuplicateAndUnknown) {
  Parties p;
  auto ev = p.ev();
  auto m4_early = [&] {
    auto e = p.ev(3, "early");
    auto out = p.cspa.handle_m1(e.compose_m1(kNow).value(), kNow);
    EXPECT_TRUE(e.handle_m2(out->m2, kNow).ok());
    return e.compose_m4(kNow).value();
  }();
  EXPECT_EQ(p.rsu.handle_m4(m4_early, kNow).rejection(), Rejection::UnknownPseudonym);

  auto out = p.cspa.handle_m1(ev.compose_m1(kNow).value(), kNow);
  ASSERT_TRUE(out.ok());
  auto bad = out->m3;
  bad.wire.back() ^= 1;
  EXPECT_EQ(p.rsu.handle_m3(bad, kNow).rejection(), Rejection::DecryptFailure);
  EXPECT_EQ(p.rsu.handle_m3(out->m3, kNow + 2001).rejection(), Rejection::StaleTimestamp);
  ASSERT_TRUE(p.rsu.handle_m3(out->m3, kNow).ok());
  EXPECT_EQ(p.rsu.handle_m3(out->m3, kNow).rejection(), Rejection::DuplicatePending);
  // m4 for a different session key does not open any pending entry.
  EXPECT_EQ(p.rsu.handle_m4(m4_early, kNow).rejection(), Rejection::DecryptFailure);

  ASSERT_TRUE(ev.handle_m2(out->m2, kNow).ok());
  const auto m4 = ev.compose_m4(kNow).value();
  EXPECT_EQ(p.rsu.handle_m4(m4, kNow + 2001).rejection(), Rejection::StaleTimestamp);
  ASSERT_TRUE(p.rsu.handle_m4(m4, kNow).ok());
  EXPECT_EQ(p.rsu.handle_m4(m4, kNow).rejection(), Rejection::UnknownPseudonym);
  EXPECT_EQ(p.rsu.handle_m3(out->m3, kNow).rejection(), Rejection::DuplicatePending);
}

TEST(Ev, RejectsStaleAndMisboundM5) {
  Parties p;
  auto ev = p.ev();
  auto out = p.cspa.handle_m1(ev.compose_m1(kNow).value(), kNow);
  ASSERT_TRUE(ev.handle_m2(out->m2, kNow).ok());
  ASSERT_TRUE(p.rsu.handle_m3(out->m3, kNow).ok());
  auto m5 = p.rsu.handle_m4(ev.compose_m4(kNow).value(), kNow).value();
  auto as_m3 = m5;
  as_m3.kind = MessageKind::M3;
  EXPECT_EQ(ev.handle_m5(as_m3, kNow).rejection(), Rejection::WrongState);
  EXPECT_EQ(ev.handle_m5(m5, kNow + 5000).rejection(), Rejection::StaleTimestamp);
  EXPECT_EQ(ev.state(), EvState::Aborted);
}

TEST(Pad, ProvisioningAndChainChecks) {
  Parties p;
  auto ev = p.ev();
  handshake(p, ev);
  const auto m6 = p.rsu.provision_first_cp().value();
  auto value = ev.compose_chain_value(1).value();

  EXPECT_EQ(p.pads[0].handle_chain(value).rejection(), Rejection::NotProvisioned);
  EXPECT_EQ(p.pads[1].handle_provisioning(m6).rejection(), Rejection::WrongState);
  // m6 relabeled as m8 changes the associated data.
  auto relabeled = m6;
  relabeled.kind = MessageKind::M8;
  relabeled.wire[0] = static_cast<std::uint8_t>(MessageKind::M8);
  EXPECT_EQ(p.pads[1].handle_provisioning(relabeled).rejection(), Rejection::DecryptFailure);
  ChargingPad foreign(1, 3, sym::SymmetricKey{Block32{9}, sym::KeyRole::GroupRsuCp}, p.rng.derive("f"));
  EXPECT_EQ(foreign.handle_provisioning(m6).rejection(), Rejection::DecryptFailure);

  ASSERT_TRUE(p.pads[0].handle_provisioning(m6).ok());
  EXPECT_EQ(p.pads[0].handle_provisioning(m6).rejection(), Rejection::AlreadyConsumed);
  auto wrong = value;
  wrong.wire.back() ^= 1;
  EXPECT_EQ(p.pads[0].handle_chain(wrong).rejection(), Rejection::ChainMismatch);
  auto short_value = value;
  short_value.wire.pop_back();
  EXPECT_EQ(p.pads[0].handle_chain(short_value).rejection(), Rejection::MalformedMessage);
  EXPECT_TRUE(p.pads[0].handle_chain(value).ok());
  EXPECT_EQ(p.pads[0].handle_chain(value).rejection(), Rejection::AlreadyConsumed);
  EXPECT_EQ(p.pads[0].charge_events(), 1u);
}

TEST(Ev, PadRejectionAbortsSession) {
  Parties p;
  auto ev = p.ev();
  handshake(p, ev);
  ASSERT_TRUE(ev.compose_chain_value(1).ok());
  EXPECT_EQ(ev.compose_chain_value(2).rejection(), Rejection::WrongState);
  ev.pad_result(1, false);
  EXPECT_EQ(ev.state(), EvState::Aborted);
  EXPECT_EQ(ev.abort_reason(), Rejection::ChainMismatch);
}

TEST(Rejection, NamesAreDistinct) {
  std::set<std::string_view> names;
  for (int r = 0; r <= static_cast<int>(Rejection::MalformedMessage); ++r)
    names.insert(to_string(static_cast<Rejection>(r)));
  EXPECT_EQ(names.size(), 13u);
}
