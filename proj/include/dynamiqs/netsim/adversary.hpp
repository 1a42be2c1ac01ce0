#pragma once

#include <algorithm>

#include "dynamiqs/netsim/simulator.hpp"

namespace dynamiqs::netsim {

struct AttackAction {
  std::string description;
  MessageKind kind = MessageKind::M1;
  std::string target;
  std::string verdict;
  bool accepted = false;
};

struct AttackReport {
  std::string scenario;
  std::vector<AttackAction> actions;
  std::vector<SessionOutcome> honest;  // honest sessions run alongside
  protocol::Transcript transcript;

  std::size_t accepted_count() const {
    return static_cast<std::size_t>(std::count_if(actions.begin(), actions.end(), [](const auto& a) { return a.accepted; }));
  }
  bool rejected_with(Rejection r) const {
    return std::any_of(actions.begin(), actions.end(),
                       [&](const auto& a) { return a.verdict == protocol::to_string(r); });
  }
};

inline const std::vector<std::string>& attack_scenarios() {
  static const std::vector<std::string> names{"replay-m7", "pseudonym-reuse", "forge-m4", "double-spend",
                                              "stale-timestamp", "free-ride"};
  return names;
}

namespace detail {

template <typename R>
std::string verdict_of(const R& r) {
  return r.ok() ? "accept" : std::string(protocol::to_string(r.rejection()));
}

class Attacker {
 public:
  Attacker(Network& net, AttackReport& report) : net_(net), report_(report) {}

  template <typename Handler>
  void inject(std::string description, const Message& m, Handler&& handler) {
    auto r = net_.transmit(m, 0, std::forward<Handler>(handler), true);
    report_.actions.push_back({std::move(description), m.kind, m.receiver, verdict_of(r), r.ok()});
  }

  void to_pad(std::string description, const Message& m, std::size_t j) {
    auto copy = m;
    copy.receiver = pad_name(j);
    inject(std::move(description), copy, [&](std::uint64_t) { return net_.pads.at(j - 1).handle_chain(copy); });
  }
  void to_cspa(std::string description, const Message& m) {
    inject(std::move(description), m, [&](std::uint64_t now) { return net_.cspa.handle_m1(m, now); });
  }
  void to_rsu(std::string description, const Message& m) {
    if (m.kind == MessageKind::M3)
      inject(std::move(description), m, [&](std::uint64_t now) { return net_.rsu.handle_m3(m, now); });
    else
      inject(std::move(description), m, [&](std::uint64_t now) { return net_.rsu.handle_m4(m, now); });
  }

 private:
  Network& net_;
  AttackReport& report_;
};

// Keeps a copy of every honest message by kind and receiver.
struct Recorder {
  std::vector<Message> seen;
  void attach(Network& net) {
    net.observer = [this](const Message& m, bool) { seen.push_back(m); };
  }
  const Message* find(MessageKind k, std::string_view receiver = {}) const {
    for (const auto& m : seen)
      if (m.kind == k && (receiver.empty() || m.receiver == receiver)) return &m;
    return nullptr;
  }
};

}  // namespace detail

// Runs one named adversary scenario against a lane of n pads. Every injected
// or delayed message is an action; a sound protocol accepts none of them.
inline AttackReport run_attack(const Deployment& dep, std::string_view scenario, std::uint32_t n_pads,
                               const SimConfig& cfg, std::uint64_t seed) {
  if (n_pads < 2) throw InvalidParams("attack scenarios need at least two pads");
  if (dep.vehicle.entries.size() < 6) throw InvalidParams("attack scenarios need six pseudonyms");
  AttackReport report;
  report.scenario = std::string(scenario);
  const auto base = SeededRandomSource(seed).derive("attack|" + report.scenario);
  Network net(dep, n_pads, cfg, base.derive("lane"));
  detail::Attacker atk(net, report);
  detail::Recorder rec;
  rec.attach(net);

  if (scenario == "replay-m7") {
    // Replay the first pad's value at pad 2 while it waits for the EV, then
    // at pad 1 after it has been used.
    bool done = false;
    net.observer = [&](const Message& m, bool) {
      rec.seen.push_back(m);
      if (!done && m.kind == MessageKind::M8 && m.receiver == pad_name(2)) {
        done = true;
        atk.to_pad("replay m7 at the next pad", *rec.find(MessageKind::M7), 2);
      }
    };
    auto ev = net.new_session(0);
    report.honest.push_back(run_session(net, ev));
    net.observer = nullptr;
    atk.to_pad("replay m7 at the first pad", *rec.find(MessageKind::M7), 1);
  } else if (scenario == "pseudonym-reuse") {
    auto ev = net.new_session(0);
    report.honest.push_back(run_session(net, ev));
    net.observer = nullptr;
    atk.to_cspa("replay captured m1", *rec.find(MessageKind::M1));
    // A cloned OBU that forgot the pseudonym was spent.
    auto clone_entry = dep.vehicle.entries[0];
    clone_entry.used = false;
    EvSession clone(dep.ra.mpk(), dep.cspa_id, clone_entry, base.derive("clone"), cfg.window_ms);
    auto m1 = clone.compose_m1(net.now_ms());
    atk.to_cspa("fresh m1 under a spent pseudonym", m1.value());
  } else if (scenario == "forge-m4") {
    // The attacker knows PS but not the session key.
    const auto& entry = dep.vehicle.entries[0];
    auto forge = [&](std::uint64_t now, SeededRandomSource& rng) {
      const sym::SymmetricKey k{rng.block32(), sym::KeyRole::Session};
      const auto body = protocol::TlvWriter()
                            .put(protocol::Field::Pseudonym, entry.pseudonym.value)
                            .put(protocol::Field::NonceRsu, rng.block32())
                            .put(protocol::Field::Timestamp, sym::encode_timestamp(now))
                            .take();
      return protocol::make_message(
          MessageKind::M4, "EV", "RSU",
          sym::aead_seal(k, body, Message::associated_data(MessageKind::M4), rng));
    };
    auto rng = base.derive("forge");
    bool done = false;
    net.observer = [&](const Message& m, bool) {
      rec.seen.push_back(m);
      if (!done && m.kind == MessageKind::M3) {
        done = true;
        atk.to_rsu("m4 under a guessed session key while pending", forge(net.now_ms(), rng));
      }
    };
    auto ev = net.new_session(0);
    report.honest.push_back(run_session(net, ev));
    net.observer = nullptr;
    atk.to_rsu("m4 under a guessed session key after service", forge(net.now_ms(), rng));
    atk.to_rsu("replay honest m4", *rec.find(MessageKind::M4));
  } else if (scenario == "double-spend") {
    auto ev = net.new_session(0);
    report.honest.push_back(run_session(net, ev));
    net.observer = nullptr;
    std::vector<Message> values;
    for (const auto& m : rec.seen)
      if (m.kind == MessageKind::M7 || m.kind == MessageKind::M9 || m.kind == MessageKind::ChainStep)
        values.push_back(m);
    for (const auto& v : values)
      for (std::size_t j = 1; j <= n_pads; ++j) atk.to_pad("replay chain value", v, j);
    atk.to_rsu("replay m3", *rec.find(MessageKind::M3));
    atk.to_rsu("replay m4", *rec.find(MessageKind::M4));
    atk.to_cspa("replay m1", *rec.find(MessageKind::M1));
  } else if (scenario == "stale-timestamp") {
    // One session per delayed message, each on its own pseudonym and lane.
    const Picos late = static_cast<Picos>(cfg.window_ms + 1) * kPicosPerMs;
    const MessageKind kinds[] = {MessageKind::M1, MessageKind::M2, MessageKind::M3, MessageKind::M4, MessageKind::M5};
    for (std::size_t i = 0; i < 5; ++i) {
      Network lane(dep, n_pads, cfg, base.derive("stale" + std::to_string(i)));
      const auto kind = kinds[i];
      lane.delay_hook = [&](const Message& m) { return m.kind == kind ? late : Picos{0}; };
      auto ev = lane.new_session(i + 1);
      const auto out = run_session(lane, ev);
      report.honest.push_back(out);
      for (const auto& e : lane.transcript().events)
        if (e.adversarial)
          report.actions.push_back({"deliver " + std::string(protocol::to_string(e.kind)) + " past the window",
                                    e.kind, e.receiver, e.verdict, e.verdict == "accept"});
      const auto& ev_log = lane.transcript().events;
      report.transcript.events.insert(report.transcript.events.end(), ev_log.begin(), ev_log.end());
      const auto& w = lane.transcript().wire_bytes;
      report.transcript.wire_bytes.insert(report.transcript.wire_bytes.end(), w.begin(), w.end());
    }
  } else if (scenario == "free-ride") {
    // Random guesses at a provisioned pad that the EV has not reached.
    bool done = false;
    auto rng = base.derive("guess");
    net.observer = [&](const Message& m, bool) {
      rec.seen.push_back(m);
      if (!done && m.kind == MessageKind::M6) {
        done = true;
        for (int i = 0; i < 10'000; ++i)
          atk.to_pad("random chain value", protocol::make_message(MessageKind::M7, "ATK", pad_name(1), rng.block32()), 1);
      }
    };
    auto ev = net.new_session(0);
    report.honest.push_back(run_session(net, ev));
  } else {
    throw InvalidParams("unknown attack scenario: " + report.scenario);
  }
  if (scenario != "stale-timestamp") report.transcript = net.transcript();
  return report;
}

// Whether the long-term identity or its key ever crossed the network.
inline bool transcript_leaks_identity(const protocol::Transcript& t, const pki::VehicleCredentials& v) {
  auto contains = [&](ByteView needle) {
    if (needle.empty()) return false;
    return std::search(t.wire_bytes.begin(), t.wire_bytes.end(), needle.begin(), needle.end()) != t.wire_bytes.end();
  };
  const auto d = sym::to_be32(v.d_ev);
  return contains(v.id_ev) || contains(d);
}

}  // namespace dynamiqs::netsim
