#pragma once

#include <functional>

#include "dynamiqs/netsim/model.hpp"
#include "dynamiqs/protocol/parties.hpp"
#include "dynamiqs/protocol/transcript.hpp"

namespace dynamiqs::netsim {

using protocol::EvSession;
using protocol::Message;
using protocol::pad_name;
using protocol::Rejection;

// How the EV obtains link[n - j] for pads after the first: kept from the
// initial chain build, or recomputed from the chain base each time (the
// accounting behind the asymptotic cost row).
enum class ChainPolicy { Stored, Recompute };

inline std::string_view to_string(ChainPolicy p) { return p == ChainPolicy::Stored ? "stored" : "recompute"; }

inline ChainPolicy chain_policy_from(std::string_view s) {
  if (s == "stored") return ChainPolicy::Stored;
  if (s == "recompute") return ChainPolicy::Recompute;
  throw InvalidParams("unknown chain policy: " + std::string(s));
}

struct SimConfig {
  TimingModel timing;
  ChannelSet channels;
  ChainPolicy policy = ChainPolicy::Stored;
  std::uint64_t window_ms = protocol::kDefaultFreshnessMs;
  std::uint64_t start_ms = 1'700'000'000'000;  // simulated epoch of the first message
};

inline sym::SymmetricKey group_key(const Block32& seed, sym::KeyRole role) {
  auto rng = SeededRandomSource(seed).derive(std::string("group-key|") + sym::to_string(role));
  return {rng.block32(), role};
}

// Everything the registration phase hands to the online parties.
struct Deployment {
  pki::RegistrationAuthority ra;
  std::string cspa_id;
  ibe::UserSecretKey cspa_key;
  pki::VehicleCredentials vehicle;
  pki::CspaDataset dataset;
  sym::SymmetricKey gk_cspa_rsu;
  sym::SymmetricKey gk_rsu_cp;
};

inline Deployment make_deployment(pki::RegistrationAuthority ra, std::string cspa_id, pki::VehicleCredentials vehicle,
                                  pki::CspaDataset dataset) {
  auto key = ra.cspa_key(cspa_id);
  const auto gk1 = group_key(ra.seed(), sym::KeyRole::GroupCspaRsu);
  const auto gk2 = group_key(ra.seed(), sym::KeyRole::GroupRsuCp);
  return {std::move(ra), std::move(cspa_id), std::move(key), std::move(vehicle), std::move(dataset), gk1, gk2};
}

inline Deployment make_deployment(const ring::RingParams& params, std::uint64_t seed, std::size_t pseudonyms = 8,
                                  std::string_view vehicle_id = "EV-0001", std::string_view cspa_id = "CSPA-1") {
  auto ra = pki::ra_setup(params, seed);
  ra.register_cspa(cspa_id);
  auto vehicle = ra.register_vehicle(as_view(vehicle_id), pseudonyms);
  auto dataset = ra.export_cspa_dataset();
  return make_deployment(std::move(ra), std::string(cspa_id), std::move(vehicle), std::move(dataset));
}

// One lane: CSPA, RSU and n pads sharing a simulated clock and transcript.
class Network {
  const Deployment& dep_;
  SimConfig cfg_;
  SeededRandomSource rng_;
  Picos clock_ = 0;
  std::size_t session_counter_ = 0;
  std::size_t pad_generation_ = 0;
  protocol::Transcript transcript_;

 public:
  Network(const Deployment& dep, std::uint32_t n_pads, SimConfig cfg, const SeededRandomSource& rng)
      : dep_(dep),
        cfg_(cfg),
        rng_(rng),
        cspa(dep.cspa_id, dep.cspa_key, dep.ra.mpk(), dep.dataset, dep.gk_cspa_rsu, rng.derive("cspa"),
             cfg.window_ms),
        rsu(dep.gk_cspa_rsu, dep.gk_rsu_cp, n_pads, rng.derive("rsu"), cfg.window_ms) {
    cfg_.timing.validate();
    reset_pads();
  }

  const SimConfig& config() const { return cfg_; }
  std::uint32_t n_pads() const { return rsu.n_pads(); }
  Picos clock() const { return clock_; }
  std::uint64_t now_ms() const { return cfg_.start_ms + static_cast<std::uint64_t>(clock_ / kPicosPerMs); }
  const protocol::Transcript& transcript() const { return transcript_; }
  const Deployment& deployment() const { return dep_; }

  // Pads hold per-session provisioning; a new vehicle pass gets fresh pads.
  void reset_pads() {
    pads.clear();
    for (std::size_t j = 1; j <= rsu.n_pads(); ++j)
      pads.emplace_back(j, rsu.n_pads(), dep_.gk_rsu_cp, rng_.derive("cp" + std::to_string(j) + "|" +
                                                                    std::to_string(pad_generation_)));
    ++pad_generation_;
  }

  EvSession new_session(std::size_t entry_index) {
    return EvSession(dep_.ra.mpk(), dep_.cspa_id, dep_.vehicle.entries.at(entry_index),
                     rng_.derive("ev" + std::to_string(session_counter_++)), cfg_.window_ms);
  }

  // Sends `m` after `computation` of local work plus `delay`, hands it to
  // `handler` at the delivery time and logs the verdict.
  template <typename Handler>
  auto transmit(const Message& m, Picos computation, Handler&& handler, bool adversarial = false, Picos delay = 0) {
    const Picos sending = sending_time(m.kind, cfg_.channels);
    if (!adversarial && delay_hook) {
      delay += delay_hook(m);
      adversarial = delay > 0;
    }
    clock_ += computation + sending + delay;
    auto result = handler(now_ms());
    protocol::TraceEvent e;
    e.sim_time_ps = clock_;
    e.computation_ps = computation;
    e.sending_ps = sending;
    e.verdict = result.ok() ? "accept" : std::string(protocol::to_string(result.rejection()));
    e.adversarial = adversarial;
    transcript_.add(m, std::move(e));
    if (!adversarial && observer) observer(m, result.ok());
    return result;
  }

  // Adversary hooks: extra delivery delay for honest messages, and a callback
  // after each honest delivery.
  std::function<Picos(const Message&)> delay_hook;
  std::function<void(const Message&, bool)> observer;

  protocol::Cspa cspa;
  protocol::Rsu rsu;
  std::vector<protocol::ChargingPad> pads;

};

struct SessionOutcome {
  bool done = false;
  std::optional<Rejection> rejection;
  std::string failed_at;
  std::size_t accepts = 0;
  Picos first_pad_time = 0;  // clock when pad 1 accepted
};

// Drives one honest session to completion or first rejection.
inline SessionOutcome run_session(Network& net, EvSession& ev) {
  SessionOutcome out;
  const auto& t = net.config().timing;
  const auto n = net.n_pads();
  auto fail = [&](Rejection r, std::string where) {
    out.rejection = r;
    out.failed_at = std::move(where);
    return out;
  };

  auto m1 = ev.compose_m1(net.now_ms());
  if (!m1) return fail(m1.rejection(), "m1");
  auto cspa_out = net.transmit(m1.value(), computation_cost(MessageKind::M1, t),
                               [&](std::uint64_t now) { return net.cspa.handle_m1(m1.value(), now); });
  if (!cspa_out) return fail(cspa_out.rejection(), "m1");
  auto r2 = net.transmit(cspa_out->m2, computation_cost(MessageKind::M2, t),
                         [&](std::uint64_t now) { return ev.handle_m2(cspa_out->m2, now); });
  if (!r2) return fail(r2.rejection(), "m2");
  auto r3 = net.transmit(cspa_out->m3, computation_cost(MessageKind::M3, t),
                         [&](std::uint64_t now) { return net.rsu.handle_m3(cspa_out->m3, now); });
  if (!r3) return fail(r3.rejection(), "m3");

  auto m4 = ev.compose_m4(net.now_ms());
  if (!m4) return fail(m4.rejection(), "m4");
  auto m5 = net.transmit(m4.value(), computation_cost(MessageKind::M4, t),
                         [&](std::uint64_t now) { return net.rsu.handle_m4(m4.value(), now); });
  if (!m5) return fail(m5.rejection(), "m4");
  auto r5 = net.transmit(m5.value(), computation_cost(MessageKind::M5, t),
                         [&](std::uint64_t now) { return ev.handle_m5(m5.value(), now); });
  if (!r5) return fail(r5.rejection(), "m5");

  auto m6 = net.rsu.provision_first_cp();
  if (!m6) return fail(m6.rejection(), "m6");
  auto r6 = net.transmit(m6.value(), computation_cost(MessageKind::M6, t),
                         [&](std::uint64_t) { return net.pads[0].handle_provisioning(m6.value()); });
  if (!r6) return fail(r6.rejection(), "m6");

  for (std::size_t j = 1; j <= n; ++j) {
    auto value = ev.compose_chain_value(j);
    if (!value) return fail(value.rejection(), "pad " + std::to_string(j));
    Picos cost = t.t_sha;  // the pad's check
    if (j == 1)
      cost += computation_cost(MessageKind::M7, t, n);
    else if (net.config().policy == ChainPolicy::Recompute)
      cost += static_cast<Picos>(n - j + 1) * t.t_sha;
    auto& pad = net.pads[j - 1];
    auto accepted = net.transmit(value.value(), cost, [&](std::uint64_t) { return pad.handle_chain(value.value()); });
    ev.pad_result(j, accepted.ok());
    if (!accepted) return fail(accepted.rejection(), "pad " + std::to_string(j));
    ++out.accepts;
    if (j == 1) out.first_pad_time = net.clock();
    if (accepted->forward) {
      const auto& m8 = *accepted->forward;
      auto r8 = net.transmit(m8, computation_cost(MessageKind::M8, t),
                             [&](std::uint64_t) { return net.pads[j].handle_provisioning(m8); });
      if (!r8) return fail(r8.rejection(), "m8 to pad " + std::to_string(j + 1));
    }
  }
  out.done = ev.state() == protocol::EvState::Done;
  return out;
}

struct SessionTrace {
  std::uint64_t seed = 0;
  std::uint32_t n_pads = 0;
  SimConfig config;
  protocol::Transcript transcript;
  SessionOutcome outcome;

  Picos total_computation = 0;
  Picos total_sending = 0;
  std::size_t total_bytes = 0;  // nominal
  std::size_t total_wire_bytes = 0;
  Picos first_pad_computation = 0;  // events through m7
  Picos first_pad_sending = 0;
  std::size_t first_pad_bytes = 0;

  double total_ms() const { return to_ms(total_computation + total_sending); }

  std::string to_jsonl() const {
    nlohmann::ordered_json head;
    head["type"] = "header";
    head["seed"] = seed;
    head["n_pads"] = n_pads;
    head["timing_mode"] = std::string(to_string(config.timing.mode));
    head["chain_policy"] = std::string(to_string(config.policy));
    head["window_ms"] = config.window_ms;
    std::string out = head.dump() + "\n";
    out += transcript.to_jsonl();
    nlohmann::ordered_json tail;
    tail["type"] = "summary";
    tail["done"] = outcome.done;
    tail["accepts"] = outcome.accepts;
    tail["rejection"] = outcome.rejection ? std::string(protocol::to_string(*outcome.rejection)) : "";
    tail["first_pad_computation_ms"] = to_ms(first_pad_computation);
    tail["first_pad_sending_us"] = to_us(first_pad_sending);
    tail["first_pad_bytes"] = first_pad_bytes;
    tail["total_computation_ms"] = to_ms(total_computation);
    tail["total_sending_us"] = to_us(total_sending);
    tail["total_bytes"] = total_bytes;
    tail["total_wire_bytes"] = total_wire_bytes;
    out += tail.dump() + "\n";
    return out;
  }
};

inline SessionTrace summarize(const Network& net, const SessionOutcome& outcome, std::uint64_t seed) {
  SessionTrace tr;
  tr.seed = seed;
  tr.n_pads = net.n_pads();
  tr.config = net.config();
  tr.transcript = net.transcript();
  tr.outcome = outcome;
  bool before_pad2 = true;
  for (const auto& e : tr.transcript.events) {
    tr.total_computation += e.computation_ps;
    tr.total_sending += e.sending_ps;
    tr.total_bytes += e.nominal_size;
    tr.total_wire_bytes += e.wire_size;
    if (before_pad2) {
      tr.first_pad_computation += e.computation_ps;
      tr.first_pad_sending += e.sending_ps;
      tr.first_pad_bytes += e.nominal_size;
    }
    if (e.kind == MessageKind::M7) before_pad2 = false;
  }
  return tr;
}

inline SessionTrace simulate_session(const Deployment& dep, std::uint32_t n_pads, const SimConfig& cfg,
                                     std::uint64_t seed, std::size_t entry_index = 0) {
  if (n_pads == 0) throw InvalidParams("lane needs at least one pad");
  Network net(dep, n_pads, cfg, SeededRandomSource(seed).derive("session"));
  auto ev = net.new_session(entry_index);
  const auto outcome = run_session(net, ev);
  return summarize(net, outcome, seed);
}

inline SessionTrace simulate_session(std::uint32_t n_pads, const TimingModel& timing, const ChannelSet& channels,
                                     std::uint64_t seed) {
  const auto dep = make_deployment(ring::RingParams::standard(), seed);
  SimConfig cfg;
  cfg.timing = timing;
  cfg.channels = channels;
  return simulate_session(dep, n_pads, cfg, seed);
}

}  // namespace dynamiqs::netsim
