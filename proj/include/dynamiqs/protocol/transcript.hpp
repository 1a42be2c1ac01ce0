#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

#include "dynamiqs/protocol/messages.hpp"

namespace dynamiqs::protocol {

struct TraceEvent {
  std::int64_t sim_time_ps = 0;  // delivery time
  MessageKind kind = MessageKind::M1;
  std::string sender;
  std::string receiver;
  std::int64_t computation_ps = 0;
  std::int64_t sending_ps = 0;
  std::size_t nominal_size = 0;
  std::size_t wire_size = 0;
  std::string verdict;  // "accept" or a rejection name
  bool adversarial = false;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

inline nlohmann::ordered_json to_json(const TraceEvent& e) {
  nlohmann::ordered_json j;
  j["kind"] = std::string(to_string(e.kind));
  j["sender"] = e.sender;
  j["receiver"] = e.receiver;
  j["sim_time_ms"] = static_cast<double>(e.sim_time_ps) / 1e9;
  j["sim_time_ps"] = e.sim_time_ps;
  j["computation_ms"] = static_cast<double>(e.computation_ps) / 1e9;
  j["sending_us"] = static_cast<double>(e.sending_ps) / 1e6;
  j["nominal_size"] = e.nominal_size;
  j["wire_size"] = e.wire_size;
  j["verdict"] = e.verdict;
  if (e.adversarial) j["adversarial"] = true;
  return j;
}

// Ordered message log plus every wire byte that crossed the network.
struct Transcript {
  std::vector<TraceEvent> events;
  Bytes wire_bytes;

  void add(const Message& m, TraceEvent e) {
    e.kind = m.kind;
    e.sender = m.sender;
    e.receiver = m.receiver;
    e.nominal_size = m.nominal_size();
    e.wire_size = m.wire.size();
    wire_bytes.insert(wire_bytes.end(), m.wire.begin(), m.wire.end());
    events.push_back(std::move(e));
  }

  std::string to_jsonl() const {
    std::string out;
    for (const auto& e : events) out += to_json(e).dump() + "\n";
    return out;
  }
};

}  // namespace dynamiqs::protocol
