#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "dynamiqs/errors.hpp"
#include "dynamiqs/protocol/messages.hpp"

namespace dynamiqs::netsim {

using protocol::MessageKind;

// Durations are integer picoseconds so that sums are exact.
using Picos = std::int64_t;

inline constexpr Picos kPicosPerMs = 1'000'000'000;
inline constexpr Picos kPicosPerUs = 1'000'000;

inline Picos from_ms(double ms) { return static_cast<Picos>(std::llround(ms * 1e9)); }
inline double to_ms(Picos p) { return static_cast<double>(p) / 1e9; }
inline double to_us(Picos p) { return static_cast<double>(p) / 1e6; }

enum class TimingMode { RoundedTable, CycleAccurate };

inline std::string_view to_string(TimingMode m) {
  return m == TimingMode::RoundedTable ? "rounded-table" : "cycle-accurate";
}

inline TimingMode timing_mode_from(std::string_view s) {
  if (s == "rounded-table") return TimingMode::RoundedTable;
  if (s == "cycle-accurate") return TimingMode::CycleAccurate;
  throw InvalidParams("unknown timing mode: " + std::string(s));
}

struct PrimitiveCycles {
  std::uint64_t ibe_enc = 3'297'380;
  std::uint64_t ibe_dec = 1'155'000;
  std::uint64_t aes = 10'611;
  std::uint64_t sha = 11'561;
};

struct TimingModel {
  TimingMode mode = TimingMode::RoundedTable;
  Picos t_ibe_enc = 103 * kPicosPerMs;
  Picos t_ibe_dec = 36 * kPicosPerMs;
  Picos t_aes = 330'000'000;
  Picos t_sha = 360'000'000;

  static TimingModel rounded_table() { return {}; }

  static TimingModel rounded_table(double enc_ms, double dec_ms, double aes_ms, double sha_ms) {
    TimingModel t{TimingMode::RoundedTable, from_ms(enc_ms), from_ms(dec_ms), from_ms(aes_ms), from_ms(sha_ms)};
    t.validate();
    return t;
  }

  // time = cycles / clock; at 32 MHz one cycle is 31.25 ns.
  static TimingModel cycle_accurate(PrimitiveCycles c = {}, double clock_hz = 32e6) {
    if (!(clock_hz > 0)) throw InvalidParams("clock frequency must be positive");
    auto at = [&](std::uint64_t cycles) {
      return static_cast<Picos>(std::llround(static_cast<double>(cycles) * 1e12 / clock_hz));
    };
    return {TimingMode::CycleAccurate, at(c.ibe_enc), at(c.ibe_dec), at(c.aes), at(c.sha)};
  }

  void validate() const {
    if (t_ibe_enc <= 0 || t_ibe_dec <= 0 || t_aes <= 0 || t_sha <= 0)
      throw InvalidParams("primitive times must be positive");
  }

  friend bool operator==(const TimingModel&, const TimingModel&) = default;
};

enum class ChannelKind { FastEthernet, FiveG, Dsrc };

inline std::string_view to_string(ChannelKind k) {
  switch (k) {
    case ChannelKind::FastEthernet: return "FastEthernet";
    case ChannelKind::FiveG: return "5G";
    case ChannelKind::Dsrc: return "DSRC";
  }
  return "?";
}

struct ChannelModel {
  ChannelKind kind = ChannelKind::FiveG;
  double bitrate_bps = 100e6;
  Picos latency = 0;

  Picos sending_time(std::size_t bytes) const {
    if (!(bitrate_bps > 0)) throw InvalidParams("bitrate must be positive");
    return static_cast<Picos>(std::llround(static_cast<double>(bytes) * 8.0 * 1e12 / bitrate_bps)) + latency;
  }

  friend bool operator==(const ChannelModel&, const ChannelModel&) = default;
};

struct ChannelSet {
  ChannelModel fast_ethernet{ChannelKind::FastEthernet, 100e6, 0};
  ChannelModel five_g{ChannelKind::FiveG, 100e6, 0};
  ChannelModel dsrc{ChannelKind::Dsrc, 27e6, 0};

  const ChannelModel& get(ChannelKind k) const {
    switch (k) {
      case ChannelKind::FastEthernet: return fast_ethernet;
      case ChannelKind::FiveG: return five_g;
      default: return dsrc;
    }
  }

  friend bool operator==(const ChannelSet&, const ChannelSet&) = default;
};

inline ChannelKind channel_for(MessageKind k) {
  switch (k) {
    case MessageKind::M1:
    case MessageKind::M2:
    case MessageKind::M4:
    case MessageKind::M5: return ChannelKind::FiveG;
    case MessageKind::M3:
    case MessageKind::M6: return ChannelKind::FastEthernet;
    default: return ChannelKind::Dsrc;
  }
}

// Per-message computation as charged by the cost table. m7 is the chain
// construction n*t_sha; the first pad's own check is charged separately.
inline Picos computation_cost(MessageKind k, const TimingModel& t, std::size_t n_pads = 1) {
  switch (k) {
    case MessageKind::M1:
    case MessageKind::M2: return t.t_ibe_enc + t.t_ibe_dec + t.t_sha;
    case MessageKind::M3:
    case MessageKind::M6: return t.t_aes + t.t_sha;
    case MessageKind::M4:
    case MessageKind::M5: return t.t_aes;
    case MessageKind::M7: return static_cast<Picos>(n_pads) * t.t_sha;
    case MessageKind::M8: return 0;
    default: return t.t_sha;
  }
}

inline Picos sending_time(MessageKind k, const ChannelSet& c) {
  return c.get(channel_for(k)).sending_time(protocol::nominal_size(k));
}

inline Picos sending_time(std::size_t bytes, const ChannelModel& c) { return c.sending_time(bytes); }

// m1..m6, before any chain work.
inline Picos cost_setup(const TimingModel& t) {
  Picos total = 0;
  for (auto k : {MessageKind::M1, MessageKind::M2, MessageKind::M3, MessageKind::M4, MessageKind::M5, MessageKind::M6})
    total += computation_cost(k, t);
  return total;
}

// Through the first pad's acceptance: setup + n*t_sha chain + t_sha check.
inline Picos cost_first_pad_ps(std::size_t n, const TimingModel& t) {
  if (n == 0) throw InvalidParams("lane needs at least one pad");
  return cost_setup(t) + computation_cost(MessageKind::M7, t, n) + t.t_sha;
}

// (n^2 + n) / 2 hash evaluations for the pads.
inline Picos t_cp_ps(std::size_t n, const TimingModel& t) {
  return static_cast<Picos>((n * n + n) / 2) * t.t_sha;
}

inline Picos cost_asymptotic_ps(std::size_t n, const TimingModel& t) {
  if (n == 0) throw InvalidParams("lane needs at least one pad");
  return cost_setup(t) + static_cast<Picos>(n) * t.t_sha + t_cp_ps(n, t);
}

inline double cost_first_pad(std::size_t n, const TimingModel& t) { return to_ms(cost_first_pad_ps(n, t)); }
inline double cost_asymptotic(std::size_t n, const TimingModel& t) { return to_ms(cost_asymptotic_ps(n, t)); }
inline double t_cp(std::size_t n, const TimingModel& t) { return to_ms(t_cp_ps(n, t)); }

// Minimum first-pad length in meters: distance covered at v_max during the
// first-pad protocol time.
inline double pad_length(double v_max_kmh, std::size_t n, const TimingModel& t) {
  if (!(v_max_kmh > 0)) throw InvalidParams("speed must be positive");
  return v_max_kmh / 3.6 * cost_first_pad(n, t) / 1000.0;
}

inline constexpr std::size_t kSetupBytes = 128 * 3 + 96 * 2;  // m1..m5
inline constexpr std::size_t kFirstPadBytes = kSetupBytes + 32 + 32;

inline std::size_t bytes_asymptotic(std::size_t n) { return kSetupBytes + 64 * n; }

}  // namespace dynamiqs::netsim
