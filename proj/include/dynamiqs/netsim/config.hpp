#pragma once

#include <nlohmann/json.hpp>

#include <charconv>
#include <sstream>

#include "dynamiqs/netsim/simulator.hpp"

namespace dynamiqs::netsim {

// Effective settings of one command, resolved from defaults, a key = value
// file and flags, in that order.
struct RunConfig {
  std::string params_tier = "default";
  std::uint64_t seed = 1;
  std::uint32_t n_pads = 10;
  std::vector<std::uint32_t> n_list{10, 50, 100, 150, 200};
  std::vector<double> speeds{10, 30, 50, 70, 90, 110, 130};
  std::string timing_mode = "rounded-table";
  double t_ibe_enc_ms = 103, t_ibe_dec_ms = 36, t_aes_ms = 0.33, t_sha_ms = 0.36;
  PrimitiveCycles cycles;
  double clock_hz = 32e6;
  double bitrate_fast_ethernet = 100e6, bitrate_5g = 100e6, bitrate_dsrc = 27e6;
  double latency_fast_ethernet_us = 0, latency_5g_us = 0, latency_dsrc_us = 0;
  std::uint64_t window_ms = protocol::kDefaultFreshnessMs;
  std::string chain_policy = "stored";

  TimingModel timing() const {
    const auto mode = timing_mode_from(timing_mode);
    if (mode == TimingMode::CycleAccurate) return TimingModel::cycle_accurate(cycles, clock_hz);
    return TimingModel::rounded_table(t_ibe_enc_ms, t_ibe_dec_ms, t_aes_ms, t_sha_ms);
  }

  ChannelSet channels() const {
    auto ch = [](ChannelKind k, double bps, double latency_us) {
      if (!(bps > 0)) throw InvalidParams("bitrate must be positive");
      if (latency_us < 0) throw InvalidParams("latency must be non-negative");
      return ChannelModel{k, bps, static_cast<Picos>(std::llround(latency_us * 1e6))};
    };
    return {ch(ChannelKind::FastEthernet, bitrate_fast_ethernet, latency_fast_ethernet_us),
            ch(ChannelKind::FiveG, bitrate_5g, latency_5g_us), ch(ChannelKind::Dsrc, bitrate_dsrc, latency_dsrc_us)};
  }

  SimConfig sim() const {
    SimConfig c;
    c.timing = timing();
    c.channels = channels();
    c.policy = chain_policy_from(chain_policy);
    c.window_ms = window_ms;
    return c;
  }

  ring::RingParams params() const { return ring::RingParams::from_tier(params_tier); }

  void set(std::string_view key, std::string_view value);

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["params_tier"] = params_tier;
    j["seed"] = seed;
    j["n_pads"] = n_pads;
    j["n_list"] = n_list;
    j["speeds"] = speeds;
    j["timing_mode"] = timing_mode;
    j["t_ibe_enc_ms"] = t_ibe_enc_ms;
    j["t_ibe_dec_ms"] = t_ibe_dec_ms;
    j["t_aes_ms"] = t_aes_ms;
    j["t_sha_ms"] = t_sha_ms;
    j["cycles_ibe_enc"] = cycles.ibe_enc;
    j["cycles_ibe_dec"] = cycles.ibe_dec;
    j["cycles_aes"] = cycles.aes;
    j["cycles_sha"] = cycles.sha;
    j["clock_hz"] = clock_hz;
    j["bitrate_fast_ethernet"] = bitrate_fast_ethernet;
    j["bitrate_5g"] = bitrate_5g;
    j["bitrate_dsrc"] = bitrate_dsrc;
    j["latency_fast_ethernet_us"] = latency_fast_ethernet_us;
    j["latency_5g_us"] = latency_5g_us;
    j["latency_dsrc_us"] = latency_dsrc_us;
    j["window_ms"] = window_ms;
    j["chain_policy"] = chain_policy;
    return j;
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view v) {
  T out{};
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw InvalidParams("bad value for " + std::string(key) + ": " + std::string(v));
  return out;
}

template <typename T>
std::vector<T> parse_list(std::string_view key, std::string_view v) {
  std::vector<T> out;
  while (!v.empty()) {
    const auto comma = v.find(',');
    out.push_back(parse_number<T>(key, trim(v.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  if (out.empty()) throw InvalidParams("empty list for " + std::string(key));
  return out;
}

}  // namespace detail

inline void RunConfig::set(std::string_view key, std::string_view value) {
  using detail::parse_list;
  using detail::parse_number;
  const auto v = detail::trim(value);
  if (key == "params_tier") {
    ring::RingParams::from_tier(v);
    params_tier = std::string(v);
  } else if (key == "seed") {
    seed = parse_number<std::uint64_t>(key, v);
  } else if (key == "n_pads") {
    n_pads = parse_number<std::uint32_t>(key, v);
    if (n_pads == 0) throw InvalidParams("n_pads must be at least 1");
  } else if (key == "n_list") {
    n_list = parse_list<std::uint32_t>(key, v);
  } else if (key == "speeds") {
    speeds = parse_list<double>(key, v);
  } else if (key == "timing_mode") {
    timing_mode_from(v);
    timing_mode = std::string(v);
  } else if (key == "t_ibe_enc_ms") {
    t_ibe_enc_ms = parse_number<double>(key, v);
  } else if (key == "t_ibe_dec_ms") {
    t_ibe_dec_ms = parse_number<double>(key, v);
  } else if (key == "t_aes_ms") {
    t_aes_ms = parse_number<double>(key, v);
  } else if (key == "t_sha_ms") {
    t_sha_ms = parse_number<double>(key, v);
  } else if (key == "cycles_ibe_enc") {
    cycles.ibe_enc = parse_number<std::uint64_t>(key, v);
  } else if (key == "cycles_ibe_dec") {
    cycles.ibe_dec = parse_number<std::uint64_t>(key, v);
  } else if (key == "cycles_aes") {
    cycles.aes = parse_number<std::uint64_t>(key, v);
  } else if (key == "cycles_sha") {
    cycles.sha = parse_number<std::uint64_t>(key, v);
  } else if (key == "clock_hz") {
    clock_hz = parse_number<double>(key, v);
  } else if (key == "bitrate_fast_ethernet") {
    bitrate_fast_ethernet = parse_number<double>(key, v);
  } else if (key == "bitrate_5g") {
    bitrate_5g = parse_number<double>(key, v);
  } else if (key == "bitrate_dsrc") {
    bitrate_dsrc = parse_number<double>(key, v);
  } else if (key == "latency_fast_ethernet_us") {
    latency_fast_ethernet_us = parse_number<double>(key, v);
  } else if (key == "latency_5g_us") {
    latency_5g_us = parse_number<double>(key, v);
  } else if (key == "latency_dsrc_us") {
    latency_dsrc_us = parse_number<double>(key, v);
  } else if (key == "window_ms") {
    window_ms = parse_number<std::uint64_t>(key, v);
  } else if (key == "chain_policy") {
    chain_policy_from(v);
    chain_policy = std::string(v);
  } else {
    throw InvalidParams("unknown config key: " + std::string(key));
  }
}

// Lines of `key = value`; blank lines and `#` comments are skipped.
inline void apply_config_text(RunConfig& cfg, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view l = line;
    if (const auto hash = l.find('#'); hash != std::string_view::npos) l = l.substr(0, hash);
    l = detail::trim(l);
    if (l.empty()) continue;
    const auto eq = l.find('=');
    if (eq == std::string_view::npos) throw FormatError("config line " + std::to_string(lineno) + ": expected key = value");
    cfg.set(detail::trim(l.substr(0, eq)), l.substr(eq + 1));
  }
}

inline RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  apply_config_text(cfg, text);
  return cfg;
}

}  // namespace dynamiqs::netsim
