#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "dynamiqs/io.hpp"
#include "dynamiqs/netsim/adversary.hpp"
#include "dynamiqs/netsim/config.hpp"
#include "dynamiqs/pki/files.hpp"

namespace fs = std::filesystem;
using namespace dynamiqs;
using namespace dynamiqs::netsim;

namespace {

constexpr int kExitRejected = 1;
constexpr int kExitUsage = 2;
constexpr int kExitError = 3;

struct UsageError : Error {
  using Error::Error;
};

// Flags shared by every subcommand; unset ones leave the config value alone.
struct CommonFlags {
  std::string config_path;
  std::optional<std::string> params_tier, seed, n_pads, speeds, timing_mode;
  std::string out;
  bool force = false;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key = value config file");
    cmd->add_option("--params-tier", params_tier, "toy, test or default");
    cmd->add_option("--seed", seed, "deterministic seed");
    cmd->add_option("--timing-mode", timing_mode, "rounded-table or cycle-accurate");
    cmd->add_option("--out", out, "output path");
    cmd->add_flag("--force", force, "overwrite existing output");
  }

  RunConfig resolve(bool n_is_list = false) const {
    RunConfig cfg;
    if (!config_path.empty()) {
      const auto text = read_file(config_path);
      apply_config_text(cfg, std::string(text.begin(), text.end()));
    }
    try {
      if (params_tier) cfg.set("params_tier", *params_tier);
      if (seed) cfg.set("seed", *seed);
      if (timing_mode) cfg.set("timing_mode", *timing_mode);
      if (speeds) cfg.set("speeds", *speeds);
      if (n_pads) cfg.set(n_is_list ? "n_list" : "n_pads", *n_pads);
    } catch (const InvalidParams& e) {
      throw UsageError(e.what());
    }
    return cfg;
  }
};

void require_out(const std::string& out) {
  if (out.empty()) throw UsageError("--out is required");
}

void check_writable(const fs::path& path, bool force) {
  if (fs::exists(path) && !force) throw UsageError(path.string() + " exists; pass --force to overwrite");
}

std::string header_line(const std::string& command, const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["type"] = "header";
  j["command"] = command;
  j["config"] = cfg.to_json();
  return j.dump();
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-")
    std::cout << text;
  else
    write_text(out, text);
}

int cmd_setup(const CommonFlags& f) {
  const auto cfg = f.resolve();
  require_out(f.out);
  check_writable(f.out, f.force);
  auto ra = pki::ra_setup(cfg.params(), cfg.seed);
  ra.register_cspa("CSPA-1");
  write_file(f.out, pki::encode(ra));
  std::cout << header_line("setup", cfg) << "\n";
  return 0;
}

int cmd_register(const CommonFlags& f, const std::string& authority, const std::string& vehicle_id,
                 std::size_t count) {
  const auto cfg = f.resolve();
  require_out(f.out);
  check_writable(f.out, f.force);
  if (count == 0) throw UsageError("--count must be at least 1");
  auto ra = pki::decode_authority(read_file(authority));
  const auto creds = ra.register_vehicle(as_view(vehicle_id), count);
  write_file(f.out, pki::encode(creds, ra.params()));
  write_file(authority, pki::encode(ra));
  nlohmann::ordered_json j;
  j["type"] = "registered";
  j["vehicle_id"] = vehicle_id;
  j["pseudonyms"] = creds.entries.size();
  j["secret_payload_bytes"] = creds.secret_payload_bytes();
  j["authority_seed"] = to_hex(ra.seed());
  std::cout << header_line("register", cfg) << "\n" << j.dump() << "\n";
  return 0;
}

int cmd_export_dataset(const CommonFlags& f, const std::string& authority) {
  const auto cfg = f.resolve();
  require_out(f.out);
  check_writable(f.out, f.force);
  const auto ra = pki::decode_authority(read_file(authority));
  const auto ds = ra.export_cspa_dataset();
  write_file(f.out, pki::encode(ds, ra.params()));
  nlohmann::ordered_json j;
  j["type"] = "dataset";
  j["records"] = ds.size();
  j["authority_seed"] = to_hex(ra.seed());
  std::cout << header_line("export-dataset", cfg) << "\n" << j.dump() << "\n";
  return 0;
}

int cmd_run(const CommonFlags& f, const std::string& authority, const std::string& vehicle,
            const std::string& dataset, std::optional<std::size_t> index) {
  const auto cfg = f.resolve();
  auto ra = pki::decode_authority(read_file(authority));
  auto creds = pki::decode_credentials(read_file(vehicle));
  auto ds = pki::decode_dataset(read_file(dataset));
  std::size_t entry = 0;
  if (index) {
    if (*index >= creds.entries.size()) throw UsageError("--index outside the credential list");
    entry = *index;
  } else {
    const auto* next = creds.next_unused();
    if (!next) throw UsageError("no unused pseudonym left; pass --index to force one");
    entry = static_cast<std::size_t>(next - creds.entries.data());
  }
  // A forced index replays a spent entry as an unspent one, so the CSPA decides.
  creds.entries[entry].used = false;
  const auto cspa_id = *ra.cspas().begin();
  const auto dep = make_deployment(std::move(ra), cspa_id, creds, ds);

  Network net(dep, cfg.n_pads, cfg.sim(), SeededRandomSource(cfg.seed).derive("session"));
  auto ev = net.new_session(entry);
  const auto outcome = run_session(net, ev);
  const auto trace = summarize(net, outcome, cfg.seed);

  creds.entries[entry].used = true;
  write_file(vehicle, pki::encode(creds, dep.ra.params()));
  write_file(dataset, pki::encode(net.cspa.dataset(), dep.ra.params()));

  std::string text = header_line("run", cfg) + "\n" + trace.to_jsonl();
  emit(f.out, text);
  if (!outcome.done) {
    std::cerr << "session rejected at " << outcome.failed_at << ": "
              << (outcome.rejection ? protocol::to_string(*outcome.rejection) : "incomplete") << "\n";
    return kExitRejected;
  }
  return 0;
}

std::string fmt(double v, int precision = 2) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(precision);
  s << v;
  return s.str();
}

std::string csv_header(const RunConfig& cfg) {
  std::string out;
  const auto j = cfg.to_json();
  for (const auto& [k, v] : j.items()) out += "# " + k + " = " + v.dump() + "\n";
  return out;
}

// Per-message rows, then totals for each lane length.
std::string table3_csv(const RunConfig& cfg) {
  const auto t = cfg.timing();
  const auto ch = cfg.channels();
  std::string out = csv_header(cfg) + "message,computation_ms,size_bytes,channel,sending_us\n";
  for (auto k : {MessageKind::M1, MessageKind::M2, MessageKind::M3, MessageKind::M4, MessageKind::M5, MessageKind::M6,
                 MessageKind::M7, MessageKind::M8, MessageKind::M9}) {
    const auto comp = k == MessageKind::M7 ? "n*" + fmt(to_ms(t.t_sha)) : fmt(to_ms(computation_cost(k, t)));
    out += std::string(protocol::to_string(k)) + "," + comp + "," + std::to_string(protocol::nominal_size(k)) + "," +
           std::string(to_string(channel_for(k))) + "," + fmt(to_us(sending_time(k, ch))) + "\n";
  }
  out += "\nn_pads,setup_ms,first_pad_ms,asymptotic_ms,first_pad_bytes,asymptotic_bytes\n";
  for (auto n : cfg.n_list)
    out += std::to_string(n) + "," + fmt(to_ms(cost_setup(t))) + "," + fmt(cost_first_pad(n, t)) + "," +
           fmt(cost_asymptotic(n, t)) + "," + std::to_string(kFirstPadBytes) + "," +
           std::to_string(bytes_asymptotic(n)) + "\n";
  return out;
}

std::string table5_csv(const RunConfig& cfg) {
  const auto t = cfg.timing();
  std::string out = csv_header(cfg) + "speed_kmh";
  for (auto n : cfg.n_list) out += "," + std::to_string(n);
  out += "\n";
  for (double v : cfg.speeds) {
    out += fmt(v, 0);
    for (auto n : cfg.n_list) out += "," + fmt(pad_length(v, n, t));
    out += "\n";
  }
  return out;
}

int cmd_costs(const CommonFlags& f) {
  const auto cfg = f.resolve(true);
  if (cfg.n_list.empty() || cfg.speeds.empty()) throw UsageError("empty lane or speed list");
  if (f.out.empty() || f.out == "-") {
    std::cout << table3_csv(cfg) << "\n" << table5_csv(cfg);
    return 0;
  }
  fs::create_directories(f.out);
  for (const auto* name : {"table3.csv", "table5.csv"}) check_writable(fs::path(f.out) / name, f.force);
  write_text(fs::path(f.out) / "table3.csv", table3_csv(cfg));
  write_text(fs::path(f.out) / "table5.csv", table5_csv(cfg));
  std::cout << header_line("costs", cfg) << "\n";
  return 0;
}

int cmd_attack(const CommonFlags& f, const std::string& scenario, const std::string& authority) {
  auto cfg = f.resolve();
  if (!f.n_pads && f.config_path.empty()) cfg.n_pads = 5;
  std::vector<std::string> names;
  if (scenario == "all") {
    names = attack_scenarios();
  } else {
    const auto& known = attack_scenarios();
    if (std::find(known.begin(), known.end(), scenario) == known.end())
      throw UsageError("unknown scenario: " + scenario);
    names.push_back(scenario);
  }
  if (cfg.n_pads < 2) throw UsageError("attack scenarios need --n-pads of at least 2");

  std::optional<Deployment> dep;
  if (authority.empty()) {
    dep.emplace(make_deployment(cfg.params(), cfg.seed, 8));
  } else {
    auto ra = pki::decode_authority(read_file(authority));
    const auto cspa_id = *ra.cspas().begin();
    auto creds = ra.register_vehicle(as_view("EV-ATTACK-" + std::to_string(cfg.seed)), 8);
    auto ds = ra.export_cspa_dataset();
    dep.emplace(make_deployment(std::move(ra), cspa_id, std::move(creds), std::move(ds)));
  }

  std::string text = header_line("attack", cfg) + "\n";
  std::size_t accepted = 0;
  bool leaked = false;
  for (const auto& name : names) {
    const auto report = run_attack(*dep, name, cfg.n_pads, cfg.sim(), cfg.seed);
    for (const auto& a : report.actions) {
      nlohmann::ordered_json j;
      j["type"] = "action";
      j["scenario"] = name;
      j["description"] = a.description;
      j["kind"] = std::string(protocol::to_string(a.kind));
      j["target"] = a.target;
      j["verdict"] = a.verdict;
      j["accepted"] = a.accepted;
      text += j.dump() + "\n";
    }
    const bool leak = transcript_leaks_identity(report.transcript, dep->vehicle);
    nlohmann::ordered_json s;
    s["type"] = "scenario";
    s["scenario"] = name;
    s["actions"] = report.actions.size();
    s["accepted"] = report.accepted_count();
    s["identity_in_transcript"] = leak;
    s["pass"] = report.accepted_count() == 0 && !leak;
    text += s.dump() + "\n";
    std::cerr << name << ": " << (s["pass"].get<bool>() ? "PASS" : "FAIL") << " (" << report.actions.size()
              << " actions, " << report.accepted_count() << " accepted)\n";
    accepted += report.accepted_count();
    leaked = leaked || leak;
  }
  emit(f.out, text);
  return accepted == 0 && !leaked ? 0 : kExitRejected;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynamiqs: authentication for dynamic wireless EV charging"};
  app.require_subcommand(1);

  CommonFlags f;
  std::string authority, vehicle_id, vehicle, dataset, scenario = "all";
  std::size_t count = 0;
  std::optional<std::size_t> index;

  auto* setup = app.add_subcommand("setup", "generate master keys and the authority state file");
  f.add_to(setup);

  auto* reg = app.add_subcommand("register", "register a vehicle and write its credential file");
  f.add_to(reg);
  reg->add_option("--authority", authority, "authority state file")->required();
  reg->add_option("--vehicle-id", vehicle_id, "vehicle identity")->required();
  reg->add_option("--count", count, "pseudonyms to issue")->required();

  auto* exp = app.add_subcommand("export-dataset", "write the CSPA pseudonym dataset");
  f.add_to(exp);
  exp->add_option("--authority", authority, "authority state file")->required();

  auto* run = app.add_subcommand("run", "simulate one charging session and write its trace");
  f.add_to(run);
  run->add_option("--authority", authority, "authority state file")->required();
  run->add_option("--vehicle", vehicle, "vehicle credential file")->required();
  run->add_option("--dataset", dataset, "CSPA dataset file")->required();
  run->add_option("--n-pads", f.n_pads, "pads in the lane");
  run->add_option("--index", index, "pseudonym index (default: next unused)");

  auto* costs = app.add_subcommand("costs", "write the cost and pad-length tables as CSV");
  f.add_to(costs);
  costs->add_option("--n-pads", f.n_pads, "comma-separated lane lengths");
  costs->add_option("--speeds", f.speeds, "comma-separated speeds in km/h");

  auto* attack = app.add_subcommand("attack", "run adversary scenarios");
  f.add_to(attack);
  attack->add_option("--scenario", scenario, "scenario name or all");
  attack->add_option("--n-pads", f.n_pads, "pads in the lane");
  attack->add_option("--authority", authority, "authority state file (default: fresh keys from --seed)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*setup) return cmd_setup(f);
    if (*reg) return cmd_register(f, authority, vehicle_id, count);
    if (*exp) return cmd_export_dataset(f, authority);
    if (*run) return cmd_run(f, authority, vehicle, dataset, index);
    if (*costs) return cmd_costs(f);
    if (*attack) return cmd_attack(f, scenario, authority);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidParams& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitUsage;
}
