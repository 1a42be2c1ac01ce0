#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "dynamiqs/io.hpp"
#include "dynamiqs/pki/files.hpp"

namespace fs = std::filesystem;
using namespace dynamiqs;

namespace {

struct CliRun {
  int code;
  std::string out;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("dynamiqs_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  CliRun cli(const std::string& args) const {
    const auto cap = path("stdout.txt");
    const auto cmd = std::string(DYNAMIQS_CLI) + " " + args + " >" + cap + " 2>" + path("stderr.txt");
    const int status = std::system(cmd.c_str());
    std::ifstream in(cap);
    std::stringstream s;
    s << in.rdbuf();
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, s.str()};
  }

  static std::vector<nlohmann::json> jsonl(const std::string& text) {
    std::vector<nlohmann::json> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
      if (!line.empty()) out.push_back(nlohmann::json::parse(line));
    return out;
  }

  std::string slurp(const std::string& name) const {
    std::ifstream in(path(name));
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  // Default-tier deployment with one vehicle and its exported dataset.
  void provision(std::size_t count) const {
    ASSERT_EQ(cli("setup --params-tier default --seed 7 --out " + path("auth.dqs")).code, 0);
    ASSERT_EQ(cli("register --authority " + path("auth.dqs") + " --vehicle-id EV-1 --count " + std::to_string(count) +
                  " --out " + path("ev.dqs"))
                  .code,
              0);
    ASSERT_EQ(cli("export-dataset --authority " + path("auth.dqs") + " --out " + path("ds.dqs")).code, 0);
  }

  std::string run_args(const std::string& extra) const {
    return "run --authority " + path("auth.dqs") + " --vehicle " + path("ev.dqs") + " --dataset " + path("ds.dqs") +
           " " + extra;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, SetupIsReproducibleAndLoadable) {
  ASSERT_EQ(cli("setup --params-tier toy --seed 3 --out " + path("a.dqs")).code, 0);
  ASSERT_EQ(cli("setup --params-tier toy --seed 3 --out " + path("b.dqs")).code, 0);
  EXPECT_EQ(read_file(path("a.dqs")), read_file(path("b.dqs")));
  const auto ra = pki::decode_authority(read_file(path("a.dqs")));
  EXPECT_EQ(ra.params(), ring::RingParams::toy());
  EXPECT_EQ(ra.cspas().size(), 1u);

  EXPECT_EQ(cli("setup --params-tier toy --seed 3 --out " + path("a.dqs")).code, 2);
  EXPECT_EQ(cli("setup --params-tier toy --seed 4 --force --out " + path("a.dqs")).code, 0);
  EXPECT_NE(read_file(path("a.dqs")), read_file(path("b.dqs")));
  EXPECT_EQ(cli("setup --params-tier huge --seed 3 --out " + path("c.dqs")).code, 2);
  EXPECT_FALSE(fs::exists(path("c.dqs")));
  EXPECT_EQ(cli("setup --seed 3").code, 2);
  EXPECT_EQ(cli("").code, 2);
}

TEST_F(Cli, RegisterAndExportDataset) {
  ASSERT_EQ(cli("setup --params-tier toy --seed 3 --out " + path("a.dqs")).code, 0);
  const auto r = cli("register --authority " + path("a.dqs") + " --vehicle-id EV-9 --count 3 --out " + path("v.dqs"));
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(jsonl(r.out).back()["pseudonyms"], 3);
  const auto creds = pki::decode_credentials(read_file(path("v.dqs")));
  EXPECT_EQ(creds.entries.size(), 3u);

  ASSERT_EQ(cli("export-dataset --authority " + path("a.dqs") + " --out " + path("d.dqs")).code, 0);
  const auto ds = pki::decode_dataset(read_file(path("d.dqs")));
  EXPECT_EQ(ds.size(), 3u);
  for (const auto& e : creds.entries) EXPECT_NE(ds.find(e.pseudonym.value), nullptr);

  EXPECT_NE(cli("register --authority " + path("a.dqs") + " --vehicle-id EV-9 --count 1 --out " + path("w.dqs")).code, 0);
  EXPECT_EQ(cli("register --authority " + path("a.dqs") + " --vehicle-id EV-8 --count 0 --out " + path("w.dqs")).code, 2);
}

TEST_F(Cli, RegistersAYearOfPseudonymsAtTestTier) {
  ASSERT_EQ(cli("setup --params-tier test --seed 3 --out " + path("a.dqs")).code, 0);
  const auto start = std::chrono::steady_clock::now();
  ASSERT_EQ(cli("register --authority " + path("a.dqs") + " --vehicle-id EV-Y --count 3650 --out " + path("v.dqs")).code, 0);
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(60));
  EXPECT_EQ(pki::decode_credentials(read_file(path("v.dqs"))).entries.size(), 3650u);
}

TEST_F(Cli, HonestRunThenReuseIsRejected) {
  provision(2);
  const auto first = cli(run_args("--n-pads 10 --seed 5 --out " + path("t1.jsonl")));
  ASSERT_EQ(first.code, 0);
  const auto lines = jsonl(slurp("t1.jsonl"));
  EXPECT_EQ(lines.front()["config"]["seed"], 5);
  EXPECT_EQ(lines[1]["type"], "header");
  const auto& summary = lines.back();
  EXPECT_EQ(summary["done"], true);
  EXPECT_EQ(summary["accepts"], 10);
  EXPECT_DOUBLE_EQ(summary["first_pad_computation_ms"].get<double>(), 284.72);
  EXPECT_EQ(summary["first_pad_bytes"], 640);
  EXPECT_EQ(summary["total_bytes"], 576 + 64 * 10);
  std::size_t accepts = 0;
  for (const auto& l : lines)
    if (l.contains("verdict") && (l["kind"] == "m7" || l["kind"] == "m9" || l["kind"] == "chain"))
      accepts += l["verdict"] == "accept";
  EXPECT_EQ(accepts, 10u);

  // Same pseudonym again: the CSPA has it marked consumed.
  const auto again = cli(run_args("--n-pads 10 --seed 6 --index 0 --out " + path("t2.jsonl")));
  EXPECT_EQ(again.code, 1);
  EXPECT_EQ(jsonl(slurp("t2.jsonl")).back()["rejection"], "PseudonymReuse");

  // The next unused pseudonym still works, then none are left.
  EXPECT_EQ(cli(run_args("--n-pads 3 --seed 7 --out " + path("t3.jsonl"))).code, 0);
  EXPECT_EQ(cli(run_args("--n-pads 3 --seed 8 --out " + path("t4.jsonl"))).code, 2);
  EXPECT_EQ(cli(run_args("--n-pads 3 --index 9")).code, 2);
}

TEST_F(Cli, RunIsReproducibleFromConfigAndSeed) {
  provision(2);
  write_text(path("lane.cfg"), "n_pads = 4\nchain_policy = recompute\n");
  fs::copy_file(path("ds.dqs"), path("ds0.dqs"));
  fs::copy_file(path("ev.dqs"), path("ev0.dqs"));
  ASSERT_EQ(cli(run_args("--config " + path("lane.cfg") + " --seed 5 --out " + path("a.jsonl"))).code, 0);
  fs::copy_file(path("ds0.dqs"), path("ds.dqs"), fs::copy_options::overwrite_existing);
  fs::copy_file(path("ev0.dqs"), path("ev.dqs"), fs::copy_options::overwrite_existing);
  ASSERT_EQ(cli(run_args("--config " + path("lane.cfg") + " --seed 5 --out " + path("b.jsonl"))).code, 0);
  EXPECT_EQ(slurp("a.jsonl"), slurp("b.jsonl"));
  const auto lines = jsonl(slurp("a.jsonl"));
  EXPECT_EQ(lines.front()["config"]["chain_policy"], "recompute");
  EXPECT_EQ(lines.back()["accepts"], 4);
  // Flags override the file.
  fs::copy_file(path("ds0.dqs"), path("ds.dqs"), fs::copy_options::overwrite_existing);
  fs::copy_file(path("ev0.dqs"), path("ev.dqs"), fs::copy_options::overwrite_existing);
  ASSERT_EQ(cli(run_args("--config " + path("lane.cfg") + " --n-pads 2 --seed 5 --out " + path("c.jsonl"))).code, 0);
  EXPECT_EQ(jsonl(slurp("c.jsonl")).back()["accepts"], 2);
}

TEST_F(Cli, CostsEmitsBothTables) {
  const auto r = cli("costs --n-pads 10,50,100,150,200 --out " + path("tables"));
  ASSERT_EQ(r.code, 0);
  std::istringstream t5(slurp("tables/table5.csv"));
  std::vector<std::string> rows;
  for (std::string line; std::getline(t5, line);)
    if (!line.empty() && line[0] != '#') rows.push_back(line);
  ASSERT_EQ(rows.size(), 8u);
  EXPECT_EQ(rows[0], "speed_kmh,10,50,100,150,200");
  EXPECT_EQ(rows[1].substr(0, 8), "10,0.79,");
  for (const auto& row : rows) EXPECT_EQ(std::count(row.begin(), row.end(), ','), 5);

  const auto t3 = slurp("tables/table3.csv");
  EXPECT_NE(t3.find("100,280.76,317.12,2134.76,640,6976"), std::string::npos);
  EXPECT_NE(t3.find("m1,139.36,128,5G,10.24"), std::string::npos);
  EXPECT_NE(t3.find("# seed = 1"), std::string::npos);

  EXPECT_EQ(cli("costs --n-pads \"\"").code, 2);
  EXPECT_EQ(cli("costs --speeds 10,x").code, 2);
  EXPECT_EQ(cli("costs --out " + path("tables")).code, 2);
}

TEST_F(Cli, AttackReportsEveryActionAndPasses) {
  const auto r = cli("attack --scenario all --seed 5 --n-pads 4 --out " + path("atk.jsonl"));
  ASSERT_EQ(r.code, 0);
  const auto lines = jsonl(slurp("atk.jsonl"));
  std::size_t scenarios = 0, actions = 0;
  for (const auto& l : lines) {
    if (l["type"] == "scenario") {
      ++scenarios;
      EXPECT_EQ(l["pass"], true) << l["scenario"];
      EXPECT_EQ(l["accepted"], 0);
    }
    if (l["type"] == "action") {
      ++actions;
      EXPECT_EQ(l["accepted"], false);
      EXPECT_NE(l["verdict"], "accept");
    }
  }
  EXPECT_EQ(scenarios, 6u);
  EXPECT_GT(actions, 10'000u);

  EXPECT_EQ(cli("attack --scenario teleport").code, 2);
  EXPECT_EQ(cli("attack --scenario replay-m7 --n-pads 1").code, 2);
}

TEST_F(Cli, AttackAgainstStoredAuthority) {
  ASSERT_EQ(cli("setup --params-tier default --seed 9 --out " + path("auth.dqs")).code, 0);
  EXPECT_EQ(cli("attack --scenario forge-m4 --authority " + path("auth.dqs")).code, 0);
}
