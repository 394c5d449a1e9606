#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "commands.hpp"
#include "scenario.hpp"

using namespace qrdm::cli;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() / ("qrdm-cli-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  std::string str() const { return path_.string(); }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path write_file(const TempDir& d, const std::string& name, const std::string& text) {
  const auto p = d.path() / name;
  std::ofstream(p) << text;
  return p;
}

struct Outcome {
  int code;
  std::string out, err;
};

Outcome cli(std::vector<std::string> args) {
  args.insert(args.begin(), "qrdm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

const char* kSingleTrial = R"(name: single
command: collapse-ensemble
seed: 11
params:
  state: {energies: [0, 1, 3], probabilities: [0.2, 0.5, 0.3]}
  config: {k_mode: frozen, k: 0.2}
  trials: 1
  steps: 400
  stride: 40
)";

}  // namespace

TEST(Fnv, KnownVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(Scenario, ScalarTyping) {
  const auto j = yaml_to_json("a: 3\nb: 2.5\nc: true\nd: '7'\ne: hello\nf: [1, 1e-3]\ng: ~\n");
  EXPECT_TRUE(j["a"].is_number_integer());
  EXPECT_TRUE(j["b"].is_number_float());
  EXPECT_TRUE(j["c"].is_boolean());
  EXPECT_TRUE(j["d"].is_string());
  EXPECT_EQ(j["e"], "hello");
  EXPECT_DOUBLE_EQ(j["f"][1].get<double>(), 1e-3);
  EXPECT_TRUE(j["g"].is_null());
}

TEST(Scenario, HashIgnoresKeyOrderButNotValues) {
  const auto a = load_scenario_text("name: x\nseed: 3\nparams: {p: 1, q: [1, 2]}\n");
  const auto b = load_scenario_text("params:\n  q: [1, 2]\n  p: 1\nseed: 3\nname: x\n");
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_EQ(a.canonical().dump(), b.canonical().dump());
  EXPECT_EQ(a.hash().size(), 16u);
  const auto c = load_scenario_text("name: x\nseed: 4\nparams: {p: 1, q: [1, 2]}\n");
  EXPECT_NE(a.hash(), c.hash());
}

TEST(Scenario, MalformedInputsNameTheProblem) {
  EXPECT_THROW(load_scenario_text("name: [unclosed\n"), ScenarioError);
  EXPECT_THROW(load_scenario_text("- 1\n- 2\n"), ScenarioError);
  EXPECT_THROW(load_scenario_text("seed: 1\n"), ScenarioError);
  EXPECT_THROW(load_scenario_text("name: x\nseed: -1\n"), ScenarioError);
  EXPECT_THROW(load_scenario_text("name: x\nparam: {}\n"), ScenarioError);
  EXPECT_THROW(load_scenario_text("name: x\nname: y\n"), ScenarioError);
  try {
    const auto s = load_scenario_text("name: x\nparams: {steps: 1.5}\n");
    Params(s.params, "params").count("steps");
    FAIL();
  } catch (const ScenarioError& e) {
    EXPECT_NE(std::string(e.what()).find("params.steps"), std::string::npos);
    EXPECT_EQ(e.name(), "scenario");
  }
}

TEST(Scenario, ReferencePackParses) {
  std::size_t n = 0;
  for (const auto& entry : fs::directory_iterator(QRDM_PAPER_PACK_DIR)) {
    if (entry.path().extension() != ".yaml") continue;
    const auto s = load_scenario_file(entry.path().string());
    EXPECT_NE(std::find(subcommands().begin(), subcommands().end(), s.command), subcommands().end()) << entry.path();
    ++n;
  }
  EXPECT_GE(n, 12u);
}

TEST(Cli, UnknownSubcommandAndMissingScenario) {
  EXPECT_EQ(cli({"teleport"}).code, 1);
  EXPECT_EQ(cli({}).code, 1);
  const auto r = cli({"collapse-run", "--out-dir", "/tmp"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("requires --scenario"), std::string::npos);
  EXPECT_EQ(cli({"tau-c", "--format", "xml"}).code, 1);
  EXPECT_EQ(cli({"--help"}).code, 0);
}

TEST(Cli, TauCDefaultTable) {
  TempDir d;
  const auto r = cli({"tau-c", "--out-dir", d.str()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("6/6 systems within one decade"), std::string::npos) << r.out;
  const auto table = slurp(d.path() / "tau-c.table.csv");
  EXPECT_EQ(table.rfind("name,delta_e_ev,tau_c_s,reference_s,ratio,decade_gap\n", 0), 0u);
  EXPECT_NE(table.find("squid,8.6e-06,"), std::string::npos);
  const auto manifest = json::parse(slurp(d.path() / "tau-c.manifest.json"));
  EXPECT_EQ(manifest["constants"]["planck_time_s"].get<double>(), 5.391247e-44);
  EXPECT_EQ(manifest["outputs"].size(), 1u);
}

TEST(Cli, SingleTrialEnsembleIsByteIdentical) {
  TempDir d;
  const auto scenario = write_file(d, "s.yaml", kSingleTrial).string();
  const auto a = d.path() / "a", b = d.path() / "b";
  ASSERT_EQ(cli({"collapse-ensemble", "--scenario", scenario, "--out-dir", a.string()}).code, 0);
  ASSERT_EQ(cli({"collapse-ensemble", "--scenario", scenario, "--out-dir", b.string(), "--threads", "3"}).code, 0);
  for (const char* f : {"single.trial-0.csv", "single.ensemble.csv"}) {
    const auto x = slurp(a / f);
    EXPECT_FALSE(x.empty()) << f;
    EXPECT_EQ(x, slurp(b / f)) << f;
  }
  const auto ma = json::parse(slurp(a / "single.manifest.json"));
  const auto mb = json::parse(slurp(b / "single.manifest.json"));
  EXPECT_EQ(ma["scenario_hash"], mb["scenario_hash"]);
}

TEST(Cli, SeedFlagOverridesScenario) {
  TempDir d;
  const auto scenario = write_file(d, "s.yaml", kSingleTrial).string();
  ASSERT_EQ(cli({"collapse-ensemble", "--scenario", scenario, "--out-dir", (d.path() / "a").string()}).code, 0);
  ASSERT_EQ(cli({"collapse-ensemble", "--scenario", scenario, "--out-dir", (d.path() / "b").string(), "--seed", "12"})
                .code,
            0);
  EXPECT_NE(slurp(d.path() / "a" / "single.trial-0.csv"), slurp(d.path() / "b" / "single.trial-0.csv"));
  const auto mb = json::parse(slurp(d.path() / "b" / "single.manifest.json"));
  EXPECT_EQ(mb["seed"], 12);
}

TEST(Cli, ScenarioForAnotherCommandIsRejected) {
  TempDir d;
  const auto scenario = write_file(d, "s.yaml", kSingleTrial).string();
  const auto r = cli({"collapse-run", "--scenario", scenario, "--out-dir", d.str()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("error[scenario]"), std::string::npos);
}

TEST(Cli, ContractViolationExitsOne) {
  TempDir d;
  const auto scenario = write_file(d, "bad.yaml", R"(name: bad
command: collapse-run
params:
  state: {energies: [0, 1], probabilities: [0.5, 0.6]}
)").string();
  const auto r = cli({"collapse-run", "--scenario", scenario, "--out-dir", d.str()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("error[normalization]"), std::string::npos) << r.err;
}

TEST(Cli, NumericFailureExitsTwo) {
  TempDir d;
  const auto scenario = write_file(d, "tight.yaml", R"(name: tight
command: frames-analyze
params:
  correlation:
    instants: 50
    geometry: {x0: 0.123, dx: 0.7071}
    velocities: [0.3]
    tolerance: 1e-300
    branches:
      - {weight: 0.5, particle1: [0, 10], particle2: [50, 60]}
      - {weight: 0.5, particle1: [10, 20], particle2: [60, 70]}
)").string();
  const auto r = cli({"frames-analyze", "--scenario", scenario, "--out-dir", d.str()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("error[insufficient-overlap]"), std::string::npos) << r.err;
}

TEST(Cli, OutDirFromEnvironment) {
  TempDir d;
  ::setenv("QRDM_OUT_DIR", d.str().c_str(), 1);
  const auto r = cli({"tau-c"});
  ::unsetenv("QRDM_OUT_DIR");
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(fs::exists(d.path() / "tau-c.table.csv"));
}

TEST(Cli, JsonFormatReports) {
  TempDir d;
  const auto r = cli({"protect-sweep", "--scenario", std::string(QRDM_PAPER_PACK_DIR) + "/05-protective-sweep.yaml",
                      "--out-dir", d.str(), "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(slurp(d.path() / "protective-sweep.sweep.json"));
  ASSERT_EQ(j["rows"].size(), 3u);
  EXPECT_NEAR(j["rows"][2]["shift"].get<double>(), 0.5, 1e-3);
  EXPECT_NEAR(j["survival_deficit_slope"].get<double>(), -1.0, 0.2);
}

TEST(Cli, RdmSampleWritesTrajectoryAndBinary) {
  TempDir d;
  const auto scenario = write_file(d, "r.yaml", R"(name: r
command: rdm-sample
seed: 5
params:
  instants: 1000
  binary: true
  probabilities: [0.25, 0.25, 0.5, 0]
)").string();
  const auto r = cli({"rdm-sample", "--scenario", scenario, "--out-dir", d.str()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(d.path() / "r.trajectory.stay").substr(0, 8), "QRDMSTAY");
  const auto csv = slurp(d.path() / "r.trajectory.csv");
  EXPECT_EQ(csv.rfind("# seed=5\n", 0), 0u);
  EXPECT_EQ(csv.find(",3\n"), std::string::npos);
}

TEST(Cli, VerifyListsSuites) {
  TempDir d;
  const auto r = cli({"verify", "--out-dir", d.str()});
  EXPECT_EQ(r.code, 0) << r.out;
  for (const char* suite : {"hilbert", "schrodinger", "rdm", "beable", "collapse", "protective", "frames"})
    EXPECT_NE(r.out.find(suite), std::string::npos) << suite;
}
