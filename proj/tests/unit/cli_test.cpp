#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"

using namespace tender;
using namespace tender::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = TENDER_SCENARIO_DIR;

std::vector<fs::path> bundled() {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(kScenarios)) {
    if (e.path().extension() == ".yaml") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string minimal(const std::string& extra_bidder_lines = "") {
  return "name: t\n"
         "scheme: FULL_TRACK\n"
         "tender:\n"
         "  title: T\n"
         "  terms: x\n"
         "  length_ms: 600000\n"
         "  limit: 1\n"
         "  criteria:\n"
         "    - {field: price, weight: 1, direction: MINIMIZE}\n"
         "bidders:\n"
         "  - id: A\n"
         "    submit_at_ms: 1000\n"
         "    fields: {price: 10}\n" +
         extra_bidder_lines;
}

int line_of(const std::string& text) {
  try {
    parse_scenario(text, "s.yaml");
  } catch (const ScenarioError& e) {
    EXPECT_NE(std::string(e.what()).find("s.yaml:" + std::to_string(e.line()) + ":"), std::string::npos);
    return e.line();
  }
  ADD_FAILURE() << "expected a ScenarioError";
  return -1;
}

int run(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  args.insert(args.begin(), "tender_sim");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

fs::path temp_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("tender_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(ScenarioParse, MinimalScenarioParses) {
  const auto sc = parse_scenario(minimal());
  EXPECT_EQ(sc.name, "t");
  EXPECT_EQ(sc.tender.scheme, contracts::Scheme::kFullTrack);
  ASSERT_EQ(sc.bidders.size(), 1u);
  EXPECT_EQ(sc.bidders[0].fields.at("price"), 10.0);
}

TEST(ScenarioParse, ErrorsCarryLineNumbers) {
  EXPECT_EQ(line_of(minimal("  - id: B\n    submit_at_ms: 500\n    fields: {price: 3}\n")), 15);
  EXPECT_EQ(line_of(minimal("  - id: B\n    submit_at_ms: 2000\n    fields: {cost: 3}\n")), 16);
  EXPECT_EQ(line_of(minimal() + "bogus: 1\n"), 14);
  EXPECT_EQ(line_of(minimal() + "adversary:\n  - {action: DANCE}\n"), 15);
  EXPECT_EQ(line_of(minimal("  - id: B\n    submit_at_ms: 900000\n    fields: {price: 3}\n")), 14);
  // The YAML parser reports an unterminated flow sequence where input ends.
  EXPECT_EQ(line_of("name: [unclosed\n"), 2);
}

TEST(ScenarioParse, EraseOnStatelessIsRejected) {
  auto text = minimal() + "adversary:\n  - {action: ERASE_BID, index: 0}\n";
  text.replace(text.find("FULL_TRACK"), 10, "STATELESS");
  EXPECT_EQ(line_of(text), 15);
}

TEST(BundledScenarios, AllMeetTheirExpectations) {
  const auto files = bundled();
  ASSERT_EQ(files.size(), 12u);
  for (const auto& path : files) {
    const auto outcome = run_scenario(load_scenario(path));
    EXPECT_TRUE(outcome.passed()) << path << ": "
                                  << (outcome.expectation_failures.empty() ? "" : outcome.expectation_failures[0]);
  }
}

TEST(BundledScenarios, EarlyRevealOpensOnlyAfterHandover) {
  const auto outcome = run_scenario(load_scenario(kScenarios / "early_key_reveal.yaml"));
  EXPECT_GT(outcome.sealed_probes, 0u);
  EXPECT_EQ(outcome.sealed_probes_failed, outcome.sealed_probes);
  EXPECT_GT(outcome.opened_probes, 0u);
  EXPECT_EQ(outcome.opened_probes_succeeded, outcome.opened_probes);
  EXPECT_EQ(outcome.report.requirements.at("R2").verdict, audit::Verdict::kPartial);
}

TEST(Compare, TableCarriesSchemeCosts) {
  std::vector<ScenarioOutcome> outcomes;
  for (const char* name : {"full_track_10_bids", "protected_10_bids", "stateless_10_bids"}) {
    outcomes.push_back(run_scenario(load_scenario(kScenarios / (std::string(name) + ".yaml"))));
  }
  const auto table = compare_schemes(outcomes);
  for (const char* token : {"892160", "874791", "352819", "299501", "332788", "156601", "20781", "FULL_TRACK",
                            "PROTECTED", "STATELESS"}) {
    EXPECT_NE(table.find(token), std::string::npos) << token;
  }
  std::istringstream lines(table);
  for (std::string line; std::getline(lines, line);) {
    EXPECT_TRUE(line.empty() || line.back() != ' ') << "trailing space in: " << line;
  }
  EXPECT_EQ(gas_slope(outcomes[0].bidder_bid_gas()), 20781.0);
  EXPECT_EQ(gas_slope(outcomes[2].bidder_bid_gas()), 0.0);
  EXPECT_EQ(outcomes[0].deployment_gas(), 892160u);
}

TEST(Compare, DifferentTendersAreIncomparable) {
  auto a = load_scenario(kScenarios / "full_track_10_bids.yaml");
  auto b = load_scenario(kScenarios / "protected_10_bids.yaml");
  b.tender.limit = 2;
  std::vector<ScenarioOutcome> outcomes{run_scenario(a), run_scenario(b)};
  try {
    compare_schemes(outcomes);
    FAIL() << "expected a throw";
  } catch (const ProtocolError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIncomparableScenarios);
  }
  EXPECT_THROW(compare_schemes({outcomes[0]}), ProtocolError);
}

TEST(Reports, GasCsvHasOneRowPerTransaction) {
  const auto outcome = run_scenario(load_scenario(kScenarios / "full_track_10_bids.yaml"));
  const auto csv = gas_csv(outcome);
  EXPECT_EQ(csv.rfind("tx_index,height,role,call,kind,status,gas_used,simulated_inclusion_delay_ms\n", 0), 0u);
  std::size_t txs = 0;
  for (const auto& b : outcome.exported.blocks) txs += b.transactions.size();
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), txs + 1);
}

TEST(Reports, AreByteIdenticalAcrossRuns) {
  const auto path = kScenarios / "spam_protected.yaml";
  const auto d1 = temp_dir("a");
  const auto d2 = temp_dir("b");
  ASSERT_EQ(run({"run", path.string(), "--out", d1.string()}), 0);
  ASSERT_EQ(run({"run", path.string(), "--out", d2.string()}), 0);
  for (const char* f : {"gas.csv", "audit.txt", "summary.txt", "chain.json"}) {
    const auto a = fixture::read_file((d1 / f).string());
    EXPECT_FALSE(a.empty()) << f;
    EXPECT_EQ(a, fixture::read_file((d2 / f).string())) << f;
  }
  const auto d3 = temp_dir("c");
  ASSERT_EQ(run({"run", path.string(), "--out", d3.string(), "--seed", "999"}), 0);
  EXPECT_NE(fixture::read_file((d1 / "chain.json").string()), fixture::read_file((d3 / "chain.json").string()));
}

TEST(Cli, AuditSubcommandReadsExport) {
  const auto dir = temp_dir("audit");
  ASSERT_EQ(run({"run", (kScenarios / "rigged_winner.yaml").string(), "--out", dir.string()}), 0);
  std::string out;
  EXPECT_EQ(run({"audit", (dir / "chain.json").string()}, &out), 1);
  EXPECT_NE(out.find("AUDIT FAIL"), std::string::npos);

  const auto clean = temp_dir("audit_clean");
  ASSERT_EQ(run({"run", (kScenarios / "stateless_10_bids.yaml").string(), "--out", clean.string()}), 0);
  EXPECT_EQ(run({"audit", (clean / "chain.json").string()}, &out), 0);
  EXPECT_NE(out.find("AUDIT PASS"), std::string::npos);
}

TEST(Cli, ErrorsExitWithTwo) {
  std::string err;
  EXPECT_EQ(run({"run", "/nonexistent/file.yaml"}, nullptr, &err), 2);
  EXPECT_FALSE(err.empty());
  EXPECT_NE(run({"frobnicate"}), 0);
}

TEST(Cli, FailedExpectationExitsWithOne) {
  auto text = fixture::read_file((kScenarios / "rigged_winner.yaml").string());
  text.replace(text.find("winner_match: false"), 19, "winner_match: true");
  const auto dir = temp_dir("expect");
  const auto path = dir / "broken.yaml";
  {
    std::ofstream(path) << text;
  }
  std::string err;
  EXPECT_EQ(run({"run", path.string(), "--out", (dir / "out").string()}, nullptr, &err), 1);
  EXPECT_NE(err.find("expectation failed"), std::string::npos);
}
