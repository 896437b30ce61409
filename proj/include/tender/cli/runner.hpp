#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tender/audit/audit.hpp"
#include "tender/cli/scenario.hpp"

namespace tender::cli {

enum class Role : std::uint8_t { kOrganisation, kBidder, kAdversary };

std::string_view to_string(Role role);

struct GasRow {
  std::size_t tx_index = 0;
  std::uint64_t height = 0;
  Role role = Role::kBidder;
  std::string call;
  chain::OperationKind kind = chain::OperationKind::kRevertedCall;
  chain::TxStatus status = chain::TxStatus::kSuccess;
  Gas gas_used = 0;
  // Block timestamp minus virtual submission time. Not a network measurement.
  EpochMs simulated_delay_ms = 0;
};

struct ScenarioOutcome {
  Scenario scenario;
  std::uint64_t seed = 0;
  contracts::ChainExport exported;
  Address rft;
  audit::AuditReport report;
  std::vector<GasRow> gas_rows;
  // Pre-deadline decryption attempts by the TO with only the on-chain half.
  std::size_t sealed_probes = 0;
  std::size_t sealed_probes_failed = 0;
  // Attempts after the withheld half was delivered.
  std::size_t opened_probes = 0;
  std::size_t opened_probes_succeeded = 0;
  std::vector<std::string> notes;
  std::vector<std::string> expectation_failures;

  bool passed() const { return expectation_failures.empty(); }
  Gas deployment_gas() const;
  // Successful bid placements by registered bidders, in order.
  std::vector<Gas> bidder_bid_gas() const;
};

// Runs a scenario end to end: open, bid, adversary actions, close, evaluate,
// publish, export, audit, and compare against the expectation block.
ScenarioOutcome run_scenario(const Scenario& scenario, std::optional<std::uint64_t> seed = std::nullopt);

std::string gas_csv(const ScenarioOutcome& outcome);
std::string summary_text(const ScenarioOutcome& outcome);
// First-difference slope over a gas series; 0 for fewer than two points.
double gas_slope(const std::vector<Gas>& series);

// Writes the reports requested by the scenario into dir.
void write_reports(const ScenarioOutcome& outcome, const std::filesystem::path& dir);

// Throws ProtocolError(kIncomparableScenarios) when the tender specs differ
// other than by scheme, or fewer than two outcomes are given.
std::string compare_schemes(const std::vector<ScenarioOutcome>& outcomes);

// Entry point behind the command-line tool. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tender::cli
