#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tender/audit/audit.hpp"
#include "tender/contracts/calls.hpp"
#include "tender/protocol/criteria.hpp"

namespace tender::cli {

enum class ActionKind : std::uint8_t {
  kSpamInvalidCerts,
  kLateBid,
  kForgeCert,
  kEraseBid,
  kRigWinner,
  kEarlyKeyReveal,
  kMutateTender,
};

std::string_view to_string(ActionKind kind);

struct AdversaryAction {
  ActionKind kind = ActionKind::kSpamInvalidCerts;
  // SPAM_INVALID_CERTS
  std::size_t count = 0;
  // LATE_BID, FORGE_CERT (impersonated id), RIG_WINNER, EARLY_KEY_REVEAL
  std::string bidder;
  // ERASE_BID: position in the disclosed bid array
  std::size_t index = 0;
  // MUTATE_TENDER
  contracts::TenderField field = contracts::TenderField::kBiddingEnd;
  // Offset from the tender opening for actions that submit transactions.
  EpochMs at_ms = 0;
  int line = 0;
};

struct ScenarioBidder {
  std::string id;
  EpochMs submit_at_ms = 0;
  std::map<std::string, double> fields;
  std::string text;
  int line = 0;
};

struct Expectation {
  std::optional<bool> winner_match;
  // Exact set of violation tags the audit must report, when given.
  std::optional<std::vector<audit::ViolationTag>> violations;
  std::map<std::string, audit::Verdict> requirements;
  // Expected published winner id; empty string means "no winner".
  std::optional<std::string> winner;
};

enum class ReportKind : std::uint8_t { kGas, kAudit, kSummary, kChain };

struct Scenario {
  std::string name;
  std::string source;
  std::uint64_t seed = 1;
  protocol::TenderSpec tender;
  EpochMs block_interval_ms = 15'000;
  std::vector<ScenarioBidder> bidders;
  std::vector<AdversaryAction> adversary;
  Expectation expect;
  std::vector<ReportKind> reports{ReportKind::kGas, ReportKind::kAudit, ReportKind::kSummary, ReportKind::kChain};

  const ScenarioBidder* find_bidder(std::string_view id) const;
  bool has_action(ActionKind kind) const;
};

/// Parse or validation failure, anchored to a line of the scenario file.
class ScenarioError : public ProtocolError {
 public:
  ScenarioError(std::string source, int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

// Throws ScenarioError.
Scenario parse_scenario(const std::string& text, const std::string& source = "<scenario>");
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace tender::cli
