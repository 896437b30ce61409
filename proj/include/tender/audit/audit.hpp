#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tender/contracts/export.hpp"

namespace tender::audit {

enum class ViolationTag : std::uint8_t {
  kR1,
  kR2,
  kR3,
  kR4,
  kR5,
  kR6,
  kErasure,
  kNonreceipt,
  kWinnerMismatch,
  kUndecryptableBid,
  kRepublish,
};

std::string_view to_string(ViolationTag tag);
// Throws ProtocolError(kParseError).
ViolationTag violation_tag_from_string(std::string_view name);

struct Violation {
  ViolationTag tag;
  std::uint64_t height = 0;
  std::string description;
  bool operator==(const Violation&) const = default;
};

enum class Verdict : std::uint8_t { kPass, kPartial, kFail };

std::string_view to_string(Verdict verdict);
// Throws ProtocolError(kParseError).
Verdict verdict_from_string(std::string_view name);

struct RequirementVerdict {
  Verdict verdict = Verdict::kPass;
  std::string evidence;
  bool operator==(const RequirementVerdict&) const = default;
};

// Keys "R1".."R6".
using RequirementMap = std::map<std::string, RequirementVerdict>;

struct GasTraceEntry {
  std::uint64_t height = 0;
  std::size_t index = 0;
  chain::OperationKind kind = chain::OperationKind::kRevertedCall;
  chain::TxStatus status = chain::TxStatus::kSuccess;
  Gas gas_used = 0;
  bool operator==(const GasTraceEntry&) const = default;
};

struct TimelineEvent {
  std::string event;
  std::uint64_t height = 0;
  EpochMs timestamp = 0;
  bool operator==(const TimelineEvent&) const = default;
};

struct AuditReport {
  Address tender;
  contracts::Scheme scheme = contracts::Scheme::kFullTrack;
  std::optional<Address> recomputed_winner;
  std::string recomputed_winner_id;
  std::optional<Address> published_winner;
  std::string published_winner_id;
  bool winner_match = false;
  std::vector<Violation> violations;
  std::vector<GasTraceEntry> gas_trace;
  std::vector<TimelineEvent> timeline;
  RequirementMap requirements;
  // Valid bids whose keys were never published; excluded from scoring.
  std::vector<Address> unrevealed;
  std::size_t bids_considered = 0;

  bool has(ViolationTag tag) const;
  bool clean() const { return violations.empty() && winner_match; }

  std::string to_text() const;
  // "AUDIT PASS ..." or "AUDIT FAIL ..." on one line.
  std::string summary_line() const;

  bool operator==(const AuditReport&) const = default;
};

// Replays the exported chain using public data only: block links, receipts,
// transaction payloads, disclosed contract state and the published keys.
// Throws ProtocolError(kResultsNotPublished) or kNoSuchContract.
AuditReport replay_and_audit(const contracts::ChainExport& chain, const Address& rft);

// The R1..R6 verdict map of replay_and_audit.
RequirementMap check_requirements(const contracts::ChainExport& chain, const Address& rft);

// Tender contracts in the export, in creation order.
std::vector<Address> find_tenders(const contracts::ChainExport& chain);

}  // namespace tender::audit
