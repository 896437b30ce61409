#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tender/common/types.hpp"
#include "tender/contracts/state.hpp"

namespace tender::protocol {

enum class Direction : std::uint8_t { kMinimize, kMaximize };
enum class Comparator : std::uint8_t { kLe, kLt, kGe, kGt, kEq };

std::string_view to_string(Direction d);
std::string_view to_string(Comparator c);
// Throw ProtocolError(kParseError).
Direction direction_from_string(std::string_view name);
Comparator comparator_from_string(std::string_view name);

struct NumericField {
  std::string name;
  double weight = 1.0;
  Direction direction = Direction::kMinimize;
  bool operator==(const NumericField&) const = default;
};

struct FeasibilityPredicate {
  std::string field;
  Comparator comparator = Comparator::kLe;
  double threshold = 0.0;

  bool holds(double value) const;
  bool operator==(const FeasibilityPredicate&) const = default;
};

/// One submitted bid in plaintext.
struct BidDocument {
  std::string bidder_id;
  std::map<std::string, double> fields;
  Bytes text;

  // Sorted key=value lines; see serialize_record for escaping.
  Bytes serialize() const;
  // Throws ProtocolError(kMalformedPayload).
  static BidDocument parse(ByteView data);

  bool operator==(const BidDocument&) const = default;
};

/// Weighted-sum scoring over numeric bid fields, gated by feasibility
/// predicates. Ties go to the lowest bid-contract address.
struct EvaluationCriteria {
  std::vector<NumericField> numeric_fields;
  std::vector<FeasibilityPredicate> predicates;

  // Throws ProtocolError(kInvalidConfig): no fields, non-finite weight or
  // threshold, or a name outside [A-Za-z0-9_].
  void validate() const;
  // Every field named by a numeric field or predicate is present.
  bool complete(const BidDocument& doc) const;
  // Requires complete(doc).
  bool feasible(const BidDocument& doc) const;
  // Sum of weight * value, negated for MINIMIZE. Requires complete(doc).
  double score(const BidDocument& doc) const;

  bool operator==(const EvaluationCriteria&) const = default;
};

struct ScoredBid {
  Address bid;
  double score = 0.0;
  bool feasible = true;
};

// Highest-scoring feasible candidate, lowest address on ties.
std::optional<Address> select_winner(std::span<const ScoredBid> candidates);

/// What the tendering organisation publishes in its tender data contract.
struct TenderSpec {
  std::string title;
  Bytes terms;
  EvaluationCriteria criteria;
  EpochMs length_ms = 0;
  std::int64_t limit = 1;
  contracts::Scheme scheme = contracts::Scheme::kFullTrack;

  Bytes serialize() const;
  // Throws ProtocolError(kMalformedPayload).
  static TenderSpec parse(ByteView data);

  bool operator==(const TenderSpec&) const = default;
};

// Generic canonical record: one "key=value" line per entry in key order.
// Values escape backslash, newline and non-printable bytes as \\, \n, \xHH.
Bytes serialize_record(const std::map<std::string, std::string>& entries);
// Throws ProtocolError(kMalformedPayload) on bad escapes, missing '=',
// duplicate keys or out-of-order keys.
std::map<std::string, std::string> parse_record(ByteView data);

}  // namespace tender::protocol
