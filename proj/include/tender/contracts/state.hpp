#pragma once

#include <map>
#include <memory_resource>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "tender/common/codec.hpp"
#include "tender/common/types.hpp"

namespace tender::contracts {

enum class Scheme : std::uint8_t { kFullTrack, kProtected, kStateless };

std::string_view to_string(Scheme scheme);
// Accepts FULL_TRACK | PROTECTED | STATELESS; throws ProtocolError(kParseError).
Scheme scheme_from_string(std::string_view name);

// 5000 bits of raw tender or bid data per data contract.
constexpr std::size_t kDefaultMaxDataBits = 5000;

struct ScoreEntry {
  Address bid;
  double score = 0.0;
  bool operator==(const ScoreEntry&) const = default;
};

struct RevealedKey {
  Address bid;
  // Both halves of the sealed bid key.
  Bytes sealed_key;
  // The opened bid key, so citizens can decrypt without the TO's private key.
  Bytes bid_key;
  bool operator==(const RevealedKey&) const = default;
};

/// Evaluation outcome pushed on chain by the tendering organisation.
struct PublishedResults {
  std::string winner_id;  // empty when no feasible bid
  std::optional<Address> winner_bid;
  // Bids the TO states it received, in the order it processed them.
  std::vector<Address> disclosed_bids;
  std::vector<ScoreEntry> scores;
  std::vector<RevealedKey> revealed;

  bool operator==(const PublishedResults&) const = default;
};

/// Request-for-tender contract state. biddingEnd, limit, pubk and the tender
/// data reference are fixed at deployment.
struct RftState {
  Address owner;
  Scheme scheme = Scheme::kFullTrack;
  EpochMs bidding_end = 0;
  std::uint32_t limit = 1;
  Bytes pubk;
  Address tender_data;
  std::map<std::string, std::uint32_t> bid_count;
  // Absent in the stateless scheme.
  std::optional<std::vector<Address>> bids_placed;
  // Number of bid contracts this contract has created.
  std::uint64_t nonce = 0;
  // Write-once.
  std::optional<PublishedResults> results;

  bool operator==(const RftState&) const = default;
};

struct TenderDataContract {
  Address owner;
  Bytes data;

  bool operator==(const TenderDataContract&) const = default;
};

/// On-chain reference to one placed bid. Immutable after creation.
struct BidRecord {
  Address rft;
  std::string id;
  Address data_addr;
  bool validity = false;
  // Full Track / Protected only: the RFT's bidsPlaced when this bid was made.
  std::optional<std::vector<Address>> prior_bids;
  std::optional<EpochMs> bidding_end_copy;
  // total_len | first half of the sealed bid key
  Bytes sealed_half_a;

  bool operator==(const BidRecord&) const = default;
};

using ContractState = std::variant<RftState, TenderDataContract, BidRecord>;

// Addresses are hash outputs, so their leading bytes are already uniform.
struct AddressHash {
  std::size_t operator()(const Address& a) const noexcept {
    std::size_t h = 0;
    for (std::size_t i = 0; i < sizeof h; ++i) h = (h << 8) | a.bytes[i];
    return h;
  }
};

// Hashed for O(1) contract lookup; use sorted_addresses() wherever the
// iteration order reaches an output. Polymorphic so the executor can keep its
// nodes in one pool; copies fall back to the default resource.
using WorldState = std::pmr::unordered_map<Address, ContractState, AddressHash>;

std::vector<Address> sorted_addresses(const WorldState& state);

// Canonical binary encoding, used for the state digest.
void encode_state(ByteWriter& w, const ContractState& state);
Hash32 state_digest(const WorldState& state);

}  // namespace tender::contracts
