#pragma once

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tender/contracts/simulator.hpp"
#include "tender/crypto/crypto.hpp"
#include "tender/protocol/criteria.hpp"

namespace tender::protocol {

struct TenderingOrganisation {
  std::string label;
  Address account;
  crypto::AsymmetricKeyPair keys;
};

struct Bidder {
  std::string id;
  Address account;
  // Certificates by tender address.
  std::map<Address, crypto::Certificate> certificates;
};

struct OpenedTender {
  Address rft;
  Address data;
};

struct SubmittedBid {
  Address bid;
  Address data;
  // serialize_half_b() output; stays with the bidder until handed over.
  Bytes withheld_half;
};

/// Out-of-band message from a bidder to the tendering organisation carrying a
/// withheld key half (and, in the stateless scheme, the bid address itself).
struct KeyHandoff {
  std::string from;
  Address bid;
  Bytes half_b;
  EpochMs sent_at = 0;
};

/// In-memory channel with explicit delivery: send() queues a message and
/// deliver() moves everything queued into the recipient's inbox.
class KeyChannel {
 public:
  void send(KeyHandoff message) { queued_.push_back(std::move(message)); }
  // Returns the number of messages delivered by this call.
  std::size_t deliver();

  const std::vector<KeyHandoff>& inbox() const { return inbox_; }
  std::size_t queued() const { return queued_.size(); }
  // Latest delivered half per bid address.
  std::map<Address, Bytes> delivered_halves() const;

 private:
  std::deque<KeyHandoff> queued_;
  std::vector<KeyHandoff> inbox_;
};

enum class BidOutcome : std::uint8_t {
  kScored,
  kInfeasible,
  kInvalid,      // recorded with validity=false
  kUnrevealed,   // no withheld half supplied
  kMalformedCiphertext,
  kIncomplete,   // decrypted but missing a criteria field
};

std::string_view to_string(BidOutcome outcome);

struct EvaluatedBid {
  Address bid;
  std::string bidder_id;
  BidOutcome outcome = BidOutcome::kUnrevealed;
  std::optional<double> score;
  std::optional<BidDocument> document;
};

struct TenderResult {
  contracts::PublishedResults published;
  // Per-bid evaluation detail, in the order bids were considered.
  std::vector<EvaluatedBid> evaluated;

  const std::string& winner_id() const { return published.winner_id; }
  const std::optional<Address>& winner_bid() const { return published.winner_bid; }
};

/// Drives one tender's lifecycle on a Simulator. All randomness flows from the
/// Drbg given at construction, so identical inputs give identical chains.
class Orchestrator {
 public:
  Orchestrator(contracts::Simulator& sim, std::uint64_t seed);

  TenderingOrganisation create_organisation(std::string label);
  Bidder create_bidder(std::string id);

  // Deploys the serialized spec as a data contract, then the RFT referencing it.
  OpenedTender open_tender(const TenderingOrganisation& to, const TenderSpec& spec);

  // Issues a certificate for (bidder.id, rft) and records it in bidder and roster.
  crypto::Certificate register_bidder(const TenderingOrganisation& to, Bidder& bidder, const Address& rft);

  // Encrypts the document under a fresh bid key, deploys the ciphertext,
  // seals the key to the RFT's public key and places the bid with half_a.
  // Requires a certificate for rft unless `certificate` overrides it.
  SubmittedBid submit_sealed_bid(const Bidder& bidder, const Address& rft, const BidDocument& doc,
                                 std::optional<crypto::Certificate> certificate = std::nullopt);

  // Throws kEvaluationBeforeDeadline while now() <= biddingEnd. For the
  // stateless scheme the bid set is the key set of `halves`.
  TenderResult close_and_evaluate(const TenderingOrganisation& to, const Address& rft,
                                  const std::map<Address, Bytes>& halves) const;

  // Submits and mines the results; throws with the revert code (for example
  // kRepublishForbidden) after the rejected transaction is on chain.
  chain::PendingId publish_results(const TenderingOrganisation& to, const Address& rft,
                                   const TenderResult& result);

  // What the TO can read of one bid with its own key plus an optional withheld
  // half. Throws kDecryptionFailed or kAuthFailed.
  Bytes try_open_bid(const TenderingOrganisation& to, const Address& bid,
                     std::optional<ByteView> half_b = std::nullopt) const;

  const std::map<Address, std::vector<std::string>>& roster() const { return roster_; }
  contracts::Simulator& simulator() { return sim_; }
  crypto::Drbg& rng() { return rng_; }

 private:
  contracts::Simulator& sim_;
  crypto::Drbg rng_;
  std::map<Address, std::vector<std::string>> roster_;
};

// Evaluates already-decrypted bids the way both the TO and the auditor do.
// Inputs are (bid address, document) in consideration order.
struct ScoringOutcome {
  std::optional<Address> winner;
  std::vector<contracts::ScoreEntry> scores;
  std::map<Address, BidOutcome> outcomes;
};
ScoringOutcome score_documents(const EvaluationCriteria& criteria,
                               const std::vector<std::pair<Address, BidDocument>>& documents);

}  // namespace tender::protocol
