#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "tender/audit/audit.hpp"
#include "tender/cli/runner.hpp"
#include "tender/contracts/simulator.hpp"
#include "tender/protocol/orchestrator.hpp"

namespace tender::fixture {

struct Tender {
  std::unique_ptr<contracts::Simulator> sim;
  std::unique_ptr<protocol::Orchestrator> orch;
  protocol::TenderingOrganisation to;
  protocol::OpenedTender opened;
  std::vector<protocol::Bidder> bidders;
  std::vector<protocol::SubmittedBid> bids;
  std::vector<protocol::BidDocument> documents;

  const Address& rft() const { return opened.rft; }
  const contracts::RftState& state() const { return sim->read_as<contracts::RftState>(opened.rft); }
  void advance(EpochMs delta) { sim->chain().clock().advance_by(delta); }
  // Moves past biddingEnd and mines one block there.
  void close();
  std::map<Address, Bytes> all_halves() const;
};

protocol::TenderSpec price_spec(contracts::Scheme scheme, EpochMs length_ms = 3'600'000, std::int64_t limit = 1);
protocol::BidDocument price_bid(const std::string& id, double price, double delivery_days = 10);

Tender open_tender(contracts::Scheme scheme, std::uint64_t seed, const protocol::TenderSpec& spec);
// Registers one bidder per document and submits each, `gap_ms` apart.
void submit_all(Tender& t, const std::vector<protocol::BidDocument>& docs, EpochMs gap_ms = 30'000);

struct HonestRun {
  Tender tender;
  protocol::TenderResult result;
  contracts::ChainExport exported;
};

// Open, bid, close, hand over every half, evaluate and publish.
HonestRun honest_run(contracts::Scheme scheme, const protocol::TenderSpec& spec,
                     const std::vector<protocol::BidDocument>& docs, std::uint64_t seed);

struct RandomInstance {
  protocol::TenderSpec spec;
  std::vector<protocol::BidDocument> docs;
};

// 2..max_bidders bidders with integer-valued fields (so ties occur) and random
// weights, one feasibility predicate.
RandomInstance random_instance(crypto::Drbg& rng, contracts::Scheme scheme, std::size_t min_bidders,
                               std::size_t max_bidders);

// Independent winner oracle: recomputes scores from the raw field values and
// compares every feasible pair, without the library's scoring code.
std::optional<std::size_t> brute_force_winner(const protocol::TenderSpec& spec,
                                              const std::vector<protocol::BidDocument>& docs,
                                              const std::vector<Address>& addresses);

std::string read_file(const std::string& path);

}  // namespace tender::fixture
