#include "tender/protocol/orchestrator.hpp"

#include <algorithm>

namespace tender::protocol {

using contracts::BidRecord;
using contracts::RftState;
using contracts::TenderDataContract;

std::size_t KeyChannel::deliver() {
  const std::size_t n = queued_.size();
  while (!queued_.empty()) {
    inbox_.push_back(std::move(queued_.front()));
    queued_.pop_front();
  }
  return n;
}

std::map<Address, Bytes> KeyChannel::delivered_halves() const {
  std::map<Address, Bytes> out;
  for (const auto& m : inbox_) out[m.bid] = m.half_b;
  return out;
}

std::string_view to_string(BidOutcome outcome) {
  switch (outcome) {
    case BidOutcome::kScored: return "SCORED";
    case BidOutcome::kInfeasible: return "INFEASIBLE";
    case BidOutcome::kInvalid: return "INVALID";
    case BidOutcome::kUnrevealed: return "UNREVEALED";
    case BidOutcome::kMalformedCiphertext: return "MALFORMED_CIPHERTEXT";
    case BidOutcome::kIncomplete: return "INCOMPLETE";
  }
  return "?";
}

ScoringOutcome score_documents(const EvaluationCriteria& criteria,
                               const std::vector<std::pair<Address, BidDocument>>& documents) {
  ScoringOutcome out;
  std::vector<ScoredBid> candidates;
  for (const auto& [bid, doc] : documents) {
    if (!criteria.complete(doc)) {
      out.outcomes[bid] = BidOutcome::kIncomplete;
    } else if (!criteria.feasible(doc)) {
      out.outcomes[bid] = BidOutcome::kInfeasible;
    } else {
      const double s = criteria.score(doc);
      out.outcomes[bid] = BidOutcome::kScored;
      out.scores.push_back({bid, s});
      candidates.push_back({bid, s, true});
    }
  }
  out.winner = select_winner(candidates);
  return out;
}

Orchestrator::Orchestrator(contracts::Simulator& sim, std::uint64_t seed) : sim_(sim), rng_(seed) {}

TenderingOrganisation Orchestrator::create_organisation(std::string label) {
  TenderingOrganisation to;
  to.account = sim_.create_account("org:" + label);
  to.keys = crypto::AsymmetricKeyPair::generate(rng_);
  to.label = std::move(label);
  return to;
}

Bidder Orchestrator::create_bidder(std::string id) {
  Bidder b;
  b.account = sim_.create_account("bidder:" + id);
  b.id = std::move(id);
  return b;
}

OpenedTender Orchestrator::open_tender(const TenderingOrganisation& to, const TenderSpec& spec) {
  spec.criteria.validate();
  OpenedTender out;
  out.data = sim_.deploy_tender_data(to.account, spec.serialize());
  out.rft = sim_.init_tender(to.account, spec.length_ms, to.keys.public_key, spec.limit, spec.scheme,
                             out.data);
  return out;
}

crypto::Certificate Orchestrator::register_bidder(const TenderingOrganisation& to, Bidder& bidder,
                                                  const Address& rft) {
  auto cert = crypto::issue_certificate(to.keys.private_key, bidder.id, rft, rng_);
  bidder.certificates[rft] = cert;
  roster_[rft].push_back(bidder.id);
  return cert;
}

SubmittedBid Orchestrator::submit_sealed_bid(const Bidder& bidder, const Address& rft, const BidDocument& doc,
                                             std::optional<crypto::Certificate> certificate) {
  if (!certificate) {
    auto it = bidder.certificates.find(rft);
    if (it == bidder.certificates.end()) {
      throw ProtocolError(ErrorCode::kCertificateRejected, "bidder " + bidder.id + " is not registered");
    }
    certificate = it->second;
  }
  const auto& tender = sim_.read_as<RftState>(rft);

  const auto key = crypto::BidKey::generate(rng_);
  auto ciphertext = crypto::encrypt_bid(doc.serialize(), key, rng_);
  if (ciphertext.size() * 8 > sim_.max_data_bits()) {
    throw ProtocolError(ErrorCode::kDataTooLarge, "bid ciphertext exceeds the data contract limit");
  }
  const auto sealed = crypto::seal_bid_key(key, tender.pubk, rng_);

  contracts::PlaceBid call;
  call.id = bidder.id;
  call.msg_hash = Bytes(certificate->msg_hash.bytes.begin(), certificate->msg_hash.bytes.end());
  call.v = certificate->v;
  call.r = certificate->r;
  call.s = certificate->s;
  call.sealed_half_a = sealed.serialize_half_a();

  SubmittedBid out;
  out.data = sim_.predict_deploy_address(bidder.account);
  call.data_addr = out.data;
  const auto data_tx = sim_.submit(bidder.account, std::nullopt, contracts::DeployData{std::move(ciphertext)});
  const auto bid_tx = sim_.submit(bidder.account, rft, call);
  sim_.commit();
  sim_.expect_success(data_tx);
  out.bid = *sim_.expect_success(bid_tx);
  out.withheld_half = sealed.serialize_half_b();
  return out;
}

TenderResult Orchestrator::close_and_evaluate(const TenderingOrganisation& to, const Address& rft,
                                              const std::map<Address, Bytes>& halves) const {
  const auto& tender = sim_.read_as<RftState>(rft);
  if (sim_.now() <= tender.bidding_end) {
    throw ProtocolError(ErrorCode::kEvaluationBeforeDeadline, "bidding still open");
  }
  const auto spec = TenderSpec::parse(sim_.read_as<TenderDataContract>(tender.tender_data).data);

  std::vector<Address> bids;
  if (tender.bids_placed) {
    bids = sim_.req_bids(rft);
  } else {
    for (const auto& [addr, half] : halves) {
      auto it = sim_.state().find(addr);
      if (it == sim_.state().end()) continue;
      const auto* record = std::get_if<BidRecord>(&it->second);
      if (record != nullptr && record->rft == rft) bids.push_back(addr);
    }
  }

  TenderResult result;
  result.published.disclosed_bids = bids;
  std::vector<std::pair<Address, BidDocument>> documents;
  for (const auto& addr : bids) {
    const auto& record = sim_.read_as<BidRecord>(addr);
    EvaluatedBid eval{addr, record.id, BidOutcome::kUnrevealed, std::nullopt, std::nullopt};
    auto half = halves.find(addr);
    if (!record.validity) {
      eval.outcome = BidOutcome::kInvalid;
    } else if (half != halves.end()) {
      try {
        const auto sealed = crypto::SealedBidKey::from_half_a(record.sealed_half_a).with_half_b(half->second);
        const auto joined = sealed.joined();
        const auto key = crypto::unseal_bid_key(joined, to.keys.private_key);
        result.published.revealed.push_back({addr, joined, Bytes(key.view().begin(), key.view().end())});
        const auto& ct = sim_.read_as<TenderDataContract>(record.data_addr).data;
        eval.document = BidDocument::parse(crypto::decrypt_bid(ct, key));
        documents.emplace_back(addr, *eval.document);
      } catch (const ProtocolError&) {
        eval.outcome = BidOutcome::kMalformedCiphertext;
      }
    }
    result.evaluated.push_back(std::move(eval));
  }

  const auto scoring = score_documents(spec.criteria, documents);
  for (auto& eval : result.evaluated) {
    auto it = scoring.outcomes.find(eval.bid);
    if (it == scoring.outcomes.end()) continue;
    eval.outcome = it->second;
    for (const auto& s : scoring.scores) {
      if (s.bid == eval.bid) eval.score = s.score;
    }
  }
  result.published.scores = scoring.scores;
  result.published.winner_bid = scoring.winner;
  if (scoring.winner) result.published.winner_id = sim_.read_as<BidRecord>(*scoring.winner).id;
  return result;
}

chain::PendingId Orchestrator::publish_results(const TenderingOrganisation& to, const Address& rft,
                                               const TenderResult& result) {
  const auto id = sim_.submit(to.account, rft, contracts::PublishResults{result.published});
  sim_.commit();
  sim_.expect_success(id);
  return id;
}

Bytes Orchestrator::try_open_bid(const TenderingOrganisation& to, const Address& bid,
                                 std::optional<ByteView> half_b) const {
  const auto& record = sim_.read_as<BidRecord>(bid);
  auto sealed = crypto::SealedBidKey::from_half_a(record.sealed_half_a);
  if (half_b) sealed = sealed.with_half_b(*half_b);
  const auto key = crypto::unseal_bid_key(sealed.joined(), to.keys.private_key);
  return crypto::decrypt_bid(sim_.read_as<TenderDataContract>(record.data_addr).data, key);
}

}  // namespace tender::protocol
