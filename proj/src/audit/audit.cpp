#include "tender/audit/audit.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "tender/contracts/calls.hpp"
#include "tender/contracts/executor.hpp"
#include "tender/crypto/crypto.hpp"
#include "tender/protocol/orchestrator.hpp"

namespace tender::audit {

using chain::OperationKind;
using chain::TxStatus;
using contracts::BidRecord;
using contracts::ChainExport;
using contracts::RftState;
using contracts::Scheme;
using contracts::TenderDataContract;

std::string_view to_string(ViolationTag tag) {
  switch (tag) {
    case ViolationTag::kR1: return "R1";
    case ViolationTag::kR2: return "R2";
    case ViolationTag::kR3: return "R3";
    case ViolationTag::kR4: return "R4";
    case ViolationTag::kR5: return "R5";
    case ViolationTag::kR6: return "R6";
    case ViolationTag::kErasure: return "ERASURE";
    case ViolationTag::kNonreceipt: return "NONRECEIPT";
    case ViolationTag::kWinnerMismatch: return "WINNER_MISMATCH";
    case ViolationTag::kUndecryptableBid: return "UNDECRYPTABLE_BID";
    case ViolationTag::kRepublish: return "REPUBLISH";
  }
  return "?";
}

ViolationTag violation_tag_from_string(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(ViolationTag::kRepublish); ++i) {
    const auto tag = static_cast<ViolationTag>(i);
    if (to_string(tag) == name) return tag;
  }
  throw ProtocolError(ErrorCode::kParseError, "unknown violation tag '" + std::string(name) + "'");
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::kPass: return "PASS";
    case Verdict::kPartial: return "PARTIAL";
    case Verdict::kFail: return "FAIL";
  }
  return "?";
}

Verdict verdict_from_string(std::string_view name) {
  for (auto v : {Verdict::kPass, Verdict::kPartial, Verdict::kFail}) {
    if (to_string(v) == name) return v;
  }
  throw ProtocolError(ErrorCode::kParseError, "unknown verdict '" + std::string(name) + "'");
}

bool AuditReport::has(ViolationTag tag) const {
  return std::any_of(violations.begin(), violations.end(), [&](const auto& v) { return v.tag == tag; });
}

namespace {

std::string winner_text(const std::optional<Address>& bid, const std::string& id) {
  if (!bid) return "none";
  return (id.empty() ? std::string("?") : id) + " (" + bid->hex() + ")";
}

struct TxRef {
  const chain::Block* block;
  std::size_t index;
  const chain::Transaction* tx;
};

struct PlacedBid {
  Address addr;
  std::string id;
  Address data_addr;
  Bytes sealed_half_a;
  bool validity = false;
  std::uint64_t height = 0;
};

class Auditor {
 public:
  Auditor(const ChainExport& chain, const Address& rft) : chain_(chain), rft_(rft) {}

  AuditReport run();

 private:
  void flag(ViolationTag tag, std::uint64_t height, std::string description) {
    report_.violations.push_back({tag, height, std::move(description)});
  }
  void check_gas(const TxRef& ref, OperationKind kind, Gas expected);
  void check_structure();
  void check_deployment();
  void check_tender_data();
  void replay_calls();
  void place_bid(const TxRef& ref, const contracts::PlaceBid& call);
  void publish(const TxRef& ref, const contracts::PublishResults& call);
  void check_disclosed_state();
  void check_results();
  void grade();

  const ChainExport& chain_;
  Address rft_;
  AuditReport report_;

  const RftState* state_ = nullptr;
  std::vector<TxRef> txs_;
  std::map<Address, TxRef> creators_;

  // Parameters as fixed by the deployment transaction.
  Address owner_;
  Scheme scheme_ = Scheme::kFullTrack;
  EpochMs bidding_end_ = 0;
  std::uint32_t limit_ = 1;
  Bytes pubk_;
  Address tender_data_;
  std::optional<protocol::TenderSpec> spec_;

  // Replayed bid state.
  std::vector<PlacedBid> placed_;
  std::vector<Address> expected_array_;
  std::map<std::string, std::uint32_t> counts_;
  std::uint64_t nonce_ = 0;
  std::size_t rejected_certificates_ = 0;
  std::uint64_t first_rejected_height_ = 0;
  bool forged_accepted_ = false;

  std::optional<contracts::PublishedResults> results_;
  std::uint64_t results_height_ = 0;
};

void Auditor::check_gas(const TxRef& ref, OperationKind kind, Gas expected) {
  const auto& tx = *ref.tx;
  if (tx.kind != kind || tx.gas_used != expected) {
    flag(ViolationTag::kR6, ref.block->height,
         "transaction " + tx.tx_hash.hex() + " charged " + std::to_string(tx.gas_used) + " gas as " +
             std::string(chain::to_string(tx.kind)) + ", replay meters " + std::to_string(expected) + " as " +
             std::string(chain::to_string(kind)));
  }
}

void Auditor::check_structure() {
  for (const auto& issue : chain::verify_chain(chain_.blocks)) {
    const auto tag = issue.kind == chain::LinkIssue::Kind::kTxHashMismatch ? ViolationTag::kR3 : ViolationTag::kR6;
    flag(tag, issue.height, std::string(chain::to_string(issue.kind)) + ": " + issue.detail);
  }
  for (const auto& block : chain_.blocks) {
    for (std::size_t i = 0; i < block.transactions.size(); ++i) {
      const auto& tx = block.transactions[i];
      TxRef ref{&block, i, &tx};
      txs_.push_back(ref);
      report_.gas_trace.push_back({block.height, i, tx.kind, tx.status, tx.gas_used});
      if (tx.status == TxStatus::kSuccess && tx.created) creators_.emplace(*tx.created, ref);
    }
  }
}

void Auditor::check_deployment() {
  owner_ = state_->owner;
  scheme_ = state_->scheme;
  bidding_end_ = state_->bidding_end;
  limit_ = state_->limit;
  pubk_ = state_->pubk;
  tender_data_ = state_->tender_data;
  report_.scheme = scheme_;

  auto it = creators_.find(rft_);
  std::optional<contracts::DeployRft> deploy;
  if (it != creators_.end()) {
    try {
      auto call = contracts::decode_call(it->second.tx->payload);
      if (auto* d = std::get_if<contracts::DeployRft>(&call)) deploy = *d;
    } catch (const ProtocolError&) {
    }
  }
  if (!deploy) {
    flag(ViolationTag::kR1, 0, "no deployment transaction creates tender " + rft_.hex());
    return;
  }
  const auto& ref = it->second;
  const auto h = ref.block->height;
  report_.timeline.push_back({"tender deployed", h, ref.block->timestamp});

  owner_ = ref.tx->sender;
  scheme_ = deploy->scheme;
  bidding_end_ = ref.block->timestamp + deploy->length_ms;
  limit_ = static_cast<std::uint32_t>(deploy->limit);
  pubk_ = deploy->pubk;
  tender_data_ = deploy->tender_data;

  const OperationKind kind = scheme_ == Scheme::kFullTrack   ? OperationKind::kDeployRftFull
                             : scheme_ == Scheme::kProtected ? OperationKind::kDeployRftProtected
                                                             : OperationKind::kDeployRftStateless;
  check_gas(ref, kind, chain::meter_gas(chain_.gas, kind, {}));

  auto differs = [&](const char* field) { flag(ViolationTag::kR1, h, std::string(field) + " differs from deployment"); };
  if (state_->owner != owner_) differs("owner");
  if (state_->scheme != scheme_) differs("scheme");
  if (state_->bidding_end != bidding_end_) differs("biddingEnd");
  if (state_->limit != limit_) differs("limit");
  if (state_->pubk != pubk_) differs("pubk");
  if (state_->tender_data != tender_data_) differs("tender data reference");
  report_.scheme = scheme_;
}

void Auditor::check_tender_data() {
  Bytes data;
  auto it = creators_.find(tender_data_);
  bool from_tx = false;
  if (it != creators_.end()) {
    try {
      auto call = contracts::decode_call(it->second.tx->payload);
      if (auto* d = std::get_if<contracts::DeployData>(&call)) {
        data = d->data;
        from_tx = true;
      }
    } catch (const ProtocolError&) {
    }
  }
  auto sit = chain_.state.find(tender_data_);
  const auto* disclosed = sit == chain_.state.end() ? nullptr : std::get_if<TenderDataContract>(&sit->second);
  if (!from_tx) {
    flag(ViolationTag::kR1, 0, "no deployment transaction for tender data " + tender_data_.hex());
    if (disclosed != nullptr) data = disclosed->data;
  } else if (disclosed == nullptr || disclosed->data != data) {
    flag(ViolationTag::kR1, it->second.block->height, "tender data differs from its deployment payload");
  }
  try {
    spec_ = protocol::TenderSpec::parse(data);
  } catch (const ProtocolError& e) {
    flag(ViolationTag::kR1, 0, std::string("tender data is not a readable tender spec: ") + e.what());
  }
}

void Auditor::replay_calls() {
  for (const auto& ref : txs_) {
    const auto& tx = *ref.tx;
    if (!tx.target || (*tx.target != rft_ && *tx.target != tender_data_)) continue;
    contracts::Call call;
    try {
      call = contracts::decode_call(tx.payload);
    } catch (const ProtocolError&) {
      if (tx.status == TxStatus::kSuccess) flag(ViolationTag::kR6, ref.block->height, "undecodable call executed");
      check_gas(ref, OperationKind::kRevertedCall, chain_.gas.reverted_call);
      continue;
    }
    if (*tx.target == rft_ && std::holds_alternative<contracts::PlaceBid>(call)) {
      place_bid(ref, std::get<contracts::PlaceBid>(call));
    } else if (*tx.target == rft_ && std::holds_alternative<contracts::PublishResults>(call)) {
      publish(ref, std::get<contracts::PublishResults>(call));
    } else {
      if (tx.status == TxStatus::kSuccess) {
        const bool mutation = std::holds_alternative<contracts::MutateTender>(call);
        flag(mutation ? ViolationTag::kR1 : ViolationTag::kR6, ref.block->height,
             mutation ? "tender mutation accepted" : "call executed against the wrong contract");
      }
      check_gas(ref, OperationKind::kRevertedCall, chain_.gas.reverted_call);
    }
  }
}

void Auditor::place_bid(const TxRef& ref, const contracts::PlaceBid& call) {
  const auto& tx = *ref.tx;
  const auto h = ref.block->height;
  const bool shape = contracts::certificate_well_formed(call);
  bool valid_hash = false;
  if (shape) {
    valid_hash = Hash32::from_span(call.msg_hash) == crypto::certificate_message(call.id, rft_) &&
                 crypto::verify_certificate(pubk_, call.msg_hash, call.v, call.r, call.s);
  }
  if (!valid_hash) {
    if (rejected_certificates_++ == 0) first_rejected_height_ = h;
  }
  const bool expect_revert = !shape || (scheme_ == Scheme::kProtected && !valid_hash);
  const bool succeeded = tx.status == TxStatus::kSuccess;

  if (expect_revert && succeeded) {
    if (shape) {
      forged_accepted_ = true;
      flag(ViolationTag::kR5, h, "bid by '" + call.id + "' with an invalid certificate was accepted");
    } else {
      flag(ViolationTag::kR6, h, "bid with a malformed certificate was executed");
    }
  } else if (!expect_revert && !succeeded) {
    flag(ViolationTag::kR6, h, "bid by '" + call.id + "' reverted although the contract accepts it");
  }
  if (!succeeded) {
    check_gas(ref, OperationKind::kRevertedCall, chain_.gas.reverted_call);
    return;
  }

  const OperationKind kind = scheme_ == Scheme::kFullTrack   ? OperationKind::kPlaceBidFull
                             : scheme_ == Scheme::kProtected ? OperationKind::kPlaceBidProtected
                                                             : OperationKind::kPlaceBidStateless;
  const bool tracked = scheme_ != Scheme::kStateless;
  check_gas(ref, kind, chain::meter_gas(chain_.gas, kind, {.prior_bids = tracked ? expected_array_.size() : 0}));

  const bool valid_time = ref.block->timestamp < bidding_end_;
  const std::uint32_t count = counts_[call.id];
  const bool allowed = count < limit_;
  const bool validity = valid_hash && valid_time && allowed;
  if (validity) counts_[call.id] = count + 1;

  const auto expected_addr = chain::derive_contract_address(rft_, nonce_++);
  if (tx.created != expected_addr) flag(ViolationTag::kR6, h, "bid contract address differs from replay");
  const Address addr = tx.created.value_or(expected_addr);
  report_.timeline.push_back({"bid placed by " + call.id, h, ref.block->timestamp});

  auto sit = chain_.state.find(addr);
  const auto* record = sit == chain_.state.end() ? nullptr : std::get_if<BidRecord>(&sit->second);
  if (record == nullptr) {
    flag(ViolationTag::kErasure, h, "bid record " + addr.hex() + " by '" + call.id + "' is missing from state");
  } else {
    if (record->rft != rft_ || record->id != call.id || record->data_addr != call.data_addr ||
        record->sealed_half_a != call.sealed_half_a) {
      flag(ViolationTag::kR3, h, "bid record " + addr.hex() + " differs from its placing transaction");
    }
    if (record->validity && !validity) {
      if (!valid_hash) {
        forged_accepted_ = true;
        flag(ViolationTag::kR5, h, "bid " + addr.hex() + " with an invalid certificate is marked valid");
      } else if (!valid_time) {
        flag(ViolationTag::kR6, h, "bid " + addr.hex() + " placed after biddingEnd is marked valid");
      } else {
        flag(ViolationTag::kR3, h, "bid " + addr.hex() + " over the bid limit is marked valid");
      }
    } else if (!record->validity && validity) {
      flag(ViolationTag::kR3, h, "valid bid " + addr.hex() + " is marked invalid");
    }
    const std::optional<std::vector<Address>> snapshot =
        tracked ? std::optional(expected_array_) : std::nullopt;
    const std::optional<EpochMs> end_copy = tracked ? std::optional(bidding_end_) : std::nullopt;
    if (record->prior_bids != snapshot && record->prior_bids && snapshot) {
      // Erasure shows up as a snapshot that the disclosed array contradicts;
      // that is checked against the array itself below.
      const auto& disclosed = state_->bids_placed;
      const bool consistent_with_disclosed =
          disclosed && record->prior_bids->size() <= disclosed->size() &&
          std::equal(record->prior_bids->begin(), record->prior_bids->end(), disclosed->begin());
      if (consistent_with_disclosed) {
        flag(ViolationTag::kR3, h, "prior-bid snapshot of " + addr.hex() + " differs from replay");
      }
    } else if (record->prior_bids.has_value() != snapshot.has_value()) {
      flag(ViolationTag::kR3, h, "prior-bid snapshot of " + addr.hex() + " has the wrong shape");
    }
    if (record->bidding_end_copy != end_copy) {
      flag(ViolationTag::kR3, h, "biddingEnd copy in " + addr.hex() + " differs from the tender");
    }
  }
  if (tracked) expected_array_.push_back(addr);
  placed_.push_back({addr, call.id, call.data_addr, call.sealed_half_a, validity, h});
}

void Auditor::publish(const TxRef& ref, const contracts::PublishResults& call) {
  const auto& tx = *ref.tx;
  const auto h = ref.block->height;
  const bool succeeded = tx.status == TxStatus::kSuccess;
  if (!call.results.revealed.empty() && ref.block->timestamp <= bidding_end_) {
    flag(ViolationTag::kR2, h, "bid keys published on chain before biddingEnd");
  }
  if (results_) {
    flag(ViolationTag::kRepublish, h,
         std::string("second publication attempt") + (succeeded ? " was accepted" : " (rejected)"));
  } else if (succeeded) {
    if (tx.sender != owner_) flag(ViolationTag::kR6, h, "results accepted from a non-owner account");
    if (ref.block->timestamp <= bidding_end_) flag(ViolationTag::kR6, h, "results accepted before biddingEnd");
    results_ = call.results;
    results_height_ = h;
    report_.timeline.push_back({"results published", h, ref.block->timestamp});
  }
  if (succeeded) {
    check_gas(ref, OperationKind::kPublishResults,
              chain::meter_gas(chain_.gas, OperationKind::kPublishResults, {.payload_bytes = tx.payload.size()}));
  } else {
    check_gas(ref, OperationKind::kRevertedCall, chain_.gas.reverted_call);
  }
}

void Auditor::check_disclosed_state() {
  std::set<Address> replayed;
  for (const auto& p : placed_) replayed.insert(p.addr);
  for (const auto& addr : contracts::sorted_addresses(chain_.state)) {
    const auto* record = std::get_if<BidRecord>(&chain_.state.at(addr));
    if (record != nullptr && record->rft == rft_ && !replayed.contains(addr)) {
      flag(ViolationTag::kR3, 0, "bid record " + addr.hex() + " has no placing transaction");
    }
  }

  std::map<std::string, std::uint32_t> counts;
  for (const auto& [id, n] : counts_) {
    if (n > 0) counts[id] = n;
  }
  std::map<std::string, std::uint32_t> disclosed_counts;
  for (const auto& [id, n] : state_->bid_count) {
    if (n > 0) disclosed_counts[id] = n;
  }
  if (counts != disclosed_counts) flag(ViolationTag::kR3, 0, "bidCount differs from replay");
  if (state_->nonce != nonce_) flag(ViolationTag::kR3, 0, "bid contract counter differs from replay");

  if (scheme_ == Scheme::kStateless) {
    if (state_->bids_placed) flag(ViolationTag::kR3, 0, "stateless tender discloses a bid array");
    return;
  }
  if (!state_->bids_placed) {
    flag(ViolationTag::kErasure, 0, "bidsPlaced array is missing");
    return;
  }
  const auto& disclosed = *state_->bids_placed;
  const std::set<Address> disclosed_set(disclosed.begin(), disclosed.end());
  std::set<Address> erased;
  // Snapshot check: every address a bid record saw before it must still be in
  // the disclosed array.
  for (const auto& p : placed_) {
    auto sit = chain_.state.find(p.addr);
    const auto* record = sit == chain_.state.end() ? nullptr : std::get_if<BidRecord>(&sit->second);
    if (record == nullptr || !record->prior_bids) continue;
    for (const auto& seen : *record->prior_bids) {
      if (!disclosed_set.contains(seen) && erased.insert(seen).second) {
        flag(ViolationTag::kErasure, p.height,
             "snapshot in bid " + p.addr.hex() + " lists " + seen.hex() + " but bidsPlaced does not");
      }
    }
  }
  for (const auto& p : placed_) {
    if (!disclosed_set.contains(p.addr) && erased.insert(p.addr).second) {
      flag(ViolationTag::kErasure, p.height, "bid " + p.addr.hex() + " is missing from bidsPlaced");
    }
  }
  for (const auto& addr : disclosed) {
    if (!replayed.contains(addr)) flag(ViolationTag::kR3, 0, "bidsPlaced lists unknown entry " + addr.hex());
  }
  if (erased.empty() && disclosed != expected_array_) {
    flag(ViolationTag::kR3, 0, "bidsPlaced order differs from replay");
  }
}

void Auditor::check_results() {
  if (!results_) {
    if (!state_->results) {
      throw ProtocolError(ErrorCode::kResultsNotPublished, "no results published for " + rft_.hex());
    }
    flag(ViolationTag::kR3, 0, "results present in state without a publishing transaction");
    results_ = state_->results;
  } else if (state_->results != results_) {
    flag(ViolationTag::kR3, results_height_, "disclosed results differ from the published transaction");
  }
  const auto& results = *results_;
  const auto h = results_height_;
  report_.published_winner = results.winner_bid;
  report_.published_winner_id = results.winner_id;

  std::set<Address> disclosed(results.disclosed_bids.begin(), results.disclosed_bids.end());
  std::set<Address> replayed;
  for (const auto& p : placed_) {
    replayed.insert(p.addr);
    if (disclosed.contains(p.addr)) continue;
    if (scheme_ == Scheme::kStateless) {
      if (p.validity) flag(ViolationTag::kNonreceipt, h, "valid bid " + p.addr.hex() + " by '" + p.id + "' was not disclosed");
    } else {
      flag(ViolationTag::kErasure, h, "results omit bid " + p.addr.hex() + " by '" + p.id + "'");
    }
  }
  for (const auto& addr : results.disclosed_bids) {
    if (!replayed.contains(addr)) flag(ViolationTag::kR3, h, "results disclose unknown bid " + addr.hex());
  }

  std::map<Address, const contracts::RevealedKey*> revealed;
  for (const auto& k : results.revealed) revealed.emplace(k.bid, &k);

  std::vector<std::pair<Address, protocol::BidDocument>> documents;
  for (const auto& p : placed_) {
    if (!p.validity) continue;
    ++report_.bids_considered;
    auto it = revealed.find(p.addr);
    if (it == revealed.end()) {
      report_.unrevealed.push_back(p.addr);
      continue;
    }
    const auto& key = *it->second;
    try {
      const auto half_a = crypto::SealedBidKey::from_half_a(p.sealed_half_a);
      if (key.sealed_key.size() != half_a.total_len ||
          !std::equal(half_a.half_a.begin(), half_a.half_a.end(), key.sealed_key.begin())) {
        flag(ViolationTag::kR3, h, "published sealed key of " + p.addr.hex() + " does not extend its on-chain half");
      }
    } catch (const ProtocolError&) {
      flag(ViolationTag::kR3, h, "on-chain key half of " + p.addr.hex() + " is malformed");
    }

    Bytes ciphertext;
    auto cit = creators_.find(p.data_addr);
    std::optional<Bytes> deployed;
    if (cit != creators_.end()) {
      try {
        auto call = contracts::decode_call(cit->second.tx->payload);
        if (auto* d = std::get_if<contracts::DeployData>(&call)) deployed = d->data;
      } catch (const ProtocolError&) {
      }
    }
    auto sit = chain_.state.find(p.data_addr);
    const auto* data = sit == chain_.state.end() ? nullptr : std::get_if<TenderDataContract>(&sit->second);
    if (data != nullptr) {
      ciphertext = data->data;
      if (deployed && *deployed != ciphertext) {
        flag(ViolationTag::kR3, p.height, "ciphertext of " + p.addr.hex() + " differs from its deployment payload");
      }
    } else if (deployed) {
      ciphertext = *deployed;
    }
    try {
      const auto bid_key = crypto::BidKey::from_bytes(key.bid_key);
      auto doc = protocol::BidDocument::parse(crypto::decrypt_bid(ciphertext, bid_key));
      if (doc.bidder_id != p.id) {
        flag(ViolationTag::kR3, p.height, "bid " + p.addr.hex() + " decrypts to a document for '" + doc.bidder_id + "'");
      }
      documents.emplace_back(p.addr, std::move(doc));
    } catch (const std::exception& e) {
      flag(ViolationTag::kUndecryptableBid, p.height, "bid " + p.addr.hex() + " by '" + p.id + "': " + e.what());
    }
  }

  if (spec_) {
    const auto scoring = protocol::score_documents(spec_->criteria, documents);
    report_.recomputed_winner = scoring.winner;
    if (scoring.winner) {
      for (const auto& p : placed_) {
        if (p.addr == *scoring.winner) report_.recomputed_winner_id = p.id;
      }
    }
    std::map<Address, double> recomputed;
    for (const auto& s : scoring.scores) recomputed[s.bid] = s.score;
    std::map<Address, double> published;
    for (const auto& s : results.scores) published[s.bid] = s.score;
    if (recomputed != published) flag(ViolationTag::kWinnerMismatch, h, "published scores differ from recomputation");
  }
  report_.winner_match = report_.recomputed_winner == report_.published_winner &&
                         report_.recomputed_winner_id == report_.published_winner_id;
  if (!report_.winner_match) {
    flag(ViolationTag::kWinnerMismatch, h,
         "published winner " + winner_text(report_.published_winner, report_.published_winner_id) +
             ", recomputed " + winner_text(report_.recomputed_winner, report_.recomputed_winner_id));
  }
}

void Auditor::grade() {
  auto& req = report_.requirements;
  auto count = [&](std::initializer_list<ViolationTag> tags) {
    return std::count_if(report_.violations.begin(), report_.violations.end(), [&](const auto& v) {
      return std::find(tags.begin(), tags.end(), v.tag) != tags.end();
    });
  };
  auto evidence_of = [](long n, const char* what) { return std::to_string(n) + " " + what; };

  const auto r1 = count({ViolationTag::kR1});
  req["R1"] = r1 ? RequirementVerdict{Verdict::kFail, evidence_of(r1, "tender mutation findings")}
                 : RequirementVerdict{Verdict::kPass, "tender parameters and data match their deployment"};

  const auto r2 = count({ViolationTag::kR2});
  req["R2"] = r2 ? RequirementVerdict{Verdict::kFail, "bid keys appeared on chain before biddingEnd"}
                 : RequirementVerdict{Verdict::kPartial,
                                      "no on-chain key before biddingEnd; off-chain early hand-over is not enforceable"};

  const auto r3 = count({ViolationTag::kR3, ViolationTag::kUndecryptableBid, ViolationTag::kErasure});
  req["R3"] = r3 ? RequirementVerdict{Verdict::kFail, evidence_of(r3, "bid integrity findings")}
                 : RequirementVerdict{Verdict::kPass, "all bid records and ciphertexts match their transactions"};

  req["R4"] = scheme_ == Scheme::kStateless
                  ? RequirementVerdict{Verdict::kPass, "no bid list is kept on the tender contract"}
                  : RequirementVerdict{Verdict::kPartial, "bid existence is visible on chain before biddingEnd"};

  const std::string spam = rejected_certificates_ == 0
                               ? std::string("no rejected certificates")
                               : std::to_string(rejected_certificates_) + " rejected certificates";
  if (forged_accepted_ || count({ViolationTag::kNonreceipt}) > 0) {
    req["R5"] = {Verdict::kFail, forged_accepted_ ? "an invalid certificate was accepted" : "a valid bid was not received"};
  } else if (scheme_ == Scheme::kStateless) {
    req["R5"] = {Verdict::kPass, "flat bid cost; " + spam};
  } else if (scheme_ == Scheme::kProtected) {
    req["R5"] = {Verdict::kPartial, "unverified bids are rejected but every bid grows the array; " + spam};
  } else {
    req["R5"] = {Verdict::kPartial, "unverified bids are recorded and raise later bid cost; " + spam};
  }

  const auto r6 = count({ViolationTag::kR6});
  req["R6"] = r6 ? RequirementVerdict{Verdict::kFail, evidence_of(r6, "chain or execution findings")}
                 : RequirementVerdict{Verdict::kPass, "hash links, timestamps and receipts replay cleanly"};
}

AuditReport Auditor::run() {
  report_.tender = rft_;
  auto it = chain_.state.find(rft_);
  if (it == chain_.state.end() || !std::holds_alternative<RftState>(it->second)) {
    throw ProtocolError(ErrorCode::kNoSuchContract, "no tender at " + rft_.hex());
  }
  state_ = &std::get<RftState>(it->second);

  check_structure();
  check_deployment();
  check_tender_data();
  replay_calls();
  if (rejected_certificates_ > 0) {
    flag(ViolationTag::kR5, first_rejected_height_,
         std::to_string(rejected_certificates_) + " bid placements carried invalid certificates");
  }
  check_disclosed_state();
  check_results();
  report_.timeline.push_back({"bidding end", 0, bidding_end_});
  std::stable_sort(report_.timeline.begin(), report_.timeline.end(),
                   [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
  grade();
  return std::move(report_);
}

}  // namespace

AuditReport replay_and_audit(const ChainExport& chain, const Address& rft) { return Auditor(chain, rft).run(); }

RequirementMap check_requirements(const ChainExport& chain, const Address& rft) {
  return replay_and_audit(chain, rft).requirements;
}

std::vector<Address> find_tenders(const ChainExport& chain) {
  std::vector<Address> out;
  for (const auto& block : chain.blocks) {
    for (const auto& tx : block.transactions) {
      if (tx.status != TxStatus::kSuccess || !tx.created) continue;
      auto it = chain.state.find(*tx.created);
      if (it != chain.state.end() && std::holds_alternative<RftState>(it->second)) out.push_back(*tx.created);
    }
  }
  return out;
}

std::string AuditReport::to_text() const {
  std::ostringstream out;
  out << "tender " << tender.hex() << "\n";
  out << "scheme " << contracts::to_string(scheme) << "\n";
  out << "valid bids considered " << bids_considered << "\n";
  out << "recomputed winner " << winner_text(recomputed_winner, recomputed_winner_id) << "\n";
  out << "published winner " << winner_text(published_winner, published_winner_id) << "\n";
  out << "winner match " << (winner_match ? "yes" : "no") << "\n";
  out << "requirements\n";
  for (const auto& [name, v] : requirements) {
    out << "  " << name << " " << to_string(v.verdict) << "  " << v.evidence << "\n";
  }
  out << "violations " << violations.size() << "\n";
  for (const auto& v : violations) {
    out << "  [" << to_string(v.tag) << "] height " << v.height << ": " << v.description << "\n";
  }
  out << "unrevealed " << unrevealed.size() << "\n";
  for (const auto& a : unrevealed) out << "  " << a.hex() << "\n";
  out << "timeline\n";
  for (const auto& e : timeline) {
    out << "  t=" << e.timestamp << " height=" << e.height << " " << e.event << "\n";
  }
  out << "gas trace\n";
  for (const auto& g : gas_trace) {
    out << "  height=" << g.height << " index=" << g.index << " " << chain::to_string(g.kind) << " "
        << chain::to_string(g.status) << " " << g.gas_used << "\n";
  }
  return out.str();
}

std::string AuditReport::summary_line() const {
  std::ostringstream out;
  out << "AUDIT " << (clean() ? "PASS" : "FAIL") << " tender=" << tender.hex()
      << " winner=" << (published_winner_id.empty() ? "none" : published_winner_id)
      << " match=" << (winner_match ? "yes" : "no") << " violations=" << violations.size();
  for (const auto& [name, v] : requirements) out << " " << name << "=" << to_string(v.verdict);
  return out.str();
}

}  // namespace tender::audit
