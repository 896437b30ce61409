#include "support.hpp"

#include <fstream>
#include <sstream>

namespace tender::fixture {

using contracts::Scheme;
using protocol::BidDocument;

void Tender::close() {
  const auto end = state().bidding_end;
  if (sim->now() <= end) sim->chain().clock().advance_to(end + 1);
  sim->commit();
}

std::map<Address, Bytes> Tender::all_halves() const {
  std::map<Address, Bytes> out;
  for (const auto& b : bids) out[b.bid] = b.withheld_half;
  return out;
}

protocol::TenderSpec price_spec(Scheme scheme, EpochMs length_ms, std::int64_t limit) {
  protocol::TenderSpec spec;
  spec.title = "Supply of office chairs";
  spec.terms = Bytes{'2', '0', '0', ' ', 'u', 'n', 'i', 't', 's'};
  spec.criteria.numeric_fields = {{"price", 1.0, protocol::Direction::kMinimize}};
  spec.criteria.predicates = {{"delivery_days", protocol::Comparator::kLe, 30.0}};
  spec.length_ms = length_ms;
  spec.limit = limit;
  spec.scheme = scheme;
  return spec;
}

BidDocument price_bid(const std::string& id, double price, double delivery_days) {
  return BidDocument{id, {{"price", price}, {"delivery_days", delivery_days}}, Bytes{'o', 'k'}};
}

Tender open_tender(Scheme scheme, std::uint64_t seed, const protocol::TenderSpec& spec) {
  Tender t;
  t.sim = std::make_unique<contracts::Simulator>();
  t.orch = std::make_unique<protocol::Orchestrator>(*t.sim, seed);
  t.to = t.orch->create_organisation("TO");
  auto s = spec;
  s.scheme = scheme;
  t.opened = t.orch->open_tender(t.to, s);
  return t;
}

void submit_all(Tender& t, const std::vector<BidDocument>& docs, EpochMs gap_ms) {
  for (const auto& doc : docs) {
    auto bidder = t.orch->create_bidder(doc.bidder_id);
    t.orch->register_bidder(t.to, bidder, t.rft());
    t.advance(gap_ms);
    t.bids.push_back(t.orch->submit_sealed_bid(bidder, t.rft(), doc));
    t.bidders.push_back(std::move(bidder));
    t.documents.push_back(doc);
  }
}

HonestRun honest_run(Scheme scheme, const protocol::TenderSpec& spec, const std::vector<BidDocument>& docs,
                     std::uint64_t seed) {
  HonestRun run;
  run.tender = open_tender(scheme, seed, spec);
  submit_all(run.tender, docs);
  run.tender.close();
  run.result = run.tender.orch->close_and_evaluate(run.tender.to, run.tender.rft(), run.tender.all_halves());
  run.tender.orch->publish_results(run.tender.to, run.tender.rft(), run.result);
  run.exported = run.tender.sim->export_chain();
  return run;
}

RandomInstance random_instance(crypto::Drbg& rng, Scheme scheme, std::size_t min_bidders, std::size_t max_bidders) {
  RandomInstance inst;
  auto& spec = inst.spec;
  spec.title = "Randomised tender";
  spec.terms = rng.generate(4);
  spec.scheme = scheme;
  spec.length_ms = 3'600'000;
  spec.limit = 1;
  auto weight = [&] {
    // Half the time a small integer, so equal scores are common.
    return rng.uniform(2) == 0 ? static_cast<double>(1 + rng.uniform(3)) : 0.1 + 9.9 * rng.uniform_real();
  };
  spec.criteria.numeric_fields = {{"price", weight(), protocol::Direction::kMinimize},
                                  {"quality", weight(), protocol::Direction::kMaximize}};
  spec.criteria.predicates = {{"delivery_days", protocol::Comparator::kLe, static_cast<double>(20 + rng.uniform(20))}};
  const std::size_t n = min_bidders + rng.uniform(max_bidders - min_bidders + 1);
  for (std::size_t i = 0; i < n; ++i) {
    BidDocument doc;
    doc.bidder_id = "R" + std::to_string(i);
    doc.fields["price"] = static_cast<double>(100 + rng.uniform(10));
    doc.fields["quality"] = static_cast<double>(1 + rng.uniform(5));
    doc.fields["delivery_days"] = static_cast<double>(5 + rng.uniform(45));
    doc.text = rng.generate(rng.uniform(8));
    inst.docs.push_back(std::move(doc));
  }
  return inst;
}

std::optional<std::size_t> brute_force_winner(const protocol::TenderSpec& spec, const std::vector<BidDocument>& docs,
                                              const std::vector<Address>& addresses) {
  std::vector<double> scores(docs.size(), 0.0);
  std::vector<bool> feasible(docs.size(), true);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    for (const auto& f : spec.criteria.numeric_fields) {
      const double v = docs[i].fields.at(f.name);
      scores[i] += f.direction == protocol::Direction::kMaximize ? f.weight * v : -(f.weight * v);
    }
    for (const auto& p : spec.criteria.predicates) {
      const double v = docs[i].fields.at(p.field);
      bool ok = false;
      if (p.comparator == protocol::Comparator::kLe) ok = v <= p.threshold;
      if (p.comparator == protocol::Comparator::kLt) ok = v < p.threshold;
      if (p.comparator == protocol::Comparator::kGe) ok = v >= p.threshold;
      if (p.comparator == protocol::Comparator::kGt) ok = v > p.threshold;
      if (p.comparator == protocol::Comparator::kEq) ok = v == p.threshold;
      feasible[i] = feasible[i] && ok;
    }
  }
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (!feasible[i]) continue;
    bool beats_all = true;
    for (std::size_t j = 0; j < docs.size() && beats_all; ++j) {
      if (j == i || !feasible[j]) continue;
      beats_all = scores[i] > scores[j] || (scores[i] == scores[j] && addresses[i] < addresses[j]);
    }
    if (beats_all) return i;
  }
  return std::nullopt;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace tender::fixture
