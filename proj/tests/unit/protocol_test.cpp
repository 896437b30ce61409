#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace tender;
using namespace tender::protocol;
using contracts::Scheme;
using fixture::price_bid;
using fixture::price_spec;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const ProtocolError& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected a ProtocolError";
  return ErrorCode::kParseError;
}

Address addr(std::uint8_t b) {
  Address a;
  a.bytes.back() = b;
  return a;
}

}  // namespace

TEST(Record, RoundTripsWithEscapes) {
  const std::map<std::string, std::string> entries{{"a", "line\nbreak"}, {"b", "back\\slash"}, {"c", "\x01\xff"}};
  const auto bytes = serialize_record(entries);
  EXPECT_EQ(parse_record(bytes), entries);
  const std::string text(bytes.begin(), bytes.end());
  EXPECT_NE(text.find("a=line\\nbreak\n"), std::string::npos);
  EXPECT_NE(text.find("\\x01\\xff"), std::string::npos);
}

TEST(Record, RejectsMalformedInput) {
  EXPECT_THROW(parse_record(as_bytes("b=1\na=2\n")), ProtocolError);
  EXPECT_THROW(parse_record(as_bytes("a=1\na=2\n")), ProtocolError);
  EXPECT_THROW(parse_record(as_bytes("novalue\n")), ProtocolError);
  EXPECT_THROW(parse_record(as_bytes("a=\\q\n")), ProtocolError);
}

TEST(BidDocument, RoundTrips) {
  BidDocument doc{"B7", {{"price", 123.25}, {"delivery_days", 7}}, Bytes{'h', 'i', '\n', 0}};
  EXPECT_EQ(BidDocument::parse(doc.serialize()), doc);
  EXPECT_THROW(BidDocument::parse(as_bytes("garbage")), ProtocolError);
}

TEST(TenderSpec, RoundTripsAndRejectsUnknownKeys) {
  auto spec = price_spec(Scheme::kProtected);
  spec.criteria.numeric_fields.push_back({"quality", 2.5, Direction::kMaximize});
  EXPECT_EQ(TenderSpec::parse(spec.serialize()), spec);
  auto bytes = spec.serialize();
  const std::string extra = "zzz=1\n";
  bytes.insert(bytes.end(), extra.begin(), extra.end());
  EXPECT_THROW(TenderSpec::parse(bytes), ProtocolError);
}

TEST(Criteria, ValidationRejectsBadInput) {
  EvaluationCriteria empty;
  EXPECT_THROW(empty.validate(), ProtocolError);
  EvaluationCriteria bad_name{{{"pri ce", 1.0, Direction::kMinimize}}, {}};
  EXPECT_THROW(bad_name.validate(), ProtocolError);
  EvaluationCriteria bad_weight{{{"price", std::nan(""), Direction::kMinimize}}, {}};
  EXPECT_THROW(bad_weight.validate(), ProtocolError);
  EXPECT_THROW(comparator_from_string("~="), ProtocolError);
  EXPECT_EQ(comparator_from_string(to_string(Comparator::kGt)), Comparator::kGt);
  EXPECT_EQ(direction_from_string("MAXIMIZE"), Direction::kMaximize);
}

TEST(Criteria, PredicateComparators) {
  EXPECT_TRUE((FeasibilityPredicate{"x", Comparator::kLe, 30}).holds(30));
  EXPECT_FALSE((FeasibilityPredicate{"x", Comparator::kLt, 30}).holds(30));
  EXPECT_TRUE((FeasibilityPredicate{"x", Comparator::kGe, 30}).holds(30));
  EXPECT_FALSE((FeasibilityPredicate{"x", Comparator::kGt, 30}).holds(30));
  EXPECT_TRUE((FeasibilityPredicate{"x", Comparator::kEq, 30}).holds(30));
}

TEST(Scoring, LowerPriceWins) {
  const auto criteria = price_spec(Scheme::kFullTrack).criteria;
  const auto out = score_documents(criteria, {{addr(1), price_bid("B1", 100)}, {addr(2), price_bid("B2", 90)}});
  EXPECT_EQ(out.winner, addr(2));
  EXPECT_EQ(criteria.score(price_bid("B2", 90)), -90.0);
}

TEST(Scoring, TieGoesToLowerAddress) {
  const auto criteria = price_spec(Scheme::kFullTrack).criteria;
  const auto out = score_documents(criteria, {{addr(9), price_bid("B1", 100)}, {addr(3), price_bid("B2", 100)}});
  EXPECT_EQ(out.winner, addr(3));
}

TEST(Scoring, InfeasibleBidIsExcluded) {
  const auto criteria = price_spec(Scheme::kFullTrack).criteria;
  const auto out = score_documents(criteria, {{addr(1), price_bid("B1", 50, 45)}, {addr(2), price_bid("B2", 90)}});
  EXPECT_EQ(out.winner, addr(2));
  EXPECT_EQ(out.outcomes.at(addr(1)), BidOutcome::kInfeasible);
  const auto none = score_documents(criteria, {{addr(1), price_bid("B1", 50, 45)}});
  EXPECT_FALSE(none.winner.has_value());
}

TEST(Scoring, IncompleteDocumentIsNotScored) {
  const auto criteria = price_spec(Scheme::kFullTrack).criteria;
  BidDocument partial{"B1", {{"price", 1}}, {}};
  const auto out = score_documents(criteria, {{addr(1), partial}, {addr(2), price_bid("B2", 90)}});
  EXPECT_EQ(out.outcomes.at(addr(1)), BidOutcome::kIncomplete);
  EXPECT_EQ(out.winner, addr(2));
}

TEST(Scoring, AgreesWithBruteForceOnRandomInstances) {
  crypto::Drbg rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const auto inst = fixture::random_instance(rng, Scheme::kFullTrack, 1, 12);
    std::vector<std::pair<Address, BidDocument>> docs;
    std::vector<Address> addresses;
    for (std::size_t i = 0; i < inst.docs.size(); ++i) {
      Address a;
      rng.fill(a.bytes);
      addresses.push_back(a);
      docs.emplace_back(a, inst.docs[i]);
    }
    const auto expected = fixture::brute_force_winner(inst.spec, inst.docs, addresses);
    const auto out = score_documents(inst.spec.criteria, docs);
    ASSERT_EQ(out.winner.has_value(), expected.has_value()) << "trial " << trial;
    if (expected) {
      EXPECT_EQ(*out.winner, addresses[*expected]) << "trial " << trial;
    }
  }
}

class Lifecycle : public ::testing::TestWithParam<Scheme> {};

INSTANTIATE_TEST_SUITE_P(Schemes, Lifecycle,
                         ::testing::Values(Scheme::kFullTrack, Scheme::kProtected, Scheme::kStateless),
                         [](const auto& info) { return std::string(contracts::to_string(info.param)); });

TEST_P(Lifecycle, HonestRunPublishesCheapestFeasibleBid) {
  const auto run = fixture::honest_run(
      GetParam(), price_spec(GetParam()),
      {price_bid("B1", 100), price_bid("B2", 80, 45), price_bid("B3", 90), price_bid("B4", 95)}, 1);
  EXPECT_EQ(run.result.winner_id(), "B3");
  EXPECT_EQ(run.result.winner_bid(), run.tender.bids[2].bid);
  const auto& published = run.tender.state().results;
  ASSERT_TRUE(published.has_value());
  EXPECT_EQ(*published, run.result.published);
  EXPECT_EQ(published->revealed.size(), 4u);
  EXPECT_EQ(published->disclosed_bids.size(), 4u);
}

TEST_P(Lifecycle, KeysStaySealedUntilHandover) {
  auto t = fixture::open_tender(GetParam(), 3, price_spec(GetParam()));
  fixture::submit_all(t, {price_bid("B1", 100), price_bid("B2", 90)});
  const auto& orch = *t.orch;
  for (const auto& bid : t.bids) {
    EXPECT_EQ(code_of([&] { orch.try_open_bid(t.to, bid.bid); }), ErrorCode::kDecryptionFailed);
  }
  EXPECT_EQ(code_of([&] { orch.close_and_evaluate(t.to, t.rft(), t.all_halves()); }),
            ErrorCode::kEvaluationBeforeDeadline);

  KeyChannel channel;
  for (std::size_t i = 0; i < t.bids.size(); ++i) {
    channel.send({t.bidders[i].id, t.bids[i].bid, t.bids[i].withheld_half, t.sim->now()});
  }
  EXPECT_TRUE(channel.delivered_halves().empty());
  EXPECT_EQ(channel.deliver(), 2u);
  EXPECT_EQ(channel.queued(), 0u);
  const auto halves = channel.delivered_halves();
  for (std::size_t i = 0; i < t.bids.size(); ++i) {
    const auto plain = orch.try_open_bid(t.to, t.bids[i].bid, halves.at(t.bids[i].bid));
    EXPECT_EQ(BidDocument::parse(plain), t.documents[i]);
  }
}

TEST_P(Lifecycle, WithheldHalfOfOneBidderDoesNotOpenAnother) {
  auto t = fixture::open_tender(GetParam(), 4, price_spec(GetParam()));
  fixture::submit_all(t, {price_bid("B1", 100), price_bid("B2", 90)});
  EXPECT_THROW(t.orch->try_open_bid(t.to, t.bids[0].bid, t.bids[1].withheld_half), ProtocolError);
}

TEST_P(Lifecycle, MissingHalfLeavesBidUnrevealed) {
  auto t = fixture::open_tender(GetParam(), 5, price_spec(GetParam()));
  fixture::submit_all(t, {price_bid("B1", 80), price_bid("B2", 90)});
  t.close();
  auto halves = t.all_halves();
  halves.erase(t.bids[0].bid);
  const auto result = t.orch->close_and_evaluate(t.to, t.rft(), halves);
  EXPECT_EQ(result.winner_id(), "B2");
  if (GetParam() != Scheme::kStateless) {
    ASSERT_EQ(result.evaluated.size(), 2u);
    EXPECT_EQ(result.evaluated[0].outcome, BidOutcome::kUnrevealed);
  }
}

TEST_P(Lifecycle, RepublishIsForbidden) {
  auto run = fixture::honest_run(GetParam(), price_spec(GetParam()), {price_bid("B1", 100)}, 6);
  auto& t = run.tender;
  EXPECT_EQ(code_of([&] { t.orch->publish_results(t.to, t.rft(), run.result); }), ErrorCode::kRepublishForbidden);
}

TEST(Lifecycle, OversizedBidIsRefusedBeforeSubmission) {
  auto t = fixture::open_tender(Scheme::kFullTrack, 7, price_spec(Scheme::kFullTrack));
  auto doc = price_bid("B1", 100);
  doc.text = Bytes(700, 'x');
  auto bidder = t.orch->create_bidder("B1");
  t.orch->register_bidder(t.to, bidder, t.rft());
  EXPECT_EQ(code_of([&] { t.orch->submit_sealed_bid(bidder, t.rft(), doc); }), ErrorCode::kDataTooLarge);
}

TEST(Lifecycle, IdenticalSeedsGiveIdenticalChains) {
  const auto docs = std::vector<BidDocument>{price_bid("B1", 100), price_bid("B2", 90)};
  const auto a = fixture::honest_run(Scheme::kProtected, price_spec(Scheme::kProtected), docs, 42);
  const auto b = fixture::honest_run(Scheme::kProtected, price_spec(Scheme::kProtected), docs, 42);
  const auto c = fixture::honest_run(Scheme::kProtected, price_spec(Scheme::kProtected), docs, 43);
  EXPECT_EQ(contracts::to_canonical_text(a.exported), contracts::to_canonical_text(b.exported));
  EXPECT_NE(contracts::to_canonical_text(a.exported), contracts::to_canonical_text(c.exported));
}
