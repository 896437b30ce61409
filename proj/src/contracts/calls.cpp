#include "tender/contracts/calls.hpp"

namespace tender::contracts {

std::string_view to_string(TenderField field) {
  switch (field) {
    case TenderField::kBiddingEnd: return "BIDDING_END";
    case TenderField::kLimit: return "LIMIT";
    case TenderField::kPubk: return "PUBK";
    case TenderField::kData: return "DATA";
  }
  return "UNKNOWN";
}

namespace {

enum class Tag : std::uint8_t {
  kDeployRft = 1,
  kDeployData = 2,
  kPlaceBid = 3,
  kPublishResults = 4,
  kMutateTender = 5,
};

struct CallEncoder {
  ByteWriter& w;

  void operator()(const DeployRft& c) const {
    w.u8(static_cast<std::uint8_t>(Tag::kDeployRft)).i64(c.length_ms).bytes(c.pubk).i64(c.limit);
    w.u8(static_cast<std::uint8_t>(c.scheme)).fixed(c.tender_data);
  }
  void operator()(const DeployData& c) const {
    w.u8(static_cast<std::uint8_t>(Tag::kDeployData)).bytes(c.data);
  }
  void operator()(const PlaceBid& c) const {
    w.u8(static_cast<std::uint8_t>(Tag::kPlaceBid)).str(c.id).fixed(c.data_addr).bytes(c.msg_hash);
    w.u8(c.v).bytes(c.r).bytes(c.s).bytes(c.sealed_half_a);
  }
  void operator()(const PublishResults& c) const {
    w.u8(static_cast<std::uint8_t>(Tag::kPublishResults));
    encode_results(w, c.results);
  }
  void operator()(const MutateTender& c) const {
    w.u8(static_cast<std::uint8_t>(Tag::kMutateTender)).u8(static_cast<std::uint8_t>(c.field)).bytes(c.value);
  }
};

Scheme read_scheme(ByteReader& r) {
  auto raw = r.u8();
  if (raw > static_cast<std::uint8_t>(Scheme::kStateless)) {
    throw ProtocolError(ErrorCode::kMalformedPayload, "unknown scheme tag");
  }
  return static_cast<Scheme>(raw);
}

}  // namespace

void encode_results(ByteWriter& w, const PublishedResults& results) {
  w.str(results.winner_id).boolean(results.winner_bid.has_value());
  if (results.winner_bid) w.fixed(*results.winner_bid);
  w.u32(static_cast<std::uint32_t>(results.disclosed_bids.size()));
  for (const auto& a : results.disclosed_bids) w.fixed(a);
  w.u32(static_cast<std::uint32_t>(results.scores.size()));
  for (const auto& s : results.scores) w.fixed(s.bid).f64(s.score);
  w.u32(static_cast<std::uint32_t>(results.revealed.size()));
  for (const auto& k : results.revealed) w.fixed(k.bid).bytes(k.sealed_key).bytes(k.bid_key);
}

PublishedResults decode_results(ByteReader& r) {
  PublishedResults out;
  out.winner_id = r.str();
  if (r.boolean()) out.winner_bid = r.fixed<Address>();
  for (auto n = r.u32(); n > 0; --n) out.disclosed_bids.push_back(r.fixed<Address>());
  for (auto n = r.u32(); n > 0; --n) {
    ScoreEntry e;
    e.bid = r.fixed<Address>();
    e.score = r.f64();
    out.scores.push_back(e);
  }
  for (auto n = r.u32(); n > 0; --n) {
    RevealedKey k;
    k.bid = r.fixed<Address>();
    k.sealed_key = r.bytes();
    k.bid_key = r.bytes();
    out.revealed.push_back(std::move(k));
  }
  return out;
}

Bytes encode_call(const Call& call) {
  ByteWriter w;
  std::visit(CallEncoder{w}, call);
  return std::move(w).take();
}

Call decode_call(ByteView payload) {
  ByteReader r(payload);
  Call out;
  switch (static_cast<Tag>(r.u8())) {
    case Tag::kDeployRft: {
      DeployRft c;
      c.length_ms = r.i64();
      c.pubk = r.bytes();
      c.limit = r.i64();
      c.scheme = read_scheme(r);
      c.tender_data = r.fixed<Address>();
      out = std::move(c);
      break;
    }
    case Tag::kDeployData:
      out = DeployData{r.bytes()};
      break;
    case Tag::kPlaceBid: {
      PlaceBid c;
      c.id = r.str();
      c.data_addr = r.fixed<Address>();
      c.msg_hash = r.bytes();
      c.v = r.u8();
      c.r = r.bytes();
      c.s = r.bytes();
      c.sealed_half_a = r.bytes();
      out = std::move(c);
      break;
    }
    case Tag::kPublishResults:
      out = PublishResults{decode_results(r)};
      break;
    case Tag::kMutateTender: {
      MutateTender c;
      auto field = r.u8();
      if (field > static_cast<std::uint8_t>(TenderField::kData)) {
        throw ProtocolError(ErrorCode::kMalformedPayload, "unknown tender field");
      }
      c.field = static_cast<TenderField>(field);
      c.value = r.bytes();
      out = std::move(c);
      break;
    }
    default:
      throw ProtocolError(ErrorCode::kMalformedPayload, "unknown call tag");
  }
  r.expect_done();
  return out;
}

}  // namespace tender::contracts
