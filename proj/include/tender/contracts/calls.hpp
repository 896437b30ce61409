#pragma once

#include <variant>

#include "tender/contracts/state.hpp"

namespace tender::contracts {

// Request-for-tender constructor arguments. Signed integers so that
// non-positive parameters can reach the contract and be rejected there.
struct DeployRft {
  std::int64_t length_ms = 0;
  Bytes pubk;
  std::int64_t limit = 0;
  Scheme scheme = Scheme::kFullTrack;
  Address tender_data;
};

struct DeployData {
  Bytes data;
};

// Certificate components are carried raw so malformed shapes reach the
// contract's own validation.
struct PlaceBid {
  std::string id;
  Address data_addr;
  Bytes msg_hash;
  std::uint8_t v = 0;
  Bytes r;
  Bytes s;
  Bytes sealed_half_a;
};

struct PublishResults {
  PublishedResults results;
};

enum class TenderField : std::uint8_t { kBiddingEnd, kLimit, kPubk, kData };

std::string_view to_string(TenderField field);

// A setter call against a deployed tender or data contract. Always rejected.
struct MutateTender {
  TenderField field = TenderField::kBiddingEnd;
  Bytes value;
};

using Call = std::variant<DeployRft, DeployData, PlaceBid, PublishResults, MutateTender>;

Bytes encode_call(const Call& call);
// Throws ProtocolError(kMalformedPayload).
Call decode_call(ByteView payload);

void encode_results(ByteWriter& w, const PublishedResults& results);
PublishedResults decode_results(ByteReader& r);

}  // namespace tender::contracts
