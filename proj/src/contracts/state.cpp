#include "tender/contracts/state.hpp"

#include <algorithm>

#include "tender/contracts/calls.hpp"

namespace tender::contracts {

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::kFullTrack: return "FULL_TRACK";
    case Scheme::kProtected: return "PROTECTED";
    case Scheme::kStateless: return "STATELESS";
  }
  return "UNKNOWN";
}

Scheme scheme_from_string(std::string_view name) {
  for (auto s : {Scheme::kFullTrack, Scheme::kProtected, Scheme::kStateless}) {
    if (to_string(s) == name) return s;
  }
  throw ProtocolError(ErrorCode::kParseError, "unknown scheme '" + std::string(name) + "'");
}

namespace {

void encode_addresses(ByteWriter& w, const std::optional<std::vector<Address>>& list) {
  w.boolean(list.has_value());
  if (!list) return;
  w.u32(static_cast<std::uint32_t>(list->size()));
  for (const auto& a : *list) w.fixed(a);
}

struct StateEncoder {
  ByteWriter& w;

  void operator()(const RftState& s) const {
    w.u8(0).fixed(s.owner).u8(static_cast<std::uint8_t>(s.scheme)).i64(s.bidding_end).u32(s.limit);
    w.bytes(s.pubk).fixed(s.tender_data);
    w.u32(static_cast<std::uint32_t>(s.bid_count.size()));
    for (const auto& [id, count] : s.bid_count) w.str(id).u32(count);
    encode_addresses(w, s.bids_placed);
    w.u64(s.nonce).boolean(s.results.has_value());
    if (s.results) encode_results(w, *s.results);
  }
  void operator()(const TenderDataContract& s) const { w.u8(1).fixed(s.owner).bytes(s.data); }
  void operator()(const BidRecord& s) const {
    w.u8(2).fixed(s.rft).str(s.id).fixed(s.data_addr).boolean(s.validity);
    encode_addresses(w, s.prior_bids);
    w.boolean(s.bidding_end_copy.has_value()).i64(s.bidding_end_copy.value_or(0));
    w.bytes(s.sealed_half_a);
  }
};

}  // namespace

void encode_state(ByteWriter& w, const ContractState& state) { std::visit(StateEncoder{w}, state); }

std::vector<Address> sorted_addresses(const WorldState& state) {
  std::vector<Address> out;
  out.reserve(state.size());
  for (const auto& entry : state) out.push_back(entry.first);
  std::sort(out.begin(), out.end());
  return out;
}

Hash32 state_digest(const WorldState& state) {
  ByteWriter w;
  w.str("world-state").u64(state.size());
  for (const auto& addr : sorted_addresses(state)) {
    w.fixed(addr);
    encode_state(w, state.at(addr));
  }
  return w.digest();
}

}  // namespace tender::contracts
