#include "tender/contracts/simulator.hpp"

#include <algorithm>
#include <stdexcept>

#include "tender/common/codec.hpp"

namespace tender::contracts {

Address account_address(std::string_view label) {
  const auto digest = ByteWriter{}.str("account").str(label).digest();
  return Address::from_span(ByteView(digest.bytes).first(Address::size()));
}

Simulator::Simulator(chain::ChainConfig config, chain::GasSchedule gas, std::size_t max_data_bits)
    : executor_(max_data_bits), chain_(config, gas, executor_) {}

Address Simulator::create_account(std::string_view label) {
  const auto addr = account_address(label);
  chain_.register_account(addr);
  return addr;
}

chain::PendingId Simulator::submit(const Address& sender, std::optional<Address> target,
                                   const Call& call) {
  const auto id = chain_.submit_transaction({sender, target, encode_call(call)});
  submissions_.push_back({id, chain_.now()});
  return id;
}

const chain::Block& Simulator::commit() {
  const EpochMs ts = std::max(chain_.now(), chain_.head().timestamp + chain_.config().block_interval_ms);
  chain_.clock().advance_to(ts);
  return chain_.mine_block(ts);
}

const chain::Transaction& Simulator::receipt(chain::PendingId id) const {
  const auto* tx = chain_.find_transaction(id);
  if (tx == nullptr) throw std::logic_error("transaction still pending");
  return *tx;
}

Address Simulator::predict_deploy_address(const Address& sender) const {
  return chain::derive_contract_address(sender, chain_.next_nonce(sender));
}

std::optional<Address> Simulator::expect_success(chain::PendingId id) const {
  const auto& tx = receipt(id);
  if (tx.status != chain::TxStatus::kSuccess) {
    const auto code = tx.error.value_or(ErrorCode::kMalformedPayload);
    throw ProtocolError(code, "transaction " + tx.tx_hash.hex() + " reverted");
  }
  return tx.created;
}

Address Simulator::init_tender(const Address& sender, EpochMs length_ms, Bytes pubk, std::int64_t limit,
                               Scheme scheme, Address tender_data) {
  const auto id = submit(sender, std::nullopt, DeployRft{length_ms, std::move(pubk), limit, scheme, tender_data});
  commit();
  return *expect_success(id);
}

Address Simulator::deploy_tender_data(const Address& sender, Bytes data) {
  const auto id = submit(sender, std::nullopt, DeployData{std::move(data)});
  commit();
  return *expect_success(id);
}

Address Simulator::place_bid_checked(Scheme expected, const Address& sender, const Address& rft,
                                     PlaceBid args) {
  const auto& state = read_as<RftState>(rft);
  if (state.scheme != expected) {
    throw ProtocolError(ErrorCode::kWrongScheme,
                        "tender uses " + std::string(to_string(state.scheme)) + ", not " +
                            std::string(to_string(expected)));
  }
  const auto id = submit(sender, rft, std::move(args));
  commit();
  return *expect_success(id);
}

Address Simulator::place_bid_full(const Address& sender, const Address& rft, PlaceBid args) {
  return place_bid_checked(Scheme::kFullTrack, sender, rft, std::move(args));
}

Address Simulator::place_bid_protected(const Address& sender, const Address& rft, PlaceBid args) {
  return place_bid_checked(Scheme::kProtected, sender, rft, std::move(args));
}

Address Simulator::place_bid_stateless(const Address& sender, const Address& rft, PlaceBid args) {
  return place_bid_checked(Scheme::kStateless, sender, rft, std::move(args));
}

const std::vector<Address>& Simulator::closed_bid_list(const Address& rft) const {
  const auto& state = read_as<RftState>(rft);
  if (!state.bids_placed) {
    throw ProtocolError(ErrorCode::kSchemeHasNoState, "stateless tender keeps no bid list");
  }
  if (now() <= state.bidding_end) {
    throw ProtocolError(ErrorCode::kBiddingStillOpen, "bidding still open");
  }
  return *state.bids_placed;
}

std::vector<Address> Simulator::req_bids(const Address& rft) const { return closed_bid_list(rft); }

std::vector<Address> Simulator::collect_valid_bid_data(const Address& rft) const {
  const auto& bids = closed_bid_list(rft);
  std::vector<Address> out;
  out.reserve(bids.size());
  for (const auto& bid : bids) {
    const auto& record = read_as<BidRecord>(bid);
    if (record.validity) out.push_back(record.data_addr);
  }
  return out;
}

const ContractState& Simulator::read_state(const Address& addr) const {
  const auto& world = executor_.state();
  auto it = world.find(addr);
  if (it == world.end()) throw ProtocolError(ErrorCode::kNoSuchContract, "no contract at " + addr.hex());
  return it->second;
}

ChainExport Simulator::export_chain() const {
  ChainExport out;
  out.config = chain_.config();
  out.gas = chain_.gas_schedule();
  out.max_data_bits = executor_.max_data_bits();
  out.blocks.assign(chain_.blocks().begin(), chain_.blocks().end());
  out.state = executor_.state();
  return out;
}

Hash32 acknowledgement_message(const Address& bid) {
  return ByteWriter{}.str("tender-ack").fixed(bid).digest();
}

AckReceipt acknowledge_bid(const Simulator& sim, ByteView auctioneer_private_key, const Address& bid,
                           crypto::Drbg& rng) {
  sim.read_as<BidRecord>(bid);
  auto sig = crypto::sign_recoverable(auctioneer_private_key, acknowledgement_message(bid), rng);
  return AckReceipt{bid, sig.v, std::move(sig.r), std::move(sig.s)};
}

bool verify_acknowledgement(ByteView auctioneer_public_key, const AckReceipt& receipt,
                            const Address& bid) {
  if (receipt.bid != bid) return false;
  try {
    const auto digest = acknowledgement_message(bid);
    return crypto::verify_signature(auctioneer_public_key, ByteView(digest.bytes), receipt.v, receipt.r,
                                    receipt.s);
  } catch (const ProtocolError&) {
    return false;
  }
}

}  // namespace tender::contracts
