#include "tender/contracts/executor.hpp"

#include <limits>

#include "tender/crypto/crypto.hpp"

namespace tender::contracts {

using chain::ExecutionOutcome;
using chain::OperationKind;
using chain::TxStatus;

namespace {

ExecutionOutcome revert(const chain::BlockContext& ctx, ErrorCode code) {
  ExecutionOutcome out;
  out.status = TxStatus::kReverted;
  out.error = code;
  out.kind = OperationKind::kRevertedCall;
  out.gas_used = chain::meter_gas(ctx.gas, OperationKind::kRevertedCall, {});
  return out;
}

ExecutionOutcome success(const chain::BlockContext& ctx, OperationKind kind, chain::MeterInput input,
                         std::optional<Address> created = std::nullopt) {
  ExecutionOutcome out;
  out.status = TxStatus::kSuccess;
  out.kind = kind;
  out.gas_used = chain::meter_gas(ctx.gas, kind, input);
  out.created = created;
  return out;
}

OperationKind deploy_kind(Scheme scheme) {
  switch (scheme) {
    case Scheme::kFullTrack: return OperationKind::kDeployRftFull;
    case Scheme::kProtected: return OperationKind::kDeployRftProtected;
    case Scheme::kStateless: return OperationKind::kDeployRftStateless;
  }
  return OperationKind::kRevertedCall;
}

OperationKind bid_kind(Scheme scheme) {
  switch (scheme) {
    case Scheme::kFullTrack: return OperationKind::kPlaceBidFull;
    case Scheme::kProtected: return OperationKind::kPlaceBidProtected;
    case Scheme::kStateless: return OperationKind::kPlaceBidStateless;
  }
  return OperationKind::kRevertedCall;
}

}  // namespace

bool certificate_well_formed(const PlaceBid& call) {
  return call.msg_hash.size() == Hash32::size() && call.r.size() == crypto::kScalarSize &&
         call.s.size() == crypto::kScalarSize && (call.v == 27 || call.v == 28);
}

TenderExecutor::TenderExecutor(std::size_t max_data_bits) : max_data_bits_(max_data_bits) {}

ExecutionOutcome TenderExecutor::execute(const chain::Transaction& tx, const chain::BlockContext& ctx) {
  Call call;
  try {
    call = decode_call(tx.payload);
  } catch (const ProtocolError&) {
    return revert(ctx, ErrorCode::kMalformedPayload);
  }

  const bool deploys = std::holds_alternative<DeployRft>(call) || std::holds_alternative<DeployData>(call);
  if (deploys == tx.target.has_value()) return revert(ctx, ErrorCode::kMalformedPayload);

  return std::visit(
      [&](const auto& c) -> ExecutionOutcome {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, DeployRft>) return deploy_rft(tx, c, ctx);
        if constexpr (std::is_same_v<T, DeployData>) return deploy_data(tx, c, ctx);
        if constexpr (std::is_same_v<T, PlaceBid>) return place_bid(tx, c, ctx);
        if constexpr (std::is_same_v<T, PublishResults>) return publish(tx, c, ctx);
        if constexpr (std::is_same_v<T, MutateTender>) return mutate(tx, c, ctx);
      },
      call);
}

ExecutionOutcome TenderExecutor::deploy_rft(const chain::Transaction& tx, const DeployRft& call,
                                            const chain::BlockContext& ctx) {
  if (call.length_ms <= 0 || call.limit < 1 ||
      call.limit > std::numeric_limits<std::uint32_t>::max()) {
    return revert(ctx, ErrorCode::kInvalidTenderParams);
  }
  RftState rft;
  rft.owner = tx.sender;
  rft.scheme = call.scheme;
  rft.bidding_end = ctx.timestamp + call.length_ms;
  rft.limit = static_cast<std::uint32_t>(call.limit);
  rft.pubk = call.pubk;
  rft.tender_data = call.tender_data;
  if (call.scheme != Scheme::kStateless) rft.bids_placed.emplace();

  const auto addr = chain::derive_contract_address(tx.sender, tx.nonce);
  state_[addr] = std::move(rft);
  return success(ctx, deploy_kind(call.scheme), {}, addr);
}

ExecutionOutcome TenderExecutor::deploy_data(const chain::Transaction& tx, const DeployData& call,
                                             const chain::BlockContext& ctx) {
  if (call.data.size() * 8 > max_data_bits_) return revert(ctx, ErrorCode::kDataTooLarge);
  const auto addr = chain::derive_contract_address(tx.sender, tx.nonce);
  state_[addr] = TenderDataContract{tx.sender, call.data};
  return success(ctx, OperationKind::kDeployData, {.payload_bytes = call.data.size()}, addr);
}

ExecutionOutcome TenderExecutor::place_bid(const chain::Transaction& tx, const PlaceBid& call,
                                           const chain::BlockContext& ctx) {
  auto it = state_.find(*tx.target);
  if (it == state_.end() || !std::holds_alternative<RftState>(it->second)) {
    return revert(ctx, ErrorCode::kNoSuchContract);
  }
  auto& rft = std::get<RftState>(it->second);
  if (!certificate_well_formed(call)) return revert(ctx, ErrorCode::kMalformedCertificate);

  const bool valid_hash =
      Hash32::from_span(call.msg_hash) == crypto::certificate_message(call.id, *tx.target) &&
      crypto::verify_certificate(rft.pubk, call.msg_hash, call.v, call.r, call.s);

  // Protected scheme: failed certificate checks leave no trace in state.
  if (rft.scheme == Scheme::kProtected && !valid_hash) {
    return revert(ctx, ErrorCode::kCertificateRejected);
  }

  const bool valid_time = ctx.timestamp < rft.bidding_end;
  auto count_it = rft.bid_count.find(call.id);
  const std::uint32_t count = count_it == rft.bid_count.end() ? 0 : count_it->second;
  const bool allowed = count < rft.limit;
  const bool validity = valid_hash && valid_time && allowed;

  const std::size_t prior = rft.bids_placed ? rft.bids_placed->size() : 0;
  if (validity) rft.bid_count[call.id] = count + 1;

  BidRecord record;
  record.rft = *tx.target;
  record.id = call.id;
  record.data_addr = call.data_addr;
  record.validity = validity;
  record.sealed_half_a = call.sealed_half_a;
  if (rft.bids_placed) {
    record.prior_bids = *rft.bids_placed;
    record.bidding_end_copy = rft.bidding_end;
  }

  const auto addr = chain::derive_contract_address(*tx.target, rft.nonce++);
  if (rft.bids_placed) rft.bids_placed->push_back(addr);
  const auto kind = bid_kind(rft.scheme);
  state_[addr] = std::move(record);
  return success(ctx, kind, {.prior_bids = prior}, addr);
}

ExecutionOutcome TenderExecutor::publish(const chain::Transaction& tx, const PublishResults& call,
                                         const chain::BlockContext& ctx) {
  auto it = state_.find(*tx.target);
  if (it == state_.end() || !std::holds_alternative<RftState>(it->second)) {
    return revert(ctx, ErrorCode::kNoSuchContract);
  }
  auto& rft = std::get<RftState>(it->second);
  if (tx.sender != rft.owner) return revert(ctx, ErrorCode::kNotOwner);
  if (ctx.timestamp <= rft.bidding_end) return revert(ctx, ErrorCode::kResultsBeforeDeadline);
  if (rft.results) return revert(ctx, ErrorCode::kRepublishForbidden);
  rft.results = call.results;
  return success(ctx, OperationKind::kPublishResults, {.payload_bytes = tx.payload.size()});
}

ExecutionOutcome TenderExecutor::mutate(const chain::Transaction& tx, const MutateTender&,
                                        const chain::BlockContext& ctx) {
  if (!state_.contains(*tx.target)) return revert(ctx, ErrorCode::kNoSuchContract);
  return revert(ctx, ErrorCode::kTenderImmutable);
}

}  // namespace tender::contracts
