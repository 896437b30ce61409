#include "tender/chain/ledger.hpp"

#include <algorithm>

#include "tender/common/codec.hpp"

namespace tender::chain {

void ChainConfig::validate() const {
  if (block_interval_ms <= 0) {
    throw ProtocolError(ErrorCode::kInvalidConfig, "block_interval_ms must be positive");
  }
  if (max_future_drift_ms < 0) {
    throw ProtocolError(ErrorCode::kInvalidConfig, "max_future_drift_ms must be non-negative");
  }
}

std::string_view to_string(TxStatus status) {
  switch (status) {
    case TxStatus::kPending: return "PENDING";
    case TxStatus::kSuccess: return "SUCCESS";
    case TxStatus::kReverted: return "REVERTED";
  }
  return "UNKNOWN";
}

Hash32 Transaction::compute_hash() const {
  ByteWriter w;
  w.str("tx").fixed(sender).boolean(target.has_value());
  if (target) w.fixed(*target);
  w.bytes(payload).u64(nonce).u64(gas_price);
  return w.digest();
}

Hash32 Transaction::receipt_digest() const {
  ByteWriter w;
  w.str("receipt").fixed(tx_hash).u8(static_cast<std::uint8_t>(status));
  w.boolean(error.has_value()).u8(error ? static_cast<std::uint8_t>(*error) : 0);
  w.u8(static_cast<std::uint8_t>(kind)).u64(gas_used).boolean(created.has_value());
  if (created) w.fixed(*created);
  return w.digest();
}

Hash32 Block::compute_hash() const {
  ByteWriter w;
  w.str("block").u64(height).fixed(parent_hash).i64(timestamp);
  w.u32(static_cast<std::uint32_t>(transactions.size()));
  for (const auto& tx : transactions) {
    w.fixed(tx.tx_hash).fixed(tx.receipt_digest());
  }
  return w.digest();
}

void VirtualClock::advance_to(EpochMs t) {
  if (t < now_) throw std::invalid_argument("virtual clock cannot move backwards");
  now_ = t;
}

Address derive_contract_address(const Address& creator, std::uint64_t nonce) {
  ByteWriter w;
  w.str("create").fixed(creator).u64(nonce);
  auto digest = w.digest();
  return Address::from_span(ByteView(digest.bytes).first(Address::size()));
}

Chain::Chain(ChainConfig config, GasSchedule gas, Executor& executor)
    : config_(config), gas_(gas), executor_(executor), clock_(config.genesis_timestamp) {
  config_.validate();
  gas_.validate();
  Block genesis;
  genesis.height = 0;
  genesis.timestamp = config_.genesis_timestamp;
  genesis.block_hash = genesis.compute_hash();
  blocks_.push_back(std::move(genesis));
}

void Chain::register_account(const Address& account) { accounts_.insert(account); }

std::uint64_t Chain::next_nonce(const Address& sender) const {
  auto it = nonces_.find(sender);
  return it == nonces_.end() ? 0 : it->second;
}

PendingId Chain::submit_transaction(TxRequest request) {
  if (!is_known(request.sender)) {
    throw ProtocolError(ErrorCode::kUnknownSender, request.sender.hex());
  }
  Transaction tx;
  tx.sender = request.sender;
  tx.target = request.target;
  tx.payload = std::move(request.payload);
  tx.gas_price = request.gas_price;
  tx.nonce = nonces_[tx.sender]++;
  tx.tx_hash = tx.compute_hash();
  const PendingId id = next_id_++;
  pending_.emplace_back(id, std::move(tx));
  return id;
}

const Block& Chain::mine_block(EpochMs proposed_timestamp) {
  const Block& parent = head();
  if (proposed_timestamp <= parent.timestamp) {
    throw ProtocolError(ErrorCode::kTimestampNotMonotonic,
                        std::to_string(proposed_timestamp) + " <= parent " +
                            std::to_string(parent.timestamp));
  }
  if (proposed_timestamp > clock_.now() + config_.max_future_drift_ms) {
    throw ProtocolError(ErrorCode::kTimestampTooFarAhead,
                        std::to_string(proposed_timestamp) + " > now " +
                            std::to_string(clock_.now()) + " + drift " +
                            std::to_string(config_.max_future_drift_ms));
  }

  Block block;
  block.height = parent.height + 1;
  block.parent_hash = parent.block_hash;
  block.timestamp = proposed_timestamp;

  const BlockContext ctx{block.height, block.timestamp, gas_};
  auto pending = std::move(pending_);
  pending_.clear();
  for (auto& [id, tx] : pending) {
    auto outcome = executor_.execute(tx, ctx);
    tx.status = outcome.status;
    tx.error = outcome.error;
    tx.kind = outcome.kind;
    tx.gas_used = outcome.gas_used;
    tx.created = outcome.created;
    total_gas_ += tx.gas_used;
    locations_[id] = Location{block.height, block.transactions.size()};
    block.transactions.push_back(std::move(tx));
  }
  block.block_hash = block.compute_hash();
  blocks_.push_back(std::move(block));
  return blocks_.back();
}

const Transaction* Chain::find_transaction(PendingId id) const {
  auto it = locations_.find(id);
  if (it == locations_.end()) return nullptr;
  return &blocks_[it->second.height].transactions[it->second.index];
}

std::optional<std::uint64_t> Chain::inclusion_height(PendingId id) const {
  auto it = locations_.find(id);
  if (it == locations_.end()) return std::nullopt;
  return it->second.height;
}

std::string_view to_string(LinkIssue::Kind kind) {
  switch (kind) {
    case LinkIssue::Kind::kBadGenesis: return "BAD_GENESIS";
    case LinkIssue::Kind::kHeightGap: return "HEIGHT_GAP";
    case LinkIssue::Kind::kParentMismatch: return "PARENT_MISMATCH";
    case LinkIssue::Kind::kBlockHashMismatch: return "BLOCK_HASH_MISMATCH";
    case LinkIssue::Kind::kTxHashMismatch: return "TX_HASH_MISMATCH";
    case LinkIssue::Kind::kTimestampNotIncreasing: return "TIMESTAMP_NOT_INCREASING";
  }
  return "UNKNOWN";
}

std::vector<LinkIssue> verify_chain(std::span<const Block> blocks) {
  std::vector<LinkIssue> issues;
  using K = LinkIssue::Kind;
  if (blocks.empty()) {
    issues.push_back({K::kBadGenesis, 0, "empty chain"});
    return issues;
  }
  const Block& genesis = blocks.front();
  if (genesis.height != 0 || !genesis.parent_hash.is_zero() || !genesis.transactions.empty()) {
    issues.push_back({K::kBadGenesis, genesis.height, "genesis must be height 0 with zero parent"});
  }
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const Block& b = blocks[i];
    if (b.compute_hash() != b.block_hash) {
      issues.push_back({K::kBlockHashMismatch, b.height, "stored block hash does not match fields"});
    }
    for (std::size_t t = 0; t < b.transactions.size(); ++t) {
      if (b.transactions[t].compute_hash() != b.transactions[t].tx_hash) {
        issues.push_back({K::kTxHashMismatch, b.height, "transaction " + std::to_string(t)});
      }
    }
    if (i == 0) continue;
    const Block& parent = blocks[i - 1];
    if (b.height != parent.height + 1) {
      issues.push_back({K::kHeightGap, b.height,
                        "expected height " + std::to_string(parent.height + 1)});
    }
    if (b.parent_hash != parent.block_hash) {
      issues.push_back({K::kParentMismatch, b.height, "parent hash does not link"});
    }
    if (b.timestamp <= parent.timestamp) {
      issues.push_back({K::kTimestampNotIncreasing, b.height,
                        std::to_string(b.timestamp) + " <= " + std::to_string(parent.timestamp)});
    }
  }
  return issues;
}

}  // namespace tender::chain
