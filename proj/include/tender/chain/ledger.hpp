#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "tender/chain/gas.hpp"
#include "tender/common/types.hpp"

namespace tender::chain {

struct ChainConfig {
  EpochMs block_interval_ms = 15'000;
  EpochMs max_future_drift_ms = 900'000;
  EpochMs genesis_timestamp = 1'600'000'000'000;

  // Throws ProtocolError(kInvalidConfig).
  void validate() const;

  bool operator==(const ChainConfig&) const = default;
};

enum class TxStatus : std::uint8_t { kPending, kSuccess, kReverted };

std::string_view to_string(TxStatus status);

/// A transaction together with its execution receipt. The request part
/// (sender..gas_price) is covered by tx_hash; the receipt part is filled in
/// by mine_block and covered by receipt_digest().
struct Transaction {
  Address sender;
  // nullopt means contract deployment.
  std::optional<Address> target;
  Bytes payload;
  std::uint64_t nonce = 0;
  // Informational only: no fee market is simulated.
  Gas gas_price = 1;
  Hash32 tx_hash;

  TxStatus status = TxStatus::kPending;
  std::optional<ErrorCode> error;
  OperationKind kind = OperationKind::kRevertedCall;
  Gas gas_used = 0;
  std::optional<Address> created;

  Hash32 compute_hash() const;
  Hash32 receipt_digest() const;
};

struct Block {
  std::uint64_t height = 0;
  Hash32 parent_hash;
  EpochMs timestamp = 0;
  std::vector<Transaction> transactions;
  Hash32 block_hash;

  Hash32 compute_hash() const;
};

/// Simulated time source. Only scenarios move it; nothing reads wall time.
class VirtualClock {
 public:
  explicit VirtualClock(EpochMs start) : now_(start) {}

  EpochMs now() const { return now_; }
  // Throws std::invalid_argument when moving backwards.
  void advance_to(EpochMs t);
  void advance_by(EpochMs delta) { advance_to(now_ + delta); }

 private:
  EpochMs now_;
};

struct BlockContext {
  std::uint64_t height = 0;
  EpochMs timestamp = 0;
  const GasSchedule& gas;
};

struct ExecutionOutcome {
  TxStatus status = TxStatus::kSuccess;
  std::optional<ErrorCode> error;
  OperationKind kind = OperationKind::kRevertedCall;
  Gas gas_used = 0;
  std::optional<Address> created;
};

/// Applies one transaction to contract state. A reverted outcome must leave
/// the executor's state untouched.
class Executor {
 public:
  virtual ~Executor() = default;
  virtual ExecutionOutcome execute(const Transaction& tx, const BlockContext& ctx) = 0;
};

using PendingId = std::uint64_t;

struct TxRequest {
  Address sender;
  std::optional<Address> target;
  Bytes payload;
  Gas gas_price = 1;
};

// Deterministic CREATE-style address of the nonce-th contract made by creator.
Address derive_contract_address(const Address& creator, std::uint64_t nonce);

/// Single-writer, single-chain ledger. Transactions queue until mine_block,
/// which executes them in submission order against the executor.
class Chain {
 public:
  Chain(ChainConfig config, GasSchedule gas, Executor& executor);

  Chain(const Chain&) = delete;
  Chain& operator=(const Chain&) = delete;

  void register_account(const Address& account);
  bool is_known(const Address& account) const { return accounts_.contains(account); }

  // Throws ProtocolError(kUnknownSender).
  PendingId submit_transaction(TxRequest request);

  // Nonce the next submitted transaction from this sender will carry.
  std::uint64_t next_nonce(const Address& sender) const;

  // Throws kTimestampNotMonotonic / kTimestampTooFarAhead.
  const Block& mine_block(EpochMs proposed_timestamp);

  // Mined transaction for a pending id; nullptr while still queued.
  const Transaction* find_transaction(PendingId id) const;
  // Block height that included the pending id; nullopt while queued.
  std::optional<std::uint64_t> inclusion_height(PendingId id) const;

  std::span<const Block> blocks() const { return blocks_; }
  const Block& head() const { return blocks_.back(); }
  std::size_t pending_count() const { return pending_.size(); }

  VirtualClock& clock() { return clock_; }
  const VirtualClock& clock() const { return clock_; }
  EpochMs now() const { return clock_.now(); }

  const ChainConfig& config() const { return config_; }
  const GasSchedule& gas_schedule() const { return gas_; }

  Gas total_gas_used() const { return total_gas_; }

 private:
  struct Location {
    std::uint64_t height;
    std::size_t index;
  };

  ChainConfig config_;
  GasSchedule gas_;
  Executor& executor_;
  VirtualClock clock_;
  std::vector<Block> blocks_;
  std::vector<std::pair<PendingId, Transaction>> pending_;
  std::map<PendingId, Location> locations_;
  std::set<Address> accounts_;
  std::map<Address, std::uint64_t> nonces_;
  PendingId next_id_ = 0;
  Gas total_gas_ = 0;
};

/// One structural defect found while re-verifying a block sequence.
struct LinkIssue {
  enum class Kind : std::uint8_t {
    kBadGenesis,
    kHeightGap,
    kParentMismatch,
    kBlockHashMismatch,
    kTxHashMismatch,
    kTimestampNotIncreasing,
  };
  Kind kind;
  std::uint64_t height;
  std::string detail;
};

std::string_view to_string(LinkIssue::Kind kind);

// Recomputes every hash and link from the stored fields.
std::vector<LinkIssue> verify_chain(std::span<const Block> blocks);

}  // namespace tender::chain
