#include <gtest/gtest.h>

#include "tender/chain/ledger.hpp"
#include "tender/crypto/crypto.hpp"

using namespace tender;
using namespace tender::chain;

namespace {

// Accepts every transaction as a reverted call; enough to exercise the ledger.
class NullExecutor : public Executor {
 public:
  ExecutionOutcome execute(const Transaction&, const BlockContext& ctx) override {
    ++calls;
    return {TxStatus::kReverted, ErrorCode::kNoSuchContract, OperationKind::kRevertedCall, ctx.gas.reverted_call, {}};
  }
  int calls = 0;
};

Address account(std::uint8_t b) {
  Address a;
  a.bytes.fill(b);
  return a;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const ProtocolError& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected a ProtocolError";
  return ErrorCode::kParseError;
}

}  // namespace

TEST(Chain, GenesisIsValid) {
  NullExecutor ex;
  Chain chain({}, {}, ex);
  ASSERT_EQ(chain.blocks().size(), 1u);
  EXPECT_EQ(chain.head().height, 0u);
  EXPECT_TRUE(verify_chain(chain.blocks()).empty());
}

TEST(Chain, MinesQueuedTransactionsInOrder) {
  NullExecutor ex;
  Chain chain({}, {}, ex);
  chain.register_account(account(1));
  const auto a = chain.submit_transaction({account(1), account(9), Bytes{1}});
  const auto b = chain.submit_transaction({account(1), account(9), Bytes{2}});
  EXPECT_EQ(chain.find_transaction(a), nullptr);
  EXPECT_EQ(chain.pending_count(), 2u);
  const auto& block = chain.mine_block(chain.now() + 1);
  ASSERT_EQ(block.transactions.size(), 2u);
  EXPECT_EQ(block.transactions[0].nonce, 0u);
  EXPECT_EQ(block.transactions[1].nonce, 1u);
  EXPECT_EQ(chain.find_transaction(b)->payload, Bytes{2});
  EXPECT_EQ(chain.inclusion_height(a), 1u);
  EXPECT_EQ(chain.total_gas_used(), 42000u);
  EXPECT_EQ(ex.calls, 2);
  EXPECT_TRUE(verify_chain(chain.blocks()).empty());
}

TEST(Chain, RejectsUnknownSender) {
  NullExecutor ex;
  Chain chain({}, {}, ex);
  EXPECT_EQ(code_of([&] { chain.submit_transaction({account(2), std::nullopt, {}}); }), ErrorCode::kUnknownSender);
}

TEST(Chain, RejectsBackdatedAndFarFutureBlocks) {
  NullExecutor ex;
  Chain chain({}, {}, ex);
  const auto genesis = chain.head().timestamp;
  EXPECT_EQ(code_of([&] { chain.mine_block(genesis); }), ErrorCode::kTimestampNotMonotonic);
  EXPECT_EQ(code_of([&] { chain.mine_block(genesis - 1000); }), ErrorCode::kTimestampNotMonotonic);
  const auto drift = chain.config().max_future_drift_ms;
  EXPECT_EQ(code_of([&] { chain.mine_block(chain.now() + drift + 1); }), ErrorCode::kTimestampTooFarAhead);
  EXPECT_NO_THROW(chain.mine_block(chain.now() + drift));
  EXPECT_EQ(chain.blocks().size(), 2u);
}

TEST(Chain, ContractAddressesAreDeterministicAndDistinct) {
  EXPECT_EQ(derive_contract_address(account(1), 0), derive_contract_address(account(1), 0));
  EXPECT_NE(derive_contract_address(account(1), 0), derive_contract_address(account(1), 1));
  EXPECT_NE(derive_contract_address(account(1), 0), derive_contract_address(account(2), 0));
}

TEST(Chain, RejectsInvalidConfig) {
  NullExecutor ex;
  ChainConfig bad;
  bad.block_interval_ms = 0;
  EXPECT_EQ(code_of([&] { Chain c(bad, {}, ex); }), ErrorCode::kInvalidConfig);
}

TEST(VirtualClock, NeverMovesBackwards) {
  VirtualClock clock(100);
  clock.advance_by(5);
  EXPECT_EQ(clock.now(), 105);
  EXPECT_THROW(clock.advance_to(104), std::invalid_argument);
}

class ChainTamper : public ::testing::Test {
 protected:
  void SetUp() override {
    chain.register_account(account(1));
    for (int i = 0; i < 4; ++i) {
      chain.submit_transaction({account(1), account(3), Bytes{static_cast<std::uint8_t>(i)}});
      chain.mine_block(chain.now() + 1 + i);
    }
    blocks.assign(chain.blocks().begin(), chain.blocks().end());
  }
  bool has(LinkIssue::Kind kind) const {
    for (const auto& issue : verify_chain(blocks)) {
      if (issue.kind == kind) return true;
    }
    return false;
  }
  NullExecutor ex;
  Chain chain{{}, {}, ex};
  std::vector<Block> blocks;
};

TEST_F(ChainTamper, DetectsPayloadEdit) {
  blocks[2].transactions[0].payload.push_back(0);
  EXPECT_TRUE(has(LinkIssue::Kind::kTxHashMismatch));
}

TEST_F(ChainTamper, DetectsReceiptEdit) {
  blocks[2].transactions[0].gas_used += 1;
  EXPECT_TRUE(has(LinkIssue::Kind::kBlockHashMismatch));
}

TEST_F(ChainTamper, DetectsRehashedBackdatedBlock) {
  blocks[3].timestamp = blocks[2].timestamp;
  blocks[3].block_hash = blocks[3].compute_hash();
  EXPECT_TRUE(has(LinkIssue::Kind::kTimestampNotIncreasing));
  EXPECT_TRUE(has(LinkIssue::Kind::kParentMismatch));
}

TEST_F(ChainTamper, DetectsRemovedBlock) {
  blocks.erase(blocks.begin() + 2);
  EXPECT_FALSE(verify_chain(blocks).empty());
}

TEST(ChainProperty, RandomScheduleKeepsTimestampsIncreasing) {
  crypto::Drbg rng(77);
  for (int run = 0; run < 20; ++run) {
    NullExecutor ex;
    Chain chain({}, {}, ex);
    for (int i = 0; i < 50; ++i) {
      const auto parent = chain.head().timestamp;
      // Anything from well before the parent to beyond the drift window.
      const EpochMs proposal = parent - 20'000 + static_cast<EpochMs>(rng.uniform(1'000'000));
      if (rng.uniform(3) == 0) chain.clock().advance_by(static_cast<EpochMs>(rng.uniform(60'000)));
      try {
        chain.mine_block(proposal);
      } catch (const ProtocolError&) {
      }
    }
    const auto blocks = chain.blocks();
    for (std::size_t i = 1; i < blocks.size(); ++i) {
      EXPECT_GT(blocks[i].timestamp, blocks[i - 1].timestamp);
      EXPECT_LE(blocks[i].timestamp - blocks[0].timestamp,
                chain.now() - blocks[0].timestamp + chain.config().max_future_drift_ms);
    }
    EXPECT_TRUE(verify_chain(blocks).empty());
  }
}
