#pragma once

#include "tender/chain/ledger.hpp"
#include "tender/contracts/calls.hpp"
#include "tender/contracts/state.hpp"

namespace tender::contracts {

/// Executes the tender contract family against a world state. Each call is
/// all-or-nothing: a rejected call reverts and is charged reverted_call gas.
///
///   DeployRft     -> ReqForTender constructor
///   DeployData    -> raw data contract (tender terms or bid ciphertext)
///   PlaceBid      -> PlaceBid of the target RFT's scheme
///   PublishResults-> write-once results slot on the RFT, owner only
///   MutateTender  -> always rejected with TENDER_IMMUTABLE
class TenderExecutor final : public chain::Executor {
 public:
  explicit TenderExecutor(std::size_t max_data_bits = kDefaultMaxDataBits);

  chain::ExecutionOutcome execute(const chain::Transaction& tx,
                                  const chain::BlockContext& ctx) override;

  const WorldState& state() const { return state_; }
  std::size_t max_data_bits() const { return max_data_bits_; }
  std::size_t max_data_bytes() const { return max_data_bits_ / 8; }

 private:
  chain::ExecutionOutcome deploy_rft(const chain::Transaction& tx, const DeployRft& call,
                                     const chain::BlockContext& ctx);
  chain::ExecutionOutcome deploy_data(const chain::Transaction& tx, const DeployData& call,
                                      const chain::BlockContext& ctx);
  chain::ExecutionOutcome place_bid(const chain::Transaction& tx, const PlaceBid& call,
                                    const chain::BlockContext& ctx);
  chain::ExecutionOutcome publish(const chain::Transaction& tx, const PublishResults& call,
                                  const chain::BlockContext& ctx);
  chain::ExecutionOutcome mutate(const chain::Transaction& tx, const MutateTender& call,
                                 const chain::BlockContext& ctx);

  // Contract nodes stay close together, which keeps bid scans cache-friendly.
  std::pmr::unsynchronized_pool_resource pool_;
  WorldState state_{&pool_};
  std::size_t max_data_bits_;
};

// Shape check shared by every scheme: 32-byte msg_hash, r and s, v in {27, 28}.
bool certificate_well_formed(const PlaceBid& call);

}  // namespace tender::contracts
