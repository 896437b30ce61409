#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "tender/chain/ledger.hpp"
#include "tender/contracts/executor.hpp"
#include "tender/contracts/export.hpp"
#include "tender/crypto/crypto.hpp"

namespace tender::contracts {

/// A chain wired to the tender contract executor, plus typed wrappers for the
/// contract operations. The typed wrappers submit one transaction, mine it
/// with commit(), and translate a revert into ProtocolError.
class Simulator {
 public:
  explicit Simulator(chain::ChainConfig config = {}, chain::GasSchedule gas = {},
                     std::size_t max_data_bits = kDefaultMaxDataBits);

  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  // Registers an externally owned account derived from label.
  Address create_account(std::string_view label);

  chain::PendingId submit(const Address& sender, std::optional<Address> target, const Call& call);
  // Mines pending transactions at max(now, parent + block_interval), moving the
  // virtual clock forward to that timestamp first.
  const chain::Block& commit();
  // Throws std::logic_error while the transaction is still pending.
  const chain::Transaction& receipt(chain::PendingId id) const;
  // Address a deployment submitted next by sender will receive.
  Address predict_deploy_address(const Address& sender) const;
  // Throws ProtocolError with the revert code if the transaction reverted.
  std::optional<Address> expect_success(chain::PendingId id) const;

  Address init_tender(const Address& sender, EpochMs length_ms, Bytes pubk, std::int64_t limit,
                      Scheme scheme, Address tender_data = {});
  Address deploy_tender_data(const Address& sender, Bytes data);
  // Each wrapper checks the RFT's scheme first (kWrongScheme).
  Address place_bid_full(const Address& sender, const Address& rft, PlaceBid args);
  Address place_bid_protected(const Address& sender, const Address& rft, PlaceBid args);
  Address place_bid_stateless(const Address& sender, const Address& rft, PlaceBid args);

  // Read-only; no transaction, no gas. Fails with kBiddingStillOpen while
  // now() <= biddingEnd and kSchemeHasNoState for stateless tenders.
  std::vector<Address> req_bids(const Address& rft) const;
  // Data addresses of the valid bids, in placement order.
  std::vector<Address> collect_valid_bid_data(const Address& rft) const;

  // Throws ProtocolError(kNoSuchContract).
  const ContractState& read_state(const Address& addr) const;
  template <typename T>
  const T& read_as(const Address& addr) const {
    const auto& s = read_state(addr);
    if (!std::holds_alternative<T>(s)) {
      throw ProtocolError(ErrorCode::kNoSuchContract, "unexpected contract kind at " + addr.hex());
    }
    return std::get<T>(s);
  }

  ChainExport export_chain() const;

  struct Submission {
    chain::PendingId id;
    EpochMs submitted_at;
  };
  // Every submitted transaction with the virtual time it was submitted at.
  const std::vector<Submission>& submissions() const { return submissions_; }

  chain::Chain& chain() { return chain_; }
  const chain::Chain& chain() const { return chain_; }
  const WorldState& state() const { return executor_.state(); }
  EpochMs now() const { return chain_.now(); }
  std::size_t max_data_bits() const { return executor_.max_data_bits(); }

 private:
  const std::vector<Address>& closed_bid_list(const Address& rft) const;
  Address place_bid_checked(Scheme expected, const Address& sender, const Address& rft, PlaceBid args);

  TenderExecutor executor_;
  chain::Chain chain_;
  std::vector<Submission> submissions_;
};

Address account_address(std::string_view label);

/// Auctioneer's signed acknowledgement that it received a bid address
/// out of band (stateless scheme).
struct AckReceipt {
  Address bid;
  std::uint8_t v = 27;
  Bytes r;
  Bytes s;
};

Hash32 acknowledgement_message(const Address& bid);

// Throws ProtocolError(kNoSuchContract) unless bid is a BidRecord on chain.
AckReceipt acknowledge_bid(const Simulator& sim, ByteView auctioneer_private_key, const Address& bid,
                           crypto::Drbg& rng);

bool verify_acknowledgement(ByteView auctioneer_public_key, const AckReceipt& receipt,
                            const Address& bid);

}  // namespace tender::contracts
