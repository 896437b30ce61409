#pragma once

#include <cstddef>
#include <string_view>

#include "tender/common/types.hpp"

namespace tender::chain {

/// Closed-form gas model calibrated to measured Ethereum costs of the tender
/// contracts. Deployment is constant per scheme; bid placement grows by one
/// array-copy step per previously recorded bid, except in the stateless
/// scheme where it is flat.
struct GasSchedule {
  Gas deploy_rft_full = 892160;
  Gas deploy_rft_protected = 874791;
  Gas deploy_rft_stateless = 352819;
  Gas bid_base_full = 299501;
  Gas bid_base_protected = 332788;
  Gas bid_flat_stateless = 156601;
  Gas per_prior_bid_copy = 20781;
  // Storage cost for raw data contracts and published results.
  Gas data_contract_per_byte = 16;
  // Charged for any transaction the contract rejects (Ethereum's intrinsic cost).
  Gas reverted_call = 21000;

  // Throws ProtocolError(kInvalidConfig) unless every field is strictly positive.
  void validate() const;

  bool operator==(const GasSchedule&) const = default;
};

enum class OperationKind : std::uint8_t {
  kDeployRftFull,
  kDeployRftProtected,
  kDeployRftStateless,
  kPlaceBidFull,
  kPlaceBidProtected,
  kPlaceBidStateless,
  kDeployData,
  kPublishResults,
  kRevertedCall,
  // Reads never produce a transaction; metering one is an error.
  kReadState,
};

std::string_view to_string(OperationKind kind);
// Throws ProtocolError(kParseError) for unknown names.
OperationKind operation_kind_from_string(std::string_view name);

struct MeterInput {
  // Length of the tender's recorded bid array at execution time.
  std::size_t prior_bids = 0;
  std::size_t payload_bytes = 0;
};

// Throws ProtocolError(kUnmeteredOperation) for kinds that are not metered.
Gas meter_gas(const GasSchedule& schedule, OperationKind kind, const MeterInput& input);

}  // namespace tender::chain
