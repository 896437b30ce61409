#include "tender/chain/gas.hpp"

#include <array>
#include <string>
#include <utility>

namespace tender::chain {

void GasSchedule::validate() const {
  const std::array<std::pair<const char*, Gas>, 9> fields{{
      {"deploy_rft_full", deploy_rft_full},
      {"deploy_rft_protected", deploy_rft_protected},
      {"deploy_rft_stateless", deploy_rft_stateless},
      {"bid_base_full", bid_base_full},
      {"bid_base_protected", bid_base_protected},
      {"bid_flat_stateless", bid_flat_stateless},
      {"per_prior_bid_copy", per_prior_bid_copy},
      {"data_contract_per_byte", data_contract_per_byte},
      {"reverted_call", reverted_call},
  }};
  for (const auto& [name, value] : fields) {
    if (value == 0) {
      throw ProtocolError(ErrorCode::kInvalidConfig, std::string(name) + " must be positive");
    }
  }
}

std::string_view to_string(OperationKind kind) {
  switch (kind) {
    case OperationKind::kDeployRftFull: return "DEPLOY_RFT_FULL";
    case OperationKind::kDeployRftProtected: return "DEPLOY_RFT_PROTECTED";
    case OperationKind::kDeployRftStateless: return "DEPLOY_RFT_STATELESS";
    case OperationKind::kPlaceBidFull: return "PLACE_BID_FULL";
    case OperationKind::kPlaceBidProtected: return "PLACE_BID_PROTECTED";
    case OperationKind::kPlaceBidStateless: return "PLACE_BID_STATELESS";
    case OperationKind::kDeployData: return "DEPLOY_DATA";
    case OperationKind::kPublishResults: return "PUBLISH_RESULTS";
    case OperationKind::kRevertedCall: return "REVERTED_CALL";
    case OperationKind::kReadState: return "READ_STATE";
  }
  return "UNKNOWN";
}

OperationKind operation_kind_from_string(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(OperationKind::kReadState); ++i) {
    auto kind = static_cast<OperationKind>(i);
    if (to_string(kind) == name) return kind;
  }
  throw ProtocolError(ErrorCode::kParseError, "unknown operation kind " + std::string(name));
}

Gas meter_gas(const GasSchedule& schedule, OperationKind kind, const MeterInput& input) {
  const Gas copies = schedule.per_prior_bid_copy * static_cast<Gas>(input.prior_bids);
  switch (kind) {
    case OperationKind::kDeployRftFull: return schedule.deploy_rft_full;
    case OperationKind::kDeployRftProtected: return schedule.deploy_rft_protected;
    case OperationKind::kDeployRftStateless: return schedule.deploy_rft_stateless;
    case OperationKind::kPlaceBidFull: return schedule.bid_base_full + copies;
    case OperationKind::kPlaceBidProtected: return schedule.bid_base_protected + copies;
    case OperationKind::kPlaceBidStateless: return schedule.bid_flat_stateless;
    case OperationKind::kDeployData:
    case OperationKind::kPublishResults:
      return schedule.data_contract_per_byte * static_cast<Gas>(input.payload_bytes);
    case OperationKind::kRevertedCall: return schedule.reverted_call;
    case OperationKind::kReadState: break;
  }
  throw ProtocolError(ErrorCode::kUnmeteredOperation,
                      "operation kind " + std::to_string(static_cast<int>(kind)));
}

}  // namespace tender::chain
