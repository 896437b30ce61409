#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tender/chain/ledger.hpp"
#include "tender/contracts/state.hpp"

namespace tender::contracts {

/// Everything a citizen can download: the block sequence with receipts and the
/// contract state the network discloses. No actor secrets.
struct ChainExport {
  chain::ChainConfig config;
  chain::GasSchedule gas;
  std::size_t max_data_bits = kDefaultMaxDataBits;
  std::vector<chain::Block> blocks;
  WorldState state;
};

// Canonical JSON text: fixed field order, hex for bytes, shortest round-trip
// decimal strings for reals. Identical exports produce identical text.
std::string to_canonical_text(const ChainExport& exported);
// Throws ProtocolError(kParseError).
ChainExport parse_chain_export(std::string_view text);

// Canonical text for a single contract snapshot (same encoding as the export).
std::string state_to_text(const ContractState& state);

// Shortest decimal string that parses back to exactly the same double.
std::string format_real(double value);
// Throws ProtocolError(kParseError).
double parse_real(std::string_view text);

}  // namespace tender::contracts
