#include "tender/contracts/export.hpp"

#include <charconv>
#include <json.hpp>

namespace tender::contracts {

using json = nlohmann::ordered_json;

std::string format_real(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw std::runtime_error("format_real failed");
  return {buf, end};
}

double parse_real(std::string_view text) {
  double out = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    throw ProtocolError(ErrorCode::kParseError, "not a real number: '" + std::string(text) + "'");
  }
  return out;
}

namespace {

json opt_address(const std::optional<Address>& a) { return a ? json(a->hex()) : json(nullptr); }

json address_list(const std::vector<Address>& list) {
  json arr = json::array();
  for (const auto& a : list) arr.push_back(a.hex());
  return arr;
}

json results_json(const PublishedResults& r) {
  json j;
  j["winner_id"] = r.winner_id;
  j["winner_bid"] = opt_address(r.winner_bid);
  j["disclosed_bids"] = address_list(r.disclosed_bids);
  json scores = json::array();
  for (const auto& s : r.scores) scores.push_back({{"bid", s.bid.hex()}, {"score", format_real(s.score)}});
  j["scores"] = std::move(scores);
  json revealed = json::array();
  for (const auto& k : r.revealed) {
    revealed.push_back(
        {{"bid", k.bid.hex()}, {"sealed_key", to_hex(k.sealed_key)}, {"bid_key", to_hex(k.bid_key)}});
  }
  j["revealed"] = std::move(revealed);
  return j;
}

json state_json(const ContractState& state) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        json j;
        if constexpr (std::is_same_v<T, RftState>) {
          j["type"] = "RFT";
          j["owner"] = s.owner.hex();
          j["scheme"] = std::string(to_string(s.scheme));
          j["bidding_end"] = s.bidding_end;
          j["limit"] = s.limit;
          j["pubk"] = to_hex(s.pubk);
          j["tender_data"] = s.tender_data.hex();
          json counts = json::object();
          for (const auto& [id, n] : s.bid_count) counts[id] = n;
          j["bid_count"] = std::move(counts);
          j["bids_placed"] = s.bids_placed ? address_list(*s.bids_placed) : json(nullptr);
          j["nonce"] = s.nonce;
          j["results"] = s.results ? results_json(*s.results) : json(nullptr);
        } else if constexpr (std::is_same_v<T, TenderDataContract>) {
          j["type"] = "DATA";
          j["owner"] = s.owner.hex();
          j["data"] = to_hex(s.data);
        } else {
          j["type"] = "BID";
          j["rft"] = s.rft.hex();
          j["id"] = s.id;
          j["data_addr"] = s.data_addr.hex();
          j["validity"] = s.validity;
          j["prior_bids"] = s.prior_bids ? address_list(*s.prior_bids) : json(nullptr);
          j["bidding_end_copy"] = s.bidding_end_copy ? json(*s.bidding_end_copy) : json(nullptr);
          j["sealed_half_a"] = to_hex(s.sealed_half_a);
        }
        return j;
      },
      state);
}

json tx_json(const chain::Transaction& tx) {
  json j;
  j["sender"] = tx.sender.hex();
  j["target"] = opt_address(tx.target);
  j["nonce"] = tx.nonce;
  j["gas_price"] = tx.gas_price;
  j["payload"] = to_hex(tx.payload);
  j["tx_hash"] = tx.tx_hash.hex();
  j["status"] = std::string(to_string(tx.status));
  j["error"] = tx.error ? json(std::string(to_string(*tx.error))) : json(nullptr);
  j["kind"] = std::string(chain::to_string(tx.kind));
  j["gas_used"] = tx.gas_used;
  j["created"] = opt_address(tx.created);
  return j;
}

// --- parsing ---------------------------------------------------------------

std::optional<Address> read_opt_address(const json& j) {
  if (j.is_null()) return std::nullopt;
  return Address::from_hex(j.get<std::string>());
}

std::vector<Address> read_address_list(const json& j) {
  std::vector<Address> out;
  for (const auto& a : j) out.push_back(Address::from_hex(a.get<std::string>()));
  return out;
}

PublishedResults read_results(const json& j) {
  PublishedResults r;
  r.winner_id = j.at("winner_id").get<std::string>();
  r.winner_bid = read_opt_address(j.at("winner_bid"));
  r.disclosed_bids = read_address_list(j.at("disclosed_bids"));
  for (const auto& s : j.at("scores")) {
    r.scores.push_back({Address::from_hex(s.at("bid").get<std::string>()),
                        parse_real(s.at("score").get<std::string>())});
  }
  for (const auto& k : j.at("revealed")) {
    r.revealed.push_back({Address::from_hex(k.at("bid").get<std::string>()),
                          from_hex(k.at("sealed_key").get<std::string>()),
                          from_hex(k.at("bid_key").get<std::string>())});
  }
  return r;
}

ContractState read_state(const json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "RFT") {
    RftState s;
    s.owner = Address::from_hex(j.at("owner").get<std::string>());
    s.scheme = scheme_from_string(j.at("scheme").get<std::string>());
    s.bidding_end = j.at("bidding_end").get<EpochMs>();
    s.limit = j.at("limit").get<std::uint32_t>();
    s.pubk = from_hex(j.at("pubk").get<std::string>());
    s.tender_data = Address::from_hex(j.at("tender_data").get<std::string>());
    for (const auto& [id, n] : j.at("bid_count").items()) s.bid_count[id] = n.get<std::uint32_t>();
    if (!j.at("bids_placed").is_null()) s.bids_placed = read_address_list(j.at("bids_placed"));
    s.nonce = j.at("nonce").get<std::uint64_t>();
    if (!j.at("results").is_null()) s.results = read_results(j.at("results"));
    return s;
  }
  if (type == "DATA") {
    return TenderDataContract{Address::from_hex(j.at("owner").get<std::string>()),
                              from_hex(j.at("data").get<std::string>())};
  }
  if (type == "BID") {
    BidRecord b;
    b.rft = Address::from_hex(j.at("rft").get<std::string>());
    b.id = j.at("id").get<std::string>();
    b.data_addr = Address::from_hex(j.at("data_addr").get<std::string>());
    b.validity = j.at("validity").get<bool>();
    if (!j.at("prior_bids").is_null()) b.prior_bids = read_address_list(j.at("prior_bids"));
    if (!j.at("bidding_end_copy").is_null()) b.bidding_end_copy = j.at("bidding_end_copy").get<EpochMs>();
    b.sealed_half_a = from_hex(j.at("sealed_half_a").get<std::string>());
    return b;
  }
  throw ProtocolError(ErrorCode::kParseError, "unknown contract type '" + type + "'");
}

chain::TxStatus read_status(const std::string& s) {
  for (auto st : {chain::TxStatus::kPending, chain::TxStatus::kSuccess, chain::TxStatus::kReverted}) {
    if (chain::to_string(st) == s) return st;
  }
  throw ProtocolError(ErrorCode::kParseError, "unknown status '" + s + "'");
}

ErrorCode read_error(const std::string& s) {
  for (int i = 0; i <= static_cast<int>(ErrorCode::kParseError); ++i) {
    auto code = static_cast<ErrorCode>(i);
    if (to_string(code) == s) return code;
  }
  throw ProtocolError(ErrorCode::kParseError, "unknown error code '" + s + "'");
}

chain::Transaction read_tx(const json& j) {
  chain::Transaction tx;
  tx.sender = Address::from_hex(j.at("sender").get<std::string>());
  tx.target = read_opt_address(j.at("target"));
  tx.nonce = j.at("nonce").get<std::uint64_t>();
  tx.gas_price = j.at("gas_price").get<Gas>();
  tx.payload = from_hex(j.at("payload").get<std::string>());
  tx.tx_hash = Hash32::from_hex(j.at("tx_hash").get<std::string>());
  tx.status = read_status(j.at("status").get<std::string>());
  if (!j.at("error").is_null()) tx.error = read_error(j.at("error").get<std::string>());
  tx.kind = chain::operation_kind_from_string(j.at("kind").get<std::string>());
  tx.gas_used = j.at("gas_used").get<Gas>();
  tx.created = read_opt_address(j.at("created"));
  return tx;
}

}  // namespace

std::string state_to_text(const ContractState& state) { return state_json(state).dump(2); }

std::string to_canonical_text(const ChainExport& exported) {
  json root;
  root["format"] = "tender-chain-export/1";
  const auto& c = exported.config;
  root["config"] = {{"block_interval_ms", c.block_interval_ms},
                    {"max_future_drift_ms", c.max_future_drift_ms},
                    {"genesis_timestamp", c.genesis_timestamp}};
  const auto& g = exported.gas;
  root["gas_schedule"] = {{"deploy_rft_full", g.deploy_rft_full},
                          {"deploy_rft_protected", g.deploy_rft_protected},
                          {"deploy_rft_stateless", g.deploy_rft_stateless},
                          {"bid_base_full", g.bid_base_full},
                          {"bid_base_protected", g.bid_base_protected},
                          {"bid_flat_stateless", g.bid_flat_stateless},
                          {"per_prior_bid_copy", g.per_prior_bid_copy},
                          {"data_contract_per_byte", g.data_contract_per_byte},
                          {"reverted_call", g.reverted_call}};
  root["max_data_bits"] = exported.max_data_bits;
  json blocks = json::array();
  for (const auto& b : exported.blocks) {
    json jb;
    jb["height"] = b.height;
    jb["parent_hash"] = b.parent_hash.hex();
    jb["timestamp"] = b.timestamp;
    jb["block_hash"] = b.block_hash.hex();
    json txs = json::array();
    for (const auto& tx : b.transactions) txs.push_back(tx_json(tx));
    jb["transactions"] = std::move(txs);
    blocks.push_back(std::move(jb));
  }
  root["blocks"] = std::move(blocks);
  json state = json::array();
  for (const auto& addr : sorted_addresses(exported.state)) {
    json entry;
    entry["address"] = addr.hex();
    entry["contract"] = state_json(exported.state.at(addr));
    state.push_back(std::move(entry));
  }
  root["state"] = std::move(state);
  return root.dump(2) + "\n";
}

ChainExport parse_chain_export(std::string_view text) {
  try {
    auto root = json::parse(text);
    if (root.at("format").get<std::string>() != "tender-chain-export/1") {
      throw ProtocolError(ErrorCode::kParseError, "unsupported export format");
    }
    ChainExport out;
    const auto& c = root.at("config");
    out.config.block_interval_ms = c.at("block_interval_ms").get<EpochMs>();
    out.config.max_future_drift_ms = c.at("max_future_drift_ms").get<EpochMs>();
    out.config.genesis_timestamp = c.at("genesis_timestamp").get<EpochMs>();
    const auto& g = root.at("gas_schedule");
    out.gas.deploy_rft_full = g.at("deploy_rft_full").get<Gas>();
    out.gas.deploy_rft_protected = g.at("deploy_rft_protected").get<Gas>();
    out.gas.deploy_rft_stateless = g.at("deploy_rft_stateless").get<Gas>();
    out.gas.bid_base_full = g.at("bid_base_full").get<Gas>();
    out.gas.bid_base_protected = g.at("bid_base_protected").get<Gas>();
    out.gas.bid_flat_stateless = g.at("bid_flat_stateless").get<Gas>();
    out.gas.per_prior_bid_copy = g.at("per_prior_bid_copy").get<Gas>();
    out.gas.data_contract_per_byte = g.at("data_contract_per_byte").get<Gas>();
    out.gas.reverted_call = g.at("reverted_call").get<Gas>();
    out.max_data_bits = root.at("max_data_bits").get<std::size_t>();
    for (const auto& jb : root.at("blocks")) {
      chain::Block b;
      b.height = jb.at("height").get<std::uint64_t>();
      b.parent_hash = Hash32::from_hex(jb.at("parent_hash").get<std::string>());
      b.timestamp = jb.at("timestamp").get<EpochMs>();
      b.block_hash = Hash32::from_hex(jb.at("block_hash").get<std::string>());
      for (const auto& jt : jb.at("transactions")) b.transactions.push_back(read_tx(jt));
      out.blocks.push_back(std::move(b));
    }
    for (const auto& entry : root.at("state")) {
      out.state.emplace(Address::from_hex(entry.at("address").get<std::string>()),
                        read_state(entry.at("contract")));
    }
    return out;
  } catch (const ProtocolError&) {
    throw;
  } catch (const std::exception& e) {
    throw ProtocolError(ErrorCode::kParseError, e.what());
  }
}

}  // namespace tender::contracts
