#include "tender/cli/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace tender::cli {

namespace {

struct Context {
  std::string source;

  [[noreturn]] void fail(const YAML::Node& node, const std::string& message) const {
    const int line = node.IsDefined() && node.Mark().line >= 0 ? node.Mark().line + 1 : 0;
    throw ScenarioError(source, line, message);
  }

  void only_keys(const YAML::Node& map, std::initializer_list<std::string_view> allowed, std::string_view where) const {
    if (!map.IsMap()) fail(map, std::string(where) + " must be a mapping");
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        fail(kv.first, "unknown key '" + key + "' in " + std::string(where));
      }
    }
  }

  YAML::Node require(const YAML::Node& map, const char* key, std::string_view where) const {
    auto n = map[key];
    if (!n) fail(map, "missing '" + std::string(key) + "' in " + std::string(where));
    return n;
  }

  template <typename T>
  T scalar(const YAML::Node& node, std::string_view what) const {
    if (!node.IsScalar()) fail(node, std::string(what) + " must be a scalar");
    try {
      return node.as<T>();
    } catch (const YAML::BadConversion&) {
      fail(node, "bad value '" + node.Scalar() + "' for " + std::string(what));
    }
  }

  template <typename T>
  T enum_value(const YAML::Node& node, std::string_view what, T (*convert)(std::string_view)) const {
    const auto text = scalar<std::string>(node, what);
    try {
      return convert(text);
    } catch (const ProtocolError& e) {
      fail(node, e.what());
    }
  }
};

ActionKind action_from_string(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(ActionKind::kMutateTender); ++i) {
    const auto kind = static_cast<ActionKind>(i);
    if (to_string(kind) == name) return kind;
  }
  throw ProtocolError(ErrorCode::kParseError, "unknown adversary action '" + std::string(name) + "'");
}

contracts::TenderField field_from_string(std::string_view name) {
  for (auto f : {contracts::TenderField::kBiddingEnd, contracts::TenderField::kLimit, contracts::TenderField::kPubk,
                 contracts::TenderField::kData}) {
    if (contracts::to_string(f) == name) return f;
  }
  throw ProtocolError(ErrorCode::kParseError, "unknown tender field '" + std::string(name) + "'");
}

ReportKind report_from_string(std::string_view name) {
  if (name == "gas") return ReportKind::kGas;
  if (name == "audit") return ReportKind::kAudit;
  if (name == "summary") return ReportKind::kSummary;
  if (name == "chain") return ReportKind::kChain;
  throw ProtocolError(ErrorCode::kParseError, "unknown report '" + std::string(name) + "'");
}

void parse_tender(const Context& ctx, const YAML::Node& node, Scenario& sc) {
  ctx.only_keys(node, {"title", "terms", "length_ms", "limit", "criteria", "predicates"}, "tender");
  auto& t = sc.tender;
  t.title = ctx.scalar<std::string>(ctx.require(node, "title", "tender"), "title");
  if (node["terms"]) {
    const auto terms = ctx.scalar<std::string>(node["terms"], "terms");
    t.terms = Bytes(terms.begin(), terms.end());
  }
  const auto length = ctx.require(node, "length_ms", "tender");
  t.length_ms = ctx.scalar<EpochMs>(length, "length_ms");
  if (t.length_ms <= 0) ctx.fail(length, "length_ms must be positive");
  if (node["limit"]) {
    t.limit = ctx.scalar<std::int64_t>(node["limit"], "limit");
    if (t.limit < 1) ctx.fail(node["limit"], "limit must be at least 1");
  }
  const auto criteria = ctx.require(node, "criteria", "tender");
  if (!criteria.IsSequence() || criteria.size() == 0) ctx.fail(criteria, "criteria must be a non-empty list");
  for (const auto& c : criteria) {
    ctx.only_keys(c, {"field", "weight", "direction"}, "criterion");
    protocol::NumericField f;
    f.name = ctx.scalar<std::string>(ctx.require(c, "field", "criterion"), "field");
    const auto weight = ctx.require(c, "weight", "criterion");
    f.weight = ctx.scalar<double>(weight, "weight");
    if (!std::isfinite(f.weight)) ctx.fail(weight, "weight must be finite");
    f.direction = ctx.enum_value(ctx.require(c, "direction", "criterion"), "direction", protocol::direction_from_string);
    t.criteria.numeric_fields.push_back(std::move(f));
  }
  if (const auto preds = node["predicates"]) {
    if (!preds.IsSequence()) ctx.fail(preds, "predicates must be a list");
    for (const auto& p : preds) {
      ctx.only_keys(p, {"field", "comparator", "threshold"}, "predicate");
      protocol::FeasibilityPredicate fp;
      fp.field = ctx.scalar<std::string>(ctx.require(p, "field", "predicate"), "field");
      fp.comparator =
          ctx.enum_value(ctx.require(p, "comparator", "predicate"), "comparator", protocol::comparator_from_string);
      fp.threshold = ctx.scalar<double>(ctx.require(p, "threshold", "predicate"), "threshold");
      t.criteria.predicates.push_back(std::move(fp));
    }
  }
  try {
    t.criteria.validate();
  } catch (const ProtocolError& e) {
    ctx.fail(criteria, e.what());
  }
}

void parse_bidders(const Context& ctx, const YAML::Node& node, Scenario& sc) {
  if (!node.IsSequence() || node.size() == 0) ctx.fail(node, "bidders must be a non-empty list");
  std::set<std::string> ids;
  for (const auto& b : node) {
    ctx.only_keys(b, {"id", "submit_at_ms", "fields", "text"}, "bidder");
    ScenarioBidder bidder;
    bidder.line = b.Mark().line + 1;
    const auto id = ctx.require(b, "id", "bidder");
    bidder.id = ctx.scalar<std::string>(id, "id");
    if (bidder.id.empty()) ctx.fail(id, "bidder id must not be empty");
    if (!ids.insert(bidder.id).second) ctx.fail(id, "duplicate bidder id '" + bidder.id + "'");
    const auto at = ctx.require(b, "submit_at_ms", "bidder");
    bidder.submit_at_ms = ctx.scalar<EpochMs>(at, "submit_at_ms");
    if (bidder.submit_at_ms < 0) ctx.fail(at, "submit_at_ms must not be negative");
    if (!sc.bidders.empty() && bidder.submit_at_ms <= sc.bidders.back().submit_at_ms) {
      ctx.fail(at, "submit_at_ms must be strictly increasing");
    }
    const auto fields = ctx.require(b, "fields", "bidder");
    if (!fields.IsMap()) ctx.fail(fields, "fields must be a mapping");
    for (const auto& kv : fields) {
      bidder.fields[kv.first.as<std::string>()] = ctx.scalar<double>(kv.second, "field value");
    }
    protocol::BidDocument probe{bidder.id, bidder.fields, {}};
    if (!sc.tender.criteria.complete(probe)) ctx.fail(fields, "bidder '" + bidder.id + "' lacks a criteria field");
    if (b["text"]) bidder.text = ctx.scalar<std::string>(b["text"], "text");
    sc.bidders.push_back(std::move(bidder));
  }
}

void parse_adversary(const Context& ctx, const YAML::Node& node, Scenario& sc) {
  if (!node.IsSequence()) ctx.fail(node, "adversary must be a list");
  for (const auto& a : node) {
    ctx.only_keys(a, {"action", "count", "bidder", "index", "field", "at_ms"}, "adversary action");
    AdversaryAction act;
    act.line = a.Mark().line + 1;
    act.kind = ctx.enum_value(ctx.require(a, "action", "adversary action"), "action", action_from_string);
    if (a["at_ms"]) {
      act.at_ms = ctx.scalar<EpochMs>(a["at_ms"], "at_ms");
      if (act.at_ms < 0 || act.at_ms >= sc.tender.length_ms) ctx.fail(a["at_ms"], "at_ms must lie inside the bidding window");
    }
    auto need_bidder = [&] {
      const auto n = ctx.require(a, "bidder", "adversary action");
      act.bidder = ctx.scalar<std::string>(n, "bidder");
      if (sc.find_bidder(act.bidder) == nullptr) ctx.fail(n, "unknown bidder '" + act.bidder + "'");
    };
    switch (act.kind) {
      case ActionKind::kSpamInvalidCerts: {
        const auto n = ctx.require(a, "count", "SPAM_INVALID_CERTS");
        const auto count = ctx.scalar<std::int64_t>(n, "count");
        if (count < 1) ctx.fail(n, "count must be positive");
        act.count = static_cast<std::size_t>(count);
        break;
      }
      case ActionKind::kLateBid:
      case ActionKind::kForgeCert:
      case ActionKind::kRigWinner:
      case ActionKind::kEarlyKeyReveal:
        need_bidder();
        break;
      case ActionKind::kEraseBid: {
        if (sc.tender.scheme == contracts::Scheme::kStateless) ctx.fail(a, "ERASE_BID needs a scheme with a bid array");
        const auto n = ctx.require(a, "index", "ERASE_BID");
        const auto index = ctx.scalar<std::int64_t>(n, "index");
        if (index < 0) ctx.fail(n, "index must not be negative");
        act.index = static_cast<std::size_t>(index);
        break;
      }
      case ActionKind::kMutateTender:
        act.field = ctx.enum_value(ctx.require(a, "field", "MUTATE_TENDER"), "field", field_from_string);
        break;
    }
    sc.adversary.push_back(std::move(act));
  }
}

void parse_expect(const Context& ctx, const YAML::Node& node, Scenario& sc) {
  ctx.only_keys(node, {"winner_match", "violations", "requirements", "winner"}, "expect");
  auto& e = sc.expect;
  if (node["winner_match"]) e.winner_match = ctx.scalar<bool>(node["winner_match"], "winner_match");
  if (node["winner"]) e.winner = node["winner"].IsNull() ? std::string() : ctx.scalar<std::string>(node["winner"], "winner");
  if (const auto v = node["violations"]) {
    if (!v.IsSequence()) ctx.fail(v, "violations must be a list");
    std::vector<audit::ViolationTag> tags;
    for (const auto& t : v) tags.push_back(ctx.enum_value(t, "violation tag", audit::violation_tag_from_string));
    e.violations = std::move(tags);
  }
  if (const auto r = node["requirements"]) {
    ctx.only_keys(r, {"R1", "R2", "R3", "R4", "R5", "R6"}, "requirements");
    for (const auto& kv : r) {
      e.requirements[kv.first.as<std::string>()] = ctx.enum_value(kv.second, "verdict", audit::verdict_from_string);
    }
  }
}

}  // namespace

std::string_view to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::kSpamInvalidCerts: return "SPAM_INVALID_CERTS";
    case ActionKind::kLateBid: return "LATE_BID";
    case ActionKind::kForgeCert: return "FORGE_CERT";
    case ActionKind::kEraseBid: return "ERASE_BID";
    case ActionKind::kRigWinner: return "RIG_WINNER";
    case ActionKind::kEarlyKeyReveal: return "EARLY_KEY_REVEAL";
    case ActionKind::kMutateTender: return "MUTATE_TENDER";
  }
  return "?";
}

const ScenarioBidder* Scenario::find_bidder(std::string_view id) const {
  auto it = std::find_if(bidders.begin(), bidders.end(), [&](const auto& b) { return b.id == id; });
  return it == bidders.end() ? nullptr : &*it;
}

bool Scenario::has_action(ActionKind kind) const {
  return std::any_of(adversary.begin(), adversary.end(), [&](const auto& a) { return a.kind == kind; });
}

ScenarioError::ScenarioError(std::string source, int line, const std::string& message)
    : ProtocolError(ErrorCode::kParseError, source + ":" + std::to_string(line) + ": " + message), line_(line) {}

Scenario parse_scenario(const std::string& text, const std::string& source) {
  Context ctx{source};
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ScenarioError(source, e.mark.line + 1, e.msg);
  }
  if (!root.IsMap()) throw ScenarioError(source, 1, "scenario must be a mapping");
  ctx.only_keys(root, {"name", "scheme", "seed", "tender", "clock", "bidders", "adversary", "expect", "reports"},
                "scenario");

  Scenario sc;
  sc.source = source;
  sc.name = ctx.scalar<std::string>(ctx.require(root, "name", "scenario"), "name");
  sc.tender.scheme = ctx.enum_value(ctx.require(root, "scheme", "scenario"), "scheme", contracts::scheme_from_string);
  if (root["seed"]) sc.seed = ctx.scalar<std::uint64_t>(root["seed"], "seed");
  parse_tender(ctx, ctx.require(root, "tender", "scenario"), sc);
  if (const auto clock = root["clock"]) {
    ctx.only_keys(clock, {"block_interval_ms"}, "clock");
    if (clock["block_interval_ms"]) {
      sc.block_interval_ms = ctx.scalar<EpochMs>(clock["block_interval_ms"], "block_interval_ms");
      if (sc.block_interval_ms <= 0) ctx.fail(clock["block_interval_ms"], "block_interval_ms must be positive");
    }
  }
  parse_bidders(ctx, ctx.require(root, "bidders", "scenario"), sc);
  for (const auto& b : sc.bidders) {
    if (b.submit_at_ms >= sc.tender.length_ms) {
      throw ScenarioError(source, b.line, "bidder '" + b.id + "' submits after the bidding window; use LATE_BID");
    }
  }
  if (const auto adv = root["adversary"]) parse_adversary(ctx, adv, sc);
  if (const auto exp = root["expect"]) parse_expect(ctx, exp, sc);
  if (const auto reports = root["reports"]) {
    if (!reports.IsSequence()) ctx.fail(reports, "reports must be a list");
    sc.reports.clear();
    for (const auto& r : reports) sc.reports.push_back(ctx.enum_value(r, "report", report_from_string));
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path.string(), 0, "cannot open scenario file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string());
}

}  // namespace tender::cli
