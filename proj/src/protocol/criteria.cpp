#include "tender/protocol/criteria.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "tender/contracts/export.hpp"

namespace tender::protocol {

namespace {

[[noreturn]] void malformed(const std::string& what) {
  throw ProtocolError(ErrorCode::kMalformedPayload, what);
}

bool valid_name(std::string_view name) {
  return !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
  });
}

std::string escape(ByteView value) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (std::uint8_t b : value) {
    if (b == '\\') {
      out += "\\\\";
    } else if (b == '\n') {
      out += "\\n";
    } else if (b < 0x20 || b >= 0x7f) {
      out += "\\x";
      out += kHex[b >> 4];
      out += kHex[b & 0xf];
    } else {
      out += static_cast<char>(b);
    }
  }
  return out;
}

Bytes unescape(std::string_view text) {
  Bytes out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c != '\\') {
      out.push_back(static_cast<std::uint8_t>(c));
      continue;
    }
    if (++i >= text.size()) malformed("dangling escape");
    if (text[i] == '\\') {
      out.push_back('\\');
    } else if (text[i] == 'n') {
      out.push_back('\n');
    } else if (text[i] == 'x' && i + 2 < text.size()) {
      try {
        auto b = from_hex(text.substr(i + 1, 2));
        out.push_back(b.at(0));
      } catch (const std::invalid_argument&) {
        malformed("bad \\x escape");
      }
      i += 2;
    } else {
      malformed("unknown escape");
    }
  }
  return out;
}

std::string as_text(ByteView b) { return {b.begin(), b.end()}; }

double real_value(const std::string& text) {
  try {
    const double v = contracts::parse_real(text);
    if (!std::isfinite(v)) malformed("non-finite number");
    return v;
  } catch (const ProtocolError&) {
    malformed("bad number '" + text + "'");
  }
}

std::int64_t int_value(const std::string& text) {
  std::int64_t v = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || end != text.data() + text.size()) malformed("bad integer '" + text + "'");
  return v;
}

std::string index_key(std::string_view prefix, std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%03zu", i);
  return std::string(prefix) + buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t pos; (pos = s.find(sep, start)) != std::string::npos; start = pos + 1) {
    parts.push_back(s.substr(start, pos - start));
  }
  parts.push_back(s.substr(start));
  return parts;
}

const std::string& require(const std::map<std::string, std::string>& m, const std::string& key) {
  auto it = m.find(key);
  if (it == m.end()) malformed("missing key '" + key + "'");
  return it->second;
}

}  // namespace

std::string_view to_string(Direction d) { return d == Direction::kMinimize ? "MINIMIZE" : "MAXIMIZE"; }

std::string_view to_string(Comparator c) {
  switch (c) {
    case Comparator::kLe: return "LE";
    case Comparator::kLt: return "LT";
    case Comparator::kGe: return "GE";
    case Comparator::kGt: return "GT";
    case Comparator::kEq: return "EQ";
  }
  return "?";
}

Direction direction_from_string(std::string_view name) {
  if (name == "MINIMIZE") return Direction::kMinimize;
  if (name == "MAXIMIZE") return Direction::kMaximize;
  throw ProtocolError(ErrorCode::kParseError, "unknown direction '" + std::string(name) + "'");
}

Comparator comparator_from_string(std::string_view name) {
  for (auto c : {Comparator::kLe, Comparator::kLt, Comparator::kGe, Comparator::kGt, Comparator::kEq}) {
    if (to_string(c) == name) return c;
  }
  throw ProtocolError(ErrorCode::kParseError, "unknown comparator '" + std::string(name) + "'");
}

bool FeasibilityPredicate::holds(double value) const {
  switch (comparator) {
    case Comparator::kLe: return value <= threshold;
    case Comparator::kLt: return value < threshold;
    case Comparator::kGe: return value >= threshold;
    case Comparator::kGt: return value > threshold;
    case Comparator::kEq: return value == threshold;
  }
  return false;
}

Bytes serialize_record(const std::map<std::string, std::string>& entries) {
  std::string out;
  for (const auto& [key, value] : entries) {
    if (key.empty() || key.find_first_of("=\n\\") != std::string::npos) {
      throw std::invalid_argument("bad record key '" + key + "'");
    }
    out += key;
    out += '=';
    out += escape(as_bytes(value));
    out += '\n';
  }
  return Bytes(out.begin(), out.end());
}

std::map<std::string, std::string> parse_record(ByteView data) {
  std::map<std::string, std::string> out;
  const std::string text = as_text(data);
  std::size_t start = 0;
  while (start < text.size()) {
    const auto nl = text.find('\n', start);
    if (nl == std::string::npos) malformed("record line without newline");
    const std::string line = text.substr(start, nl - start);
    start = nl + 1;
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0) malformed("record line without key");
    std::string key = line.substr(0, eq);
    if (!out.empty() && key <= out.rbegin()->first) malformed("record keys out of order at '" + key + "'");
    out.emplace(std::move(key), as_text(unescape(std::string_view(line).substr(eq + 1))));
  }
  return out;
}

Bytes BidDocument::serialize() const {
  std::map<std::string, std::string> rec;
  rec["bidder"] = bidder_id;
  for (const auto& [name, value] : fields) {
    if (!valid_name(name)) throw std::invalid_argument("bad field name '" + name + "'");
    rec["field." + name] = contracts::format_real(value);
  }
  rec["text"] = as_text(text);
  return serialize_record(rec);
}

BidDocument BidDocument::parse(ByteView data) {
  BidDocument doc;
  bool has_text = false;
  for (const auto& [key, value] : parse_record(data)) {
    if (key == "bidder") {
      doc.bidder_id = value;
    } else if (key == "text") {
      doc.text = Bytes(value.begin(), value.end());
      has_text = true;
    } else if (key.starts_with("field.") && valid_name(key.substr(6))) {
      doc.fields[key.substr(6)] = real_value(value);
    } else {
      malformed("unknown bid key '" + key + "'");
    }
  }
  if (doc.bidder_id.empty() || !has_text) malformed("bid document missing bidder or text");
  return doc;
}

void EvaluationCriteria::validate() const {
  auto bad = [](const std::string& what) { throw ProtocolError(ErrorCode::kInvalidConfig, what); };
  if (numeric_fields.empty()) bad("criteria need at least one numeric field");
  for (const auto& f : numeric_fields) {
    if (!valid_name(f.name)) bad("bad field name '" + f.name + "'");
    if (!std::isfinite(f.weight)) bad("weight of '" + f.name + "' is not finite");
  }
  for (const auto& p : predicates) {
    if (!valid_name(p.field)) bad("bad predicate field '" + p.field + "'");
    if (!std::isfinite(p.threshold)) bad("threshold on '" + p.field + "' is not finite");
  }
}

bool EvaluationCriteria::complete(const BidDocument& doc) const {
  auto has = [&](const std::string& name) { return doc.fields.contains(name); };
  return std::all_of(numeric_fields.begin(), numeric_fields.end(), [&](const auto& f) { return has(f.name); }) &&
         std::all_of(predicates.begin(), predicates.end(), [&](const auto& p) { return has(p.field); });
}

bool EvaluationCriteria::feasible(const BidDocument& doc) const {
  return std::all_of(predicates.begin(), predicates.end(),
                     [&](const auto& p) { return p.holds(doc.fields.at(p.field)); });
}

double EvaluationCriteria::score(const BidDocument& doc) const {
  double total = 0.0;
  for (const auto& f : numeric_fields) {
    const double v = doc.fields.at(f.name);
    total += f.direction == Direction::kMaximize ? f.weight * v : -f.weight * v;
  }
  return total;
}

std::optional<Address> select_winner(std::span<const ScoredBid> candidates) {
  const ScoredBid* best = nullptr;
  for (const auto& c : candidates) {
    if (!c.feasible) continue;
    if (best == nullptr || c.score > best->score || (c.score == best->score && c.bid < best->bid)) {
      best = &c;
    }
  }
  if (best == nullptr) return std::nullopt;
  return best->bid;
}

Bytes TenderSpec::serialize() const {
  std::map<std::string, std::string> rec;
  rec["title"] = title;
  rec["terms"] = as_text(terms);
  rec["length_ms"] = std::to_string(length_ms);
  rec["limit"] = std::to_string(limit);
  rec["scheme"] = std::string(contracts::to_string(scheme));
  for (std::size_t i = 0; i < criteria.numeric_fields.size(); ++i) {
    const auto& f = criteria.numeric_fields[i];
    rec[index_key("criteria.field.", i)] =
        f.name + ";" + contracts::format_real(f.weight) + ";" + std::string(to_string(f.direction));
  }
  for (std::size_t i = 0; i < criteria.predicates.size(); ++i) {
    const auto& p = criteria.predicates[i];
    rec[index_key("criteria.predicate.", i)] =
        p.field + ";" + std::string(to_string(p.comparator)) + ";" + contracts::format_real(p.threshold);
  }
  return serialize_record(rec);
}

TenderSpec TenderSpec::parse(ByteView data) {
  const auto rec = parse_record(data);
  TenderSpec spec;
  spec.title = require(rec, "title");
  const auto& terms = require(rec, "terms");
  spec.terms = Bytes(terms.begin(), terms.end());
  spec.length_ms = int_value(require(rec, "length_ms"));
  spec.limit = int_value(require(rec, "limit"));
  try {
    spec.scheme = contracts::scheme_from_string(require(rec, "scheme"));
  } catch (const ProtocolError& e) {
    malformed(e.what());
  }
  std::size_t known = 5;
  for (std::size_t i = 0;; ++i) {
    auto it = rec.find(index_key("criteria.field.", i));
    if (it == rec.end()) break;
    ++known;
    const auto parts = split(it->second, ';');
    if (parts.size() != 3) malformed("criteria field needs name;weight;direction");
    try {
      spec.criteria.numeric_fields.push_back({parts[0], real_value(parts[1]), direction_from_string(parts[2])});
    } catch (const ProtocolError& e) {
      malformed(e.what());
    }
  }
  for (std::size_t i = 0;; ++i) {
    auto it = rec.find(index_key("criteria.predicate.", i));
    if (it == rec.end()) break;
    ++known;
    const auto parts = split(it->second, ';');
    if (parts.size() != 3) malformed("predicate needs field;comparator;threshold");
    try {
      spec.criteria.predicates.push_back({parts[0], comparator_from_string(parts[1]), real_value(parts[2])});
    } catch (const ProtocolError& e) {
      malformed(e.what());
    }
  }
  if (known != rec.size()) malformed("unknown keys in tender spec");
  try {
    spec.criteria.validate();
  } catch (const ProtocolError& e) {
    malformed(e.what());
  }
  return spec;
}

}  // namespace tender::protocol
