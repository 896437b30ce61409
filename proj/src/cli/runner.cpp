#include "tender/cli/runner.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "tender/contracts/export.hpp"
#include "tender/protocol/orchestrator.hpp"

namespace tender::cli {

using contracts::RftState;

std::string_view to_string(Role role) {
  switch (role) {
    case Role::kOrganisation: return "organisation";
    case Role::kBidder: return "bidder";
    case Role::kAdversary: return "adversary";
  }
  return "?";
}

Gas ScenarioOutcome::deployment_gas() const {
  for (const auto& r : gas_rows) {
    if (r.kind == chain::OperationKind::kDeployRftFull || r.kind == chain::OperationKind::kDeployRftProtected ||
        r.kind == chain::OperationKind::kDeployRftStateless) {
      return r.gas_used;
    }
  }
  return 0;
}

std::vector<Gas> ScenarioOutcome::bidder_bid_gas() const {
  std::vector<Gas> out;
  for (const auto& r : gas_rows) {
    const bool bid = r.kind == chain::OperationKind::kPlaceBidFull ||
                     r.kind == chain::OperationKind::kPlaceBidProtected ||
                     r.kind == chain::OperationKind::kPlaceBidStateless;
    if (bid && r.role == Role::kBidder && r.status == chain::TxStatus::kSuccess) out.push_back(r.gas_used);
  }
  return out;
}

double gas_slope(const std::vector<Gas>& series) {
  if (series.size() < 2) return 0.0;
  return (static_cast<double>(series.back()) - static_cast<double>(series.front())) /
         static_cast<double>(series.size() - 1);
}

namespace {

std::string describe_call(ByteView payload) {
  try {
    const auto call = contracts::decode_call(payload);
    return std::visit(
        [](const auto& c) -> std::string {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, contracts::DeployRft>) return "deploy_rft";
          if constexpr (std::is_same_v<T, contracts::DeployData>) return "deploy_data";
          if constexpr (std::is_same_v<T, contracts::PlaceBid>) return "place_bid:" + c.id;
          if constexpr (std::is_same_v<T, contracts::PublishResults>) return "publish_results";
          if constexpr (std::is_same_v<T, contracts::MutateTender>) {
            return "mutate_tender:" + std::string(contracts::to_string(c.field));
          }
        },
        call);
  } catch (const ProtocolError&) {
    return "undecodable";
  }
}

struct Event {
  EpochMs at;
  int order;
  std::function<void()> run;
};

class Runner {
 public:
  Runner(const Scenario& sc, std::uint64_t seed)
      : sc_(sc),
        sim_(chain::ChainConfig{.block_interval_ms = sc.block_interval_ms}),
        orch_(sim_, seed) {
    out_.scenario = sc;
    out_.seed = seed;
  }

  ScenarioOutcome run();

 private:
  void submit_bidder(const ScenarioBidder& b);
  void spam(const AdversaryAction& a);
  void forge(const AdversaryAction& a);
  void mutate(const AdversaryAction& a);
  void reveal_early(const std::string& id);
  void probe_sealed(const std::string& id);
  void collect_gas_rows();
  void check_expectations();
  Address adversary();

  const Scenario& sc_;
  contracts::Simulator sim_;
  protocol::Orchestrator orch_;
  ScenarioOutcome out_;

  protocol::TenderingOrganisation to_;
  protocol::OpenedTender tender_;
  std::map<std::string, protocol::Bidder> bidders_;
  std::map<std::string, protocol::SubmittedBid> submitted_;
  std::set<std::string> revealed_early_;
  protocol::KeyChannel channel_;
  std::optional<Address> adversary_;
  std::optional<crypto::AsymmetricKeyPair> adversary_keys_;
  std::set<Address> bidder_accounts_;
};

Address Runner::adversary() {
  if (!adversary_) {
    adversary_ = sim_.create_account("adversary");
    adversary_keys_ = crypto::AsymmetricKeyPair::generate(orch_.rng());
  }
  return *adversary_;
}

void Runner::submit_bidder(const ScenarioBidder& b) {
  protocol::BidDocument doc{b.id, b.fields, Bytes(b.text.begin(), b.text.end())};
  try {
    submitted_[b.id] = orch_.submit_sealed_bid(bidders_.at(b.id), tender_.rft, doc);
  } catch (const ProtocolError& e) {
    out_.notes.push_back("bid by " + b.id + " failed: " + std::string(to_string(e.code())));
    return;
  }
  if (sim_.now() <= sim_.read_as<RftState>(tender_.rft).bidding_end) probe_sealed(b.id);
}

void Runner::probe_sealed(const std::string& id) {
  ++out_.sealed_probes;
  try {
    orch_.try_open_bid(to_, submitted_.at(id).bid);
  } catch (const ProtocolError& e) {
    if (e.code() == ErrorCode::kDecryptionFailed) ++out_.sealed_probes_failed;
  }
}

void Runner::spam(const AdversaryAction& a) {
  const auto attacker = adversary();
  for (std::size_t i = 0; i < a.count; ++i) {
    const std::string id = "spam-" + std::to_string(i);
    const auto cert = crypto::issue_certificate(adversary_keys_->private_key, id, tender_.rft, orch_.rng());
    contracts::PlaceBid call;
    call.id = id;
    call.msg_hash = Bytes(cert.msg_hash.bytes.begin(), cert.msg_hash.bytes.end());
    call.v = cert.v;
    call.r = cert.r;
    call.s = cert.s;
    call.sealed_half_a = orch_.rng().generate(16);
    sim_.submit(attacker, tender_.rft, call);
  }
  sim_.commit();
  out_.notes.push_back(std::to_string(a.count) + " placements with invalid certificates submitted");
}

void Runner::forge(const AdversaryAction& a) {
  protocol::Bidder impostor{a.bidder, adversary(), {}};
  const auto cert = crypto::issue_certificate(adversary_keys_->private_key, a.bidder, tender_.rft, orch_.rng());
  const auto* victim = sc_.find_bidder(a.bidder);
  protocol::BidDocument doc{a.bidder, victim->fields, {}};
  for (auto& [name, value] : doc.fields) value = value * 0.5;
  try {
    const auto placed = orch_.submit_sealed_bid(impostor, tender_.rft, doc, cert);
    const bool valid = sim_.read_as<contracts::BidRecord>(placed.bid).validity;
    out_.notes.push_back("forged bid as " + a.bidder + " recorded with validity=" + (valid ? "true" : "false"));
  } catch (const ProtocolError& e) {
    out_.notes.push_back("forged bid as " + a.bidder + " rejected: " + std::string(to_string(e.code())));
  }
}

void Runner::mutate(const AdversaryAction& a) {
  const Address target = a.field == contracts::TenderField::kData ? tender_.data : tender_.rft;
  const auto id = sim_.submit(to_.account, target, contracts::MutateTender{a.field, orch_.rng().generate(8)});
  sim_.commit();
  const auto& tx = sim_.receipt(id);
  out_.notes.push_back("mutation of " + std::string(contracts::to_string(a.field)) + " " +
                       (tx.status == chain::TxStatus::kSuccess ? std::string("accepted")
                                                               : "rejected: " + std::string(to_string(*tx.error))));
}

void Runner::reveal_early(const std::string& id) {
  auto it = submitted_.find(id);
  if (it == submitted_.end()) return;
  channel_.send({id, it->second.bid, it->second.withheld_half, sim_.now()});
  channel_.deliver();
  revealed_early_.insert(id);
  try {
    orch_.try_open_bid(to_, it->second.bid, it->second.withheld_half);
    out_.notes.push_back("TO opened the bid of " + id + " before biddingEnd after an early hand-over");
  } catch (const ProtocolError& e) {
    out_.notes.push_back("early hand-over by " + id + " did not open: " + std::string(to_string(e.code())));
  }
}

void Runner::collect_gas_rows() {
  const auto& subs = sim_.submissions();
  std::size_t k = 0;
  for (const auto& block : out_.exported.blocks) {
    for (const auto& tx : block.transactions) {
      GasRow row;
      row.tx_index = k;
      row.height = block.height;
      row.role = tx.sender == to_.account        ? Role::kOrganisation
                 : bidder_accounts_.contains(tx.sender) ? Role::kBidder
                                                        : Role::kAdversary;
      row.call = describe_call(tx.payload);
      row.kind = tx.kind;
      row.status = tx.status;
      row.gas_used = tx.gas_used;
      row.simulated_delay_ms = k < subs.size() ? block.timestamp - subs[k].submitted_at : 0;
      out_.gas_rows.push_back(std::move(row));
      ++k;
    }
  }
}

void Runner::check_expectations() {
  const auto& e = sc_.expect;
  const auto& r = out_.report;
  auto& fails = out_.expectation_failures;
  if (e.winner_match && *e.winner_match != r.winner_match) {
    fails.push_back(std::string("winner_match expected ") + (*e.winner_match ? "true" : "false"));
  }
  if (e.winner && *e.winner != r.published_winner_id) {
    fails.push_back("winner expected '" + *e.winner + "', published '" + r.published_winner_id + "'");
  }
  if (e.violations) {
    std::set<audit::ViolationTag> want(e.violations->begin(), e.violations->end());
    std::set<audit::ViolationTag> got;
    for (const auto& v : r.violations) got.insert(v.tag);
    if (want != got) {
      std::string g;
      for (auto t : got) g += std::string(g.empty() ? "" : ",") + std::string(audit::to_string(t));
      fails.push_back("violation tags differ from expectation; audit reported [" + g + "]");
    }
  }
  for (const auto& [name, verdict] : e.requirements) {
    auto it = r.requirements.find(name);
    if (it == r.requirements.end() || it->second.verdict != verdict) {
      fails.push_back(name + " expected " + std::string(audit::to_string(verdict)) + ", got " +
                      (it == r.requirements.end() ? std::string("nothing") : std::string(audit::to_string(it->second.verdict))));
    }
  }
}

ScenarioOutcome Runner::run() {
  to_ = orch_.create_organisation("TO");
  tender_ = orch_.open_tender(to_, sc_.tender);
  out_.rft = tender_.rft;
  const EpochMs t0 = sim_.now();
  const EpochMs bidding_end = sim_.read_as<RftState>(tender_.rft).bidding_end;

  for (const auto& b : sc_.bidders) {
    auto bidder = orch_.create_bidder(b.id);
    orch_.register_bidder(to_, bidder, tender_.rft);
    bidder_accounts_.insert(bidder.account);
    bidders_.emplace(b.id, std::move(bidder));
  }

  std::vector<Event> events;
  int order = 0;
  std::set<std::string> late;
  for (const auto& a : sc_.adversary) {
    if (a.kind == ActionKind::kLateBid) late.insert(a.bidder);
  }
  for (const auto& b : sc_.bidders) {
    const EpochMs at = late.contains(b.id) ? bidding_end - t0 + 1 : b.submit_at_ms;
    events.push_back({at, order++, [this, &b] { submit_bidder(b); }});
    for (const auto& a : sc_.adversary) {
      if (a.kind == ActionKind::kEarlyKeyReveal && a.bidder == b.id) {
        events.push_back({at, order++, [this, &b] { reveal_early(b.id); }});
      }
    }
  }
  for (const auto& a : sc_.adversary) {
    switch (a.kind) {
      case ActionKind::kSpamInvalidCerts: events.push_back({a.at_ms, order++, [this, &a] { spam(a); }}); break;
      case ActionKind::kForgeCert: events.push_back({a.at_ms, order++, [this, &a] { forge(a); }}); break;
      case ActionKind::kMutateTender: events.push_back({a.at_ms, order++, [this, &a] { mutate(a); }}); break;
      default: break;
    }
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const Event& x, const Event& y) { return x.at != y.at ? x.at < y.at : x.order < y.order; });
  for (const auto& ev : events) {
    if (t0 + ev.at > sim_.now()) sim_.chain().clock().advance_to(t0 + ev.at);
    ev.run();
  }

  // Close: move past biddingEnd, then bidders hand over their withheld halves.
  if (sim_.now() <= bidding_end) sim_.chain().clock().advance_to(bidding_end + 1);
  sim_.commit();
  for (const auto& b : sc_.bidders) {
    auto it = submitted_.find(b.id);
    if (it == submitted_.end() || revealed_early_.contains(b.id)) continue;
    channel_.send({b.id, it->second.bid, it->second.withheld_half, sim_.now()});
  }
  channel_.deliver();
  for (const auto& [id, placed] : submitted_) {
    ++out_.opened_probes;
    try {
      orch_.try_open_bid(to_, placed.bid, placed.withheld_half);
      ++out_.opened_probes_succeeded;
    } catch (const ProtocolError&) {
    }
  }

  auto result = orch_.close_and_evaluate(to_, tender_.rft, channel_.delivered_halves());
  for (const auto& a : sc_.adversary) {
    if (a.kind != ActionKind::kRigWinner) continue;
    auto it = submitted_.find(a.bidder);
    if (it == submitted_.end()) throw ScenarioError(sc_.source, a.line, "RIG_WINNER bidder never placed a bid");
    result.published.winner_bid = it->second.bid;
    result.published.winner_id = a.bidder;
    out_.notes.push_back("TO publishes " + a.bidder + " as winner regardless of scores");
  }
  orch_.publish_results(to_, tender_.rft, result);

  out_.exported = sim_.export_chain();
  for (const auto& a : sc_.adversary) {
    if (a.kind != ActionKind::kEraseBid) continue;
    auto& rft = std::get<RftState>(out_.exported.state.at(tender_.rft));
    if (!rft.bids_placed || a.index >= rft.bids_placed->size()) {
      throw ScenarioError(sc_.source, a.line, "ERASE_BID index is out of range");
    }
    out_.notes.push_back("disclosed bidsPlaced drops entry " + std::to_string(a.index));
    rft.bids_placed->erase(rft.bids_placed->begin() + static_cast<std::ptrdiff_t>(a.index));
  }

  collect_gas_rows();
  out_.report = audit::replay_and_audit(out_.exported, tender_.rft);
  check_expectations();
  return std::move(out_);
}

std::string list_gas(const std::vector<Gas>& gas) {
  std::string out;
  for (auto g : gas) out += (out.empty() ? "" : " ") + std::to_string(g);
  return out.empty() ? "-" : out;
}

}  // namespace

ScenarioOutcome run_scenario(const Scenario& scenario, std::optional<std::uint64_t> seed) {
  return Runner(scenario, seed.value_or(scenario.seed)).run();
}

std::string gas_csv(const ScenarioOutcome& outcome) {
  std::ostringstream out;
  out << "tx_index,height,role,call,kind,status,gas_used,simulated_inclusion_delay_ms\n";
  for (const auto& r : outcome.gas_rows) {
    out << r.tx_index << ',' << r.height << ',' << to_string(r.role) << ',' << r.call << ','
        << chain::to_string(r.kind) << ',' << chain::to_string(r.status) << ',' << r.gas_used << ','
        << r.simulated_delay_ms << '\n';
  }
  return out.str();
}

std::string summary_text(const ScenarioOutcome& o) {
  std::ostringstream out;
  const auto bids = o.bidder_bid_gas();
  Gas total = 0;
  for (const auto& r : o.gas_rows) total += r.gas_used;
  out << "scenario " << o.scenario.name << "\n";
  out << "scheme " << contracts::to_string(o.scenario.tender.scheme) << "\n";
  out << "seed " << o.seed << "\n";
  out << "tender " << o.rft.hex() << "\n";
  out << "blocks " << o.exported.blocks.size() << "\n";
  out << "transactions " << o.gas_rows.size() << "\n";
  out << "total_gas " << total << "\n";
  out << "deployment_gas " << o.deployment_gas() << "\n";
  out << "bid_gas " << list_gas(bids) << "\n";
  out << "bid_gas_slope " << contracts::format_real(gas_slope(bids)) << "\n";
  EpochMs max_delay = 0;
  for (const auto& r : o.gas_rows) max_delay = std::max(max_delay, r.simulated_delay_ms);
  out << "max_inclusion_delay_ms " << max_delay << " (SIMULATED)\n";
  out << "sealed_probes " << o.sealed_probes_failed << "/" << o.sealed_probes << " failed before hand-over\n";
  out << "opened_probes " << o.opened_probes_succeeded << "/" << o.opened_probes << " succeeded after hand-over\n";
  for (const auto& n : o.notes) out << "note " << n << "\n";
  out << o.report.summary_line() << "\n";
  if (o.passed()) {
    out << "expectations met\n";
  } else {
    for (const auto& f : o.expectation_failures) out << "expectation failed: " << f << "\n";
  }
  return out.str();
}

void write_reports(const ScenarioOutcome& outcome, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const char* name, const std::string& text) {
    std::ofstream f(dir / name, std::ios::binary);
    f << text;
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
  };
  for (auto kind : outcome.scenario.reports) {
    switch (kind) {
      case ReportKind::kGas: write("gas.csv", gas_csv(outcome)); break;
      case ReportKind::kAudit: write("audit.txt", outcome.report.to_text()); break;
      case ReportKind::kSummary: write("summary.txt", summary_text(outcome)); break;
      case ReportKind::kChain: write("chain.json", contracts::to_canonical_text(outcome.exported)); break;
    }
  }
}

std::string compare_schemes(const std::vector<ScenarioOutcome>& outcomes) {
  if (outcomes.size() < 2) {
    throw ProtocolError(ErrorCode::kIncomparableScenarios, "compare needs at least two scenarios");
  }
  auto comparable = [](protocol::TenderSpec t) {
    t.scheme = contracts::Scheme::kFullTrack;
    return t;
  };
  const auto base = comparable(outcomes.front().scenario.tender);
  for (const auto& o : outcomes) {
    if (!(comparable(o.scenario.tender) == base)) {
      throw ProtocolError(ErrorCode::kIncomparableScenarios,
                          "tender of '" + o.scenario.name + "' differs from '" + outcomes.front().scenario.name + "'");
    }
  }
  std::vector<std::vector<std::string>> rows;
  auto row = [&](std::string label, auto cell) {
    std::vector<std::string> r{std::move(label)};
    for (const auto& o : outcomes) r.push_back(cell(o));
    rows.push_back(std::move(r));
  };
  row("scenario", [](const ScenarioOutcome& o) { return o.scenario.name; });
  row("scheme", [](const ScenarioOutcome& o) { return std::string(contracts::to_string(o.scenario.tender.scheme)); });
  row("deployment_gas", [](const ScenarioOutcome& o) { return std::to_string(o.deployment_gas()); });
  row("first_bid_gas", [](const ScenarioOutcome& o) {
    const auto g = o.bidder_bid_gas();
    return g.empty() ? std::string("-") : std::to_string(g.front());
  });
  row("bid_gas_slope", [](const ScenarioOutcome& o) { return contracts::format_real(gas_slope(o.bidder_bid_gas())); });
  for (const char* r : {"R1", "R2", "R3", "R4", "R5", "R6"}) {
    row(r, [r](const ScenarioOutcome& o) {
      auto it = o.report.requirements.find(r);
      return it == o.report.requirements.end() ? std::string("-") : std::string(audit::to_string(it->second.verdict));
    });
  }
  std::vector<std::size_t> width(rows.front().size(), 0);
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  std::ostringstream out;
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i + 1 < r.size()) {
        out << std::left << std::setw(static_cast<int>(width[i])) << r[i] << "  ";
      } else {
        out << r[i] << "\n";
      }
    }
  }
  return out.str();
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sealed-bid tender simulator and auditor"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "Run a scenario and write reports");
  run->add_option("scenario", scenario_path, "Scenario file")->required();
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--seed", seed, "Override the scenario seed");

  std::vector<std::string> compare_paths;
  auto* compare = app.add_subcommand("compare", "Compare schemes across scenarios");
  compare->add_option("scenarios", compare_paths, "Scenario files")->required();

  std::string export_path;
  auto* audit_cmd = app.add_subcommand("audit", "Audit an exported chain");
  audit_cmd->add_option("chain_export", export_path, "Chain export (chain.json)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*run) {
      const auto sc = load_scenario(scenario_path);
      const auto outcome = run_scenario(sc, seed);
      write_reports(outcome, out_dir);
      out << outcome.report.summary_line() << "\n";
      for (const auto& f : outcome.expectation_failures) err << "expectation failed: " << f << "\n";
      return outcome.passed() ? 0 : 1;
    }
    if (*compare) {
      std::vector<ScenarioOutcome> outcomes;
      for (const auto& p : compare_paths) outcomes.push_back(run_scenario(load_scenario(p)));
      out << compare_schemes(outcomes);
      return 0;
    }
    std::ifstream in(export_path, std::ios::binary);
    if (!in) {
      err << export_path << ": cannot open\n";
      return 2;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    const auto exported = contracts::parse_chain_export(buf.str());
    const auto tenders = audit::find_tenders(exported);
    if (tenders.empty()) {
      err << export_path << ": no tender contracts found\n";
      return 2;
    }
    bool clean = true;
    for (const auto& t : tenders) {
      const auto report = audit::replay_and_audit(exported, t);
      out << report.to_text() << report.summary_line() << "\n";
      clean = clean && report.clean();
    }
    return clean ? 0 : 1;
  } catch (const ScenarioError& e) {
    err << e.what() << "\n";
    return 2;
  } catch (const ProtocolError& e) {
    err << "error " << to_string(e.code()) << ": " << e.what() << "\n";
    return 2;
  }
}

}  // namespace tender::cli
