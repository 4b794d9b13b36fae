// Copyright 2026 The seqpaxos Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "seqpaxos/checker.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

namespace seqpaxos {
namespace {

std::uint64_t num(std::string_view s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw TraceParseError("bad number '" + std::string(s) + "'");
  }
  return v;
}

std::uint64_t field_num(std::string_view payload, std::string_view key) {
  auto v = payload_field(payload, key);
  if (!v) throw TraceParseError("missing " + std::string(key) + " in '" + std::string(payload) + "'");
  return num(*v);
}

Round field_round(std::string_view payload, std::string_view key) {
  auto v = payload_field(payload, key);
  if (!v) throw TraceParseError("missing " + std::string(key) + " in '" + std::string(payload) + "'");
  return parse_round(*v);
}

ConfigId config_of(const TraceRecord& r) {
  auto c = payload_config(r.payload);
  if (!c) throw TraceParseError("record without configuration: " + render(r));
  return *c;
}

/// Value of a space-separated `key=` token; unlike payload_field it keeps
/// commas, so lists such as members=p1,p2,p3 come back whole.
std::optional<std::string> word_field(std::string_view payload, std::string_view key) {
  std::size_t pos = 0;
  while (pos < payload.size()) {
    auto end = payload.find(' ', pos);
    auto tok = payload.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    if (tok.substr(0, key.size()) == key) return std::string(tok.substr(key.size()));
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return std::nullopt;
}

/// "c0 g=5 <entry>" -> (5, "<entry>")
std::pair<std::uint64_t, std::string> decided_entry(const TraceRecord& r) {
  auto rest = payload_rest(r.payload);
  if (rest.substr(0, 2) != "g=") throw TraceParseError("decide without index: " + render(r));
  auto sp = rest.find(' ');
  if (sp == std::string_view::npos) throw TraceParseError("decide without entry: " + render(r));
  return {num(rest.substr(2, sp - 2)), std::string(rest.substr(sp + 1))};
}

bool is_stop_rendering(std::string_view e) { return e.substr(0, 2) == "SS"; }

struct Disk {
  Round n_prom;
  Round n_a;
  std::uint64_t len = 0;
  std::uint64_t l_d = 0;
};

using Key = std::pair<std::string, ConfigId>;

class SafetyRun {
 public:
  SafetyRun(const Trace& trace, bool dedup) : trace_(trace), dedup_(dedup) {}

  Verdict run() {
    for (std::size_t i = 0; i < trace_.records.size(); ++i) {
      index_ = i;
      const auto& r = trace_.records[i];
      try {
        step(r);
      } catch (const TraceParseError& e) {
        fail("trace", std::string("malformed record: ") + e.what());
      }
    }
    return std::move(verdict_);
  }

 private:
  void fail(const char* prop, std::string detail) {
    verdict_.violations.push_back(Violation{prop, index_, std::move(detail)});
  }

  void step(const TraceRecord& r) {
    const auto& k = r.kind;
    if (k == "propose") {
      proposed_.insert(std::string(payload_rest(r.payload)));
    } else if (k == "persist") {
      on_persist(r);
    } else if (k == "send") {
      on_send(r);
    } else if (k == "recv") {
      on_recv(r);
    } else if (k == "decide") {
      on_decide(r);
    } else if (k == "init") {
      on_init(r);
    } else if (k == "restore") {
      on_restore(r);
    } else if (k == "leader") {
      on_leader(r);
    } else if (k == "crash") {
      ++incarnation_[r.from];
    } else if (k == "error") {
      fail(property::kError, r.from + ": " + r.payload);
    }
  }

  void on_persist(const TraceRecord& r) {
    Key key{r.from, config_of(r)};
    auto rec = payload_rest(r.payload);
    auto& d = disks_[key];
    auto head = rec.substr(0, rec.find('{'));
    if (head == "init") {
      d.n_prom = field_round(rec, "nprom=");
      d.n_a = field_round(rec, "na=");
      d.len = field_num(rec, "len=");
      d.l_d = field_num(rec, "ld=");
    } else if (head == "promise") {
      auto n = field_round(rec, "n=");
      if (n < d.n_prom) {
        fail(property::kPersist, r.from + " persisted n_prom " + to_string(n) + " below " +
                                     to_string(d.n_prom));
      }
      d.n_prom = n;
    } else if (head == "accept") {
      d.n_a = field_round(rec, "na=");
      d.len = field_num(rec, "len=");
    } else if (head == "append") {
      ++d.len;
    } else if (head == "decide") {
      auto ld = field_num(rec, "ld=");
      if (ld < d.l_d) {
        fail(property::kSC3, r.from + " persisted l_d " + std::to_string(ld) + " below " +
                                 std::to_string(d.l_d));
      }
      d.l_d = ld;
    }
  }

  void on_recv(const TraceRecord& r) {
    if (payload_head(r.payload) != "Prepare") return;
    auto c = config_of(r);
    auto body = payload_rest(r.payload);
    prepares_[{r.to, r.from, c}] = {field_round(body, "n="), field_round(body, "na=")};
  }

  /// A follower whose accepted round is below the leader's holds nothing the
  /// leader lacks, so its Promise must not ship a suffix.
  void check_stale_suffix(const TraceRecord& r, ConfigId c, std::string_view body) {
    auto it = prepares_.find({r.from, r.to, c});
    if (it == prepares_.end()) return;
    auto [n, na_leader] = it->second;
    auto na = field_round(body, "na=");
    auto suffix = payload_field(body, "suffix=");
    if (field_round(body, "n=") == n && na < na_leader && suffix && *suffix != "[]") {
      fail(property::kStale, r.from + " shipped a suffix accepted in " + to_string(na) +
                                 " to a leader that accepted in " + to_string(na_leader));
    }
  }

  void on_send(const TraceRecord& r) {
    auto c = config_of(r);
    auto head = payload_head(r.payload);
    if (head != "Promise" && head != "Accepted") return;
    auto body = payload_rest(r.payload);
    if (head == "Promise") check_stale_suffix(r, c, body);
    auto it = disks_.find(Key{r.from, c});
    if (it == disks_.end()) {
      fail(property::kPersist, r.from + " sent " + std::string(head) + " with nothing persisted");
      return;
    }
    const auto& d = it->second;
    auto n = field_round(body, "n=");
    if (head == "Promise") {
      if (d.n_prom != n) {
        fail(property::kPersist, r.from + " promised " + to_string(n) + " but persisted n_prom is " +
                                     to_string(d.n_prom));
      }
    } else {
      auto la = field_num(body, "la=");
      if (d.n_a != n || d.len < la) {
        fail(property::kPersist, r.from + " acknowledged la=" + std::to_string(la) + " in " +
                                     to_string(n) + " but persisted n_a=" + to_string(d.n_a) +
                                     " len=" + std::to_string(d.len));
      }
    }
  }

  void on_decide(const TraceRecord& r) {
    auto c = config_of(r);
    auto [g, entry] = decided_entry(r);
    Key key{r.from, c};

    if (!proposed_.count(entry)) fail(property::kSC1, entry + " decided but never proposed");

    auto it = agreed_.find(g);
    if (it == agreed_.end()) {
      if (dedup_ && !is_stop_rendering(entry) && !seen_.insert(entry).second) {
        fail(property::kDedup, entry + " decided twice (again at g=" + std::to_string(g) + ")");
      }
      agreed_.emplace(g, entry);
    } else if (it->second != entry) {
      fail(property::kSC2, r.from + " decided " + entry + " at g=" + std::to_string(g) +
                               " where " + it->second + " was decided");
    }

    auto nit = next_.find(key);
    if (nit == next_.end()) {
      fail(property::kSC3, r.from + " decided in " + key_name(key) + " before it started");
    } else if (g != nit->second) {
      fail(property::kSC3, r.from + " decided g=" + std::to_string(g) + " but expected g=" +
                               std::to_string(nit->second));
    }
    next_[key] = g + 1;

    auto dit = disks_.find(key);
    if (dit == disks_.end() || dit->second.l_d < g + 1) {
      fail(property::kPersist, r.from + " delivered g=" + std::to_string(g) +
                                   " before persisting l_d > " + std::to_string(g));
    }

    auto sit = stops_.find(c);
    if (sit != stops_.end() && g > sit->second) {
      fail(property::kFinality, r.from + " decided g=" + std::to_string(g) + " in " +
                                    key_name(key) + " after the stop-sign at g=" +
                                    std::to_string(sit->second));
    }
    if (is_stop_rendering(entry)) {
      auto [pos, inserted] = stops_.emplace(c, g);
      if (!inserted && pos->second != g) {
        fail(property::kFinality, "c" + std::to_string(c) + " stopped at g=" +
                                      std::to_string(pos->second) + " and at g=" + std::to_string(g));
      }
    }
  }

  void on_init(const TraceRecord& r) {
    auto c = config_of(r);
    auto sigma = field_num(r.payload, "sigma=");
    next_[Key{r.from, c}] = sigma;
    if (c == 0) {
      if (sigma != 0) fail(property::kContinuity, "c0 must start from the empty sequence");
      return;
    }
    auto sit = stops_.find(c - 1);
    if (sit == stops_.end()) {
      fail(property::kContinuity, r.from + " started c" + std::to_string(c) +
                                      " before any stop-sign of c" + std::to_string(c - 1) +
                                      " was decided");
    } else if (sit->second + 1 != sigma) {
      fail(property::kContinuity, r.from + " started c" + std::to_string(c) + " with sigma=" +
                                      std::to_string(sigma) + " but c" + std::to_string(c - 1) +
                                      " stopped at g=" + std::to_string(sit->second));
    }
  }

  void on_restore(const TraceRecord& r) {
    Key key{r.from, config_of(r)};
    auto ld = field_num(r.payload, "ld=");
    auto it = next_.find(key);
    if (it != next_.end() && ld < it->second) {
      fail(property::kSC3, r.from + " recovered " + key_name(key) + " with l_d=" +
                               std::to_string(ld) + " after deciding " + std::to_string(it->second));
    }
    next_[key] = ld;
  }

  void on_leader(const TraceRecord& r) {
    auto c = config_of(r);
    auto b = field_num(r.payload, "b=");
    auto leader = parse_process(r.to);
    if (!leader || ballot_owner(Ballot{b}) != *leader) {
      fail(property::kBle, r.from + " elected " + r.to + " with ballot " + std::to_string(b) +
                               " owned by " + to_string(ballot_owner(Ballot{b})));
    }
    auto key = std::make_tuple(r.from, c, incarnation_[r.from]);
    auto it = last_ballot_.find(key);
    if (it != last_ballot_.end() && b <= it->second) {
      fail(property::kBle, r.from + " leader ballot " + std::to_string(b) +
                               " does not exceed previous " + std::to_string(it->second));
    }
    last_ballot_[key] = b;
  }

  static std::string key_name(const Key& k) {
    return k.first + "/c" + std::to_string(k.second);
  }

  // (receiver, sender, config) -> (n, na) of the latest Prepare received
  std::map<std::tuple<std::string, std::string, ConfigId>, std::pair<Round, Round>> prepares_;
  const Trace& trace_;
  bool dedup_;
  std::size_t index_ = 0;
  Verdict verdict_;
  std::unordered_set<std::string> proposed_;
  std::unordered_set<std::string> seen_;
  std::map<std::uint64_t, std::string> agreed_;
  std::map<Key, std::uint64_t> next_;
  std::map<Key, Disk> disks_;
  std::map<ConfigId, std::uint64_t> stops_;
  std::map<std::string, std::uint64_t> incarnation_;
  std::map<std::tuple<std::string, ConfigId, std::uint64_t>, std::uint64_t> last_ballot_;
};

}  // namespace

const char* to_string(LivenessStatus s) {
  switch (s) {
    case LivenessStatus::pass: return "pass";
    case LivenessStatus::fail: return "fail";
    case LivenessStatus::not_applicable: return "not-applicable";
  }
  return "?";
}

Verdict check_safety(const Trace& trace, const SafetyOptions& options) {
  bool dedup = false;
  if (options.dedup) {
    dedup = *options.dedup;
  } else {
    auto append = trace.header_value("append");
    auto snap = trace.header_value("snapshot_every");
    dedup = append && *append == "dedup" && (!snap || *snap == "0");
  }
  return SafetyRun(trace, dedup).run();
}

LivenessVerdict check_liveness(const Trace& trace, std::optional<Time> stable_from) {
  LivenessVerdict v;
  if (!stable_from) {
    if (auto h = trace.header_value("stable_from")) stable_from = std::stoull(*h);
  }
  if (!stable_from) {
    v.reason = "no stable_from given";
    return v;
  }
  std::set<std::string> down;
  bool partitioned = false;
  std::map<std::uint64_t, std::string> agreed;
  std::unordered_map<std::string, std::uint64_t> first_index;
  std::map<std::string, std::uint64_t> reach;
  std::map<ConfigId, std::vector<ProcessId>> members;
  std::set<std::string> tail_commands;
  for (const auto& r : trace.records) {
    const auto& k = r.kind;
    bool fault = k == "crash" || k == "recover" || k == "session_drop" || k == "partition" ||
                 k == "heal" || k == "error";
    if (fault && r.t >= *stable_from) {
      v.reason = k + " at t=" + std::to_string(r.t) + " inside the stable tail";
      return v;
    }
    if (k == "crash") down.insert(r.from);
    if (k == "recover") down.erase(r.from);
    if (k == "partition") partitioned = true;
    if (k == "heal") partitioned = false;
    if (k == "init") {
      auto c = config_of(r);
      if (auto m = word_field(r.payload, "members=")) members[c] = parse_process_list(*m);
      auto sigma = field_num(r.payload, "sigma=");
      reach[r.from] = std::max(reach[r.from], sigma);
    }
    if (k == "decide") {
      auto [g, entry] = decided_entry(r);
      agreed.emplace(g, entry);
      auto [it, inserted] = first_index.emplace(entry, g);
      if (!inserted) it->second = std::min(it->second, g);
      reach[r.from] = std::max(reach[r.from], g + 1);
    }
    if (k == "propose" && r.from.size() > 1 && r.from[0] == 'k' && r.t >= *stable_from) {
      tail_commands.insert(std::string(payload_rest(r.payload)));
    }
  }
  if (partitioned) {
    v.reason = "partition never healed";
    return v;
  }
  if (members.empty()) {
    v.reason = "no configuration started";
    return v;
  }
  const auto& [config, group] = *members.rbegin();
  std::vector<std::string> live;
  for (auto p : group) {
    if (!down.count(to_string(p))) live.push_back(to_string(p));
  }
  if (live.size() < majority(group.size())) {
    v.reason = "no live majority of c" + std::to_string(config);
    return v;
  }
  v.status = LivenessStatus::pass;
  v.checked_commands = tail_commands.size();
  for (const auto& cmd : tail_commands) {
    auto it = first_index.find(cmd);
    for (const auto& p : live) {
      if (it == first_index.end() || it->second >= reach[p]) {
        v.violations.push_back(Violation{property::kSC4, trace.records.size() - 1,
                                         cmd + " retried in the stable tail but not decided at " + p});
      }
    }
  }
  if (!v.violations.empty()) v.status = LivenessStatus::fail;
  return v;
}

CheckReport check_trace(const Trace& trace) {
  CheckReport report;
  report.safety = check_safety(trace);
  try {
    report.liveness = check_liveness(trace);
  } catch (const TraceParseError& e) {
    report.liveness.status = LivenessStatus::fail;
    report.liveness.violations.push_back(Violation{"trace", 0, e.what()});
  }
  return report;
}

std::string render_report(const Trace& trace, const CheckReport& report) {
  std::ostringstream out;
  out << "safety: " << (report.safety.pass() ? "pass" : "FAIL") << "\n";
  out << "liveness: " << to_string(report.liveness.status);
  if (report.liveness.status == LivenessStatus::not_applicable) {
    out << " (" << report.liveness.reason << ")";
  } else {
    out << " (" << report.liveness.checked_commands << " tail commands)";
  }
  out << "\n";
  auto show = [&](const Violation& v) {
    out << "\nviolation " << v.property << " at record " << v.record << ": " << v.detail << "\n";
    if (trace.records.empty()) return;
    std::size_t lo = v.record >= 3 ? v.record - 3 : 0;
    std::size_t hi = std::min(trace.records.size(), v.record + 2);
    for (std::size_t i = lo; i < hi; ++i) {
      out << (i == v.record ? "> " : "  ") << render(trace.records[i]) << "\n";
    }
  };
  std::size_t shown = 0;
  for (const auto& v : report.safety.violations) {
    if (shown++ == 20) {
      out << "\n... " << report.safety.violations.size() - 20 << " more\n";
      break;
    }
    show(v);
  }
  for (const auto& v : report.liveness.violations) show(v);
  return out.str();
}

}  // namespace seqpaxos
