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

#include "seqpaxos/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "seqpaxos/trace.hpp"

namespace seqpaxos {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> words(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    s = trim(s);
    if (s.empty()) break;
    auto sp = s.find_first_of(" \t");
    out.push_back(s.substr(0, sp));
    if (sp == std::string_view::npos) break;
    s.remove_prefix(sp);
  }
  return out;
}

std::uint64_t number(std::string_view s, std::size_t line, std::string_view what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ScenarioError(line, "expected a number for " + std::string(what) + ", got '" +
                                  std::string(s) + "'");
  }
  return v;
}

double fraction(std::string_view s, std::size_t line, std::string_view what) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || v < 0 || v > 1) {
    throw ScenarioError(line, std::string(what) + " must be in [0, 1], got '" + std::string(s) +
                                  "'");
  }
  return v;
}

bool boolean(std::string_view s, std::size_t line, std::string_view what) {
  if (s == "true" || s == "on" || s == "1") return true;
  if (s == "false" || s == "off" || s == "0") return false;
  throw ScenarioError(line, std::string(what) + " must be true or false");
}

ProcessId process(std::string_view s, std::size_t line) {
  auto p = parse_process(s);
  if (!p) throw ScenarioError(line, "expected a process like p1, got '" + std::string(s) + "'");
  return *p;
}

std::vector<ProcessId> process_list(std::string_view s, std::size_t line) {
  std::vector<ProcessId> out;
  while (!s.empty()) {
    auto comma = s.find(',');
    out.push_back(process(trim(s.substr(0, comma)), line));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  if (out.empty()) throw ScenarioError(line, "empty process list");
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) {
    throw ScenarioError(line, "duplicate process in list");
  }
  return out;
}

Mutation mutation_from(std::string_view s, std::size_t line) {
  for (auto m : {Mutation::none, Mutation::skip_promise_persist, Mutation::accept_lower_round,
                 Mutation::skip_stale_guard, Mutation::extend_past_stop}) {
    if (s == to_string(m)) return m;
  }
  throw ScenarioError(line, "unknown mutation '" + std::string(s) + "'");
}

void need_args(const std::vector<std::string_view>& w, std::size_t n, std::size_t line,
               std::string_view usage) {
  if (w.size() != n) throw ScenarioError(line, "usage: " + std::string(usage));
}

Directive parse_directive(std::string_view text, std::size_t line) {
  Directive d;
  d.line = line;
  auto w = words(text);
  if (w.empty() || w[0].size() < 2 || w[0][0] != '@') {
    throw ScenarioError(line, "directive must start with @<time>");
  }
  d.at = number(w[0].substr(1), line, "time");
  if (w.size() < 2) throw ScenarioError(line, "missing directive");
  auto verb = w[1];
  if (verb == "crash") {
    need_args(w, 3, line, "crash pN|leader");
    d.kind = DirectiveKind::crash;
    if (w[2] == "leader") {
      d.target_leader = true;
    } else {
      d.procs = {process(w[2], line)};
    }
  } else if (verb == "recover") {
    need_args(w, 3, line, "recover pN|all");
    d.kind = DirectiveKind::recover;
    if (w[2] == "all") {
      d.target_all = true;
    } else {
      d.procs = {process(w[2], line)};
    }
  } else if (verb == "drop") {
    need_args(w, 4, line, "drop pA pB");
    d.kind = DirectiveKind::drop;
    d.procs = {process(w[2], line), process(w[3], line)};
    if (d.procs[0] == d.procs[1]) throw ScenarioError(line, "drop needs two distinct processes");
  } else if (verb == "partition") {
    d.kind = DirectiveKind::partition;
    auto pos = text.find("partition");
    auto rest = text.substr(pos + 9);
    std::set<ProcessId> seen;
    while (true) {
      auto bar = rest.find('|');
      std::string joined;
      for (auto tok : words(rest.substr(0, bar))) joined += tok;
      auto group = process_list(joined, line);
      for (auto p : group) {
        if (!seen.insert(p).second) throw ScenarioError(line, "process in two partition groups");
      }
      d.groups.push_back(std::move(group));
      if (bar == std::string_view::npos) break;
      rest.remove_prefix(bar + 1);
    }
    if (d.groups.size() < 2) throw ScenarioError(line, "partition needs at least two groups");
  } else if (verb == "heal") {
    need_args(w, 2, line, "heal");
    d.kind = DirectiveKind::heal;
  } else if (verb == "propose") {
    d.kind = DirectiveKind::propose;
    if (w.size() < 5) throw ScenarioError(line, "usage: propose kC put <key> <value> | get <key>");
    if (w[2].size() < 2 || w[2][0] != 'k') throw ScenarioError(line, "client must look like k1");
    d.client = number(w[2].substr(1), line, "client");
    if (d.client == 0) throw ScenarioError(line, "client ids start at 1");
    if (w[3] == "put") {
      need_args(w, 6, line, "propose kC put <key> <value>");
      d.is_put = true;
      d.value = std::string(w[5]);
    } else if (w[3] == "get") {
      need_args(w, 5, line, "propose kC get <key>");
      d.is_put = false;
    } else {
      throw ScenarioError(line, "propose op must be put or get");
    }
    d.key = std::string(w[4]);
  } else if (verb == "workload") {
    d.kind = DirectiveKind::workload;
    d.clients = 1;
    d.keys = 8;
    for (std::size_t i = 2; i < w.size(); ++i) {
      auto eq = w[i].find('=');
      if (eq == std::string_view::npos) throw ScenarioError(line, "workload takes key=value");
      auto k = w[i].substr(0, eq);
      auto v = number(w[i].substr(eq + 1), line, k);
      if (k == "clients") {
        d.clients = v;
      } else if (k == "commands") {
        d.commands = v;
      } else if (k == "keys") {
        d.keys = v;
      } else {
        throw ScenarioError(line, "unknown workload parameter '" + std::string(k) + "'");
      }
    }
    if (d.clients == 0 || d.keys == 0) throw ScenarioError(line, "clients and keys must be > 0");
  } else if (verb == "burst") {
    need_args(w, 4, line, "burst pN <count>");
    d.kind = DirectiveKind::burst;
    d.procs = {process(w[2], line)};
    d.count = number(w[3], line, "count");
  } else if (verb == "reconfigure") {
    d.kind = DirectiveKind::reconfigure;
    std::string joined;
    for (std::size_t i = 2; i < w.size(); ++i) joined += w[i];
    d.procs = process_list(joined, line);
  } else if (verb == "cleanup") {
    need_args(w, 4, line, "cleanup pN cK");
    d.kind = DirectiveKind::cleanup;
    d.procs = {process(w[2], line)};
    if (w[3].size() < 2 || w[3][0] != 'c') throw ScenarioError(line, "config must look like c0");
    d.config = static_cast<ConfigId>(number(w[3].substr(1), line, "config"));
  } else if (verb == "end") {
    need_args(w, 2, line, "end");
    d.kind = DirectiveKind::end;
  } else {
    throw ScenarioError(line, "unknown directive '" + std::string(verb) + "'");
  }
  return d;
}

void apply_header(Scenario& s, std::string_view key, std::string_view value, std::size_t line,
                  bool& members_set, bool& end_set) {
  if (key == "name") {
    s.name = std::string(value);
  } else if (key == "processes") {
    if (!value.empty() && value[0] == 'p') {
      s.processes = process_list(value, line);
    } else {
      auto n = number(value, line, "processes");
      if (n == 0 || n >= kBallotCap) throw ScenarioError(line, "processes out of range");
      s.processes.clear();
      for (std::uint32_t i = 1; i <= n; ++i) s.processes.push_back(ProcessId{i});
    }
  } else if (key == "members") {
    s.members = process_list(value, line);
    members_set = true;
  } else if (key == "latency") {
    s.latency = number(value, line, key);
    if (s.latency == 0) throw ScenarioError(line, "latency must be positive");
  } else if (key == "jitter") {
    s.jitter = number(value, line, key);
  } else if (key == "delta") {
    s.delta = number(value, line, key);
    if (s.delta == 0) throw ScenarioError(line, "delta must be positive");
  } else if (key == "append") {
    if (value == "dedup") {
      s.append_mode = AppendMode::dedup;
    } else if (value == "duplicates") {
      s.append_mode = AppendMode::duplicates;
    } else {
      throw ScenarioError(line, "append must be dedup or duplicates");
    }
  } else if (key == "snapshot_every") {
    s.snapshot_every = number(value, line, key);
  } else if (key == "storage") {
    if (value == "memory") {
      s.storage = StorageBackend::memory;
    } else if (value == "file") {
      s.storage = StorageBackend::file;
    } else {
      throw ScenarioError(line, "storage must be memory or file");
    }
  } else if (key == "storage_path") {
    s.storage_path = std::string(value);
  } else if (key == "seed") {
    s.seed = number(value, line, key);
  } else if (key == "stable_from") {
    s.stable_from = number(value, line, key);
  } else if (key == "reconnect") {
    s.reconnect = number(value, line, key);
  } else if (key == "retry_rate") {
    s.retry_rate = fraction(value, line, key);
  } else if (key == "client_retry") {
    s.client_retry = number(value, line, key);
    if (s.client_retry == 0) throw ScenarioError(line, "client_retry must be positive");
  } else if (key == "think_time") {
    s.think_time = number(value, line, key);
  } else if (key == "trace_heartbeats") {
    s.trace_heartbeats = boolean(value, line, key);
  } else if (key == "mutation") {
    s.mutation = mutation_from(value, line);
  } else if (key == "end") {
    s.end = number(value, line, key);
    end_set = true;
  } else {
    throw ScenarioError(line, "unknown header '" + std::string(key) + "'");
  }
}

bool member_of(const std::vector<ProcessId>& ps, ProcessId p) {
  return std::find(ps.begin(), ps.end(), p) != ps.end();
}

}  // namespace

const char* to_string(DirectiveKind k) {
  switch (k) {
    case DirectiveKind::crash: return "crash";
    case DirectiveKind::recover: return "recover";
    case DirectiveKind::drop: return "drop";
    case DirectiveKind::partition: return "partition";
    case DirectiveKind::heal: return "heal";
    case DirectiveKind::propose: return "propose";
    case DirectiveKind::workload: return "workload";
    case DirectiveKind::burst: return "burst";
    case DirectiveKind::reconfigure: return "reconfigure";
    case DirectiveKind::cleanup: return "cleanup";
    case DirectiveKind::end: return "end";
  }
  return "?";
}

Scenario parse_scenario(std::string_view text) {
  Scenario s;
  bool members_set = false;
  bool end_set = false;
  bool seen_directive = false;
  std::size_t line_no = 0;
  std::size_t end_line = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    auto raw = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    auto hash = raw.find('#');
    auto line = trim(raw.substr(0, hash));
    if (line.empty()) continue;
    if (line[0] == '@') {
      auto d = parse_directive(line, line_no);
      if (!s.directives.empty() && d.at < s.directives.back().at) {
        throw ScenarioError(line_no, "directive at t=" + std::to_string(d.at) +
                                         " precedes the previous one at t=" +
                                         std::to_string(s.directives.back().at));
      }
      if (!s.directives.empty() && s.directives.back().kind == DirectiveKind::end) {
        throw ScenarioError(line_no, "directive after end");
      }
      if (d.kind == DirectiveKind::end) {
        s.end = d.at;
        end_set = true;
        end_line = line_no;
      }
      s.directives.push_back(std::move(d));
      seen_directive = true;
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ScenarioError(line_no, "expected 'key = value'");
    if (seen_directive) throw ScenarioError(line_no, "headers must precede directives");
    apply_header(s, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no, members_set,
                 end_set);
  }

  if (s.processes.empty()) throw ScenarioError(line_no, "missing 'processes' header");
  if (!members_set) s.members = s.processes;
  for (auto p : s.members) {
    if (!member_of(s.processes, p)) {
      throw ScenarioError(line_no, "member " + to_string(p) + " is not a declared process");
    }
  }
  for (const auto& d : s.directives) {
    auto check = [&](ProcessId p) {
      if (!member_of(s.processes, p)) {
        throw ScenarioError(d.line, "unknown process " + to_string(p));
      }
    };
    for (auto p : d.procs) check(p);
    for (const auto& g : d.groups) {
      for (auto p : g) check(p);
    }
    if (d.at > s.end) {
      throw ScenarioError(d.line, "directive at t=" + std::to_string(d.at) + " is after end t=" +
                                      std::to_string(s.end));
    }
  }
  if (s.stable_from && *s.stable_from > s.end) {
    throw ScenarioError(end_line ? end_line : line_no, "stable_from is after end");
  }
  if (!end_set && !s.directives.empty() && s.directives.back().at > s.end) {
    throw ScenarioError(s.directives.back().line, "directive after end");
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError(0, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  auto s = parse_scenario(buf.str());
  if (s.name == "scenario") s.name = path.stem().string();
  return s;
}

std::string render_directive(const Directive& d) {
  std::string out = "@" + std::to_string(d.at) + " " + to_string(d.kind);
  switch (d.kind) {
    case DirectiveKind::crash:
      out += d.target_leader ? " leader" : " " + to_string(d.procs.at(0));
      break;
    case DirectiveKind::recover:
      out += d.target_all ? " all" : " " + to_string(d.procs.at(0));
      break;
    case DirectiveKind::drop:
      out += " " + to_string(d.procs.at(0)) + " " + to_string(d.procs.at(1));
      break;
    case DirectiveKind::partition:
      for (std::size_t i = 0; i < d.groups.size(); ++i) {
        out += i ? " | " : " ";
        out += render_process_list(d.groups[i]);
      }
      break;
    case DirectiveKind::heal:
    case DirectiveKind::end:
      break;
    case DirectiveKind::propose:
      out += " k" + std::to_string(d.client) + (d.is_put ? " put " : " get ") + d.key;
      if (d.is_put) out += " " + d.value;
      break;
    case DirectiveKind::workload:
      out += " clients=" + std::to_string(d.clients) + " commands=" + std::to_string(d.commands) +
             " keys=" + std::to_string(d.keys);
      break;
    case DirectiveKind::burst:
      out += " " + to_string(d.procs.at(0)) + " " + std::to_string(d.count);
      break;
    case DirectiveKind::reconfigure:
      out += " " + render_process_list(d.procs);
      break;
    case DirectiveKind::cleanup:
      out += " " + to_string(d.procs.at(0)) + " c" + std::to_string(d.config);
      break;
  }
  return out;
}

std::string render_scenario(const Scenario& s) {
  std::ostringstream out;
  out << "name = " << s.name << "\n";
  out << "processes = " << render_process_list(s.processes) << "\n";
  out << "members = " << render_process_list(s.members) << "\n";
  out << "latency = " << s.latency << "\n";
  out << "jitter = " << s.jitter << "\n";
  out << "delta = " << s.delta << "\n";
  out << "append = " << (s.append_mode == AppendMode::dedup ? "dedup" : "duplicates") << "\n";
  out << "snapshot_every = " << s.snapshot_every << "\n";
  out << "storage = " << (s.storage == StorageBackend::file ? "file" : "memory") << "\n";
  if (!s.storage_path.empty()) out << "storage_path = " << s.storage_path << "\n";
  out << "seed = " << s.seed << "\n";
  if (s.stable_from) out << "stable_from = " << *s.stable_from << "\n";
  out << "reconnect = " << s.reconnect << "\n";
  out << "retry_rate = " << s.retry_rate << "\n";
  out << "client_retry = " << s.client_retry << "\n";
  out << "think_time = " << s.think_time << "\n";
  out << "trace_heartbeats = " << (s.trace_heartbeats ? "true" : "false") << "\n";
  if (s.mutation != Mutation::none) out << "mutation = " << to_string(s.mutation) << "\n";
  out << "end = " << s.end << "\n";
  for (const auto& d : s.directives) {
    if (d.kind != DirectiveKind::end) out << render_directive(d) << "\n";
  }
  return out.str();
}

}  // namespace seqpaxos
