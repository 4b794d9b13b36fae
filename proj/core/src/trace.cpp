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

#include "seqpaxos/trace.hpp"

#include <charconv>

namespace seqpaxos {
namespace {

std::uint64_t to_u64(std::string_view s, std::string_view what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw TraceParseError("bad " + std::string(what) + ": '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::optional<std::string> Trace::header_value(std::string_view key) const {
  for (const auto& [k, v] : header) {
    if (k == key) return v;
  }
  return std::nullopt;
}

void Trace::set_header(std::string key, std::string value) {
  for (auto& [k, v] : header) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  header.emplace_back(std::move(key), std::move(value));
}

std::string render(const TraceRecord& r) {
  std::string out = "t=" + std::to_string(r.t) + " " + r.kind + " " + r.from + "->" + r.to;
  if (!r.payload.empty()) out += " " + r.payload;
  out += " | " + r.digest;
  return out;
}

std::string render(const Trace& trace) {
  std::string out;
  for (const auto& [k, v] : trace.header) out += "# " + k + " " + v + "\n";
  for (const auto& r : trace.records) {
    out += render(r);
    out += '\n';
  }
  return out;
}

TraceRecord parse_record(std::string_view line) {
  TraceRecord r;
  if (line.substr(0, 2) != "t=") throw TraceParseError("record must start with t=");
  auto bar = line.rfind(" | ");
  if (bar == std::string_view::npos) throw TraceParseError("missing digest separator");
  r.digest = std::string(line.substr(bar + 3));
  auto body = line.substr(2, bar - 2);
  auto sp = body.find(' ');
  if (sp == std::string_view::npos) throw TraceParseError("missing kind");
  r.t = to_u64(body.substr(0, sp), "time");
  body.remove_prefix(sp + 1);
  sp = body.find(' ');
  r.kind = std::string(body.substr(0, sp));
  if (sp == std::string_view::npos) throw TraceParseError("missing endpoints");
  body.remove_prefix(sp + 1);
  sp = body.find(' ');
  auto ends = body.substr(0, sp);
  auto arrow = ends.find("->");
  if (arrow == std::string_view::npos) throw TraceParseError("missing '->' in endpoints");
  r.from = std::string(ends.substr(0, arrow));
  r.to = std::string(ends.substr(arrow + 2));
  if (sp != std::string_view::npos) r.payload = std::string(body.substr(sp + 1));
  return r;
}

Trace parse_trace(std::string_view text) {
  Trace trace;
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto rest = line.substr(1);
      while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
      auto sp = rest.find(' ');
      std::string key(rest.substr(0, sp));
      std::string value = sp == std::string_view::npos ? "" : std::string(rest.substr(sp + 1));
      trace.header.emplace_back(std::move(key), std::move(value));
      continue;
    }
    try {
      trace.records.push_back(parse_record(line));
    } catch (const TraceParseError& e) {
      throw TraceParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return trace;
}

std::optional<std::string> payload_field(std::string_view payload, std::string_view key) {
  int depth = 0;
  for (std::size_t i = 0; i < payload.size(); ++i) {
    bool at_start = i == 0 || payload[i - 1] == '{' || payload[i - 1] == ',' ||
                    payload[i - 1] == ' ';
    if (depth == 0 && at_start && payload.substr(i, key.size()) == key) {
      auto start = i + key.size();
      auto end = start;
      int inner = 0;
      for (; end < payload.size(); ++end) {
        char e = payload[end];
        if (inner == 0 && (e == ',' || e == '}' || e == ' ')) break;
        if (e == '[' || e == '(') ++inner;
        if (e == ']' || e == ')') --inner;
      }
      return std::string(payload.substr(start, end - start));
    }
    char c = payload[i];
    if (c == '[' || c == '(') ++depth;
    if (c == ']' || c == ')') --depth;
  }
  return std::nullopt;
}

std::optional<ConfigId> payload_config(std::string_view payload) {
  if (payload.size() < 2 || payload[0] != 'c') return std::nullopt;
  auto sp = payload.find(' ');
  auto tok = payload.substr(1, sp == std::string_view::npos ? payload.size() - 1 : sp - 1);
  ConfigId c = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), c);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) return std::nullopt;
  return c;
}

std::string_view payload_rest(std::string_view payload) {
  if (!payload_config(payload)) return payload;
  auto sp = payload.find(' ');
  return sp == std::string_view::npos ? std::string_view{} : payload.substr(sp + 1);
}

std::string_view payload_head(std::string_view payload) {
  auto rest = payload_rest(payload);
  auto end = rest.find_first_of(" {");
  return rest.substr(0, end);
}

Round parse_round(std::string_view text) {
  auto dot = text.find('.');
  if (dot == std::string_view::npos) throw TraceParseError("bad round '" + std::string(text) + "'");
  Round r;
  r.config = static_cast<ConfigId>(to_u64(text.substr(0, dot), "round config"));
  r.ballot = Ballot{to_u64(text.substr(dot + 1), "round ballot")};
  return r;
}

std::optional<ProcessId> parse_process(std::string_view text) {
  if (text.size() < 2 || text[0] != 'p') return std::nullopt;
  std::uint32_t id = 0;
  auto [ptr, ec] = std::from_chars(text.data() + 1, text.data() + text.size(), id);
  if (ec != std::errc{} || ptr != text.data() + text.size() || id == 0) return std::nullopt;
  return ProcessId{id};
}

std::vector<ProcessId> parse_process_list(std::string_view text) {
  std::vector<ProcessId> out;
  while (!text.empty()) {
    auto comma = text.find(',');
    auto tok = text.substr(0, comma);
    auto p = parse_process(tok);
    if (!p) throw TraceParseError("bad process '" + std::string(tok) + "'");
    out.push_back(*p);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

std::string render_process_list(const std::vector<ProcessId>& ps) {
  std::string out;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (i) out += ',';
    out += to_string(ps[i]);
  }
  return out;
}

}  // namespace seqpaxos
