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

#include "seqpaxos/types.hpp"

#include <algorithm>

namespace seqpaxos {

Ballot ballot_make(std::uint64_t seq, ProcessId pid, std::uint64_t cap) {
  if (pid.id >= cap) {
    throw std::invalid_argument("ballot_make: pid " + std::to_string(pid.id) +
                                " not below cap " + std::to_string(cap));
  }
  return Ballot{seq * cap + pid.id};
}

std::uint64_t ballot_seq(Ballot b, std::uint64_t cap) { return b.value / cap; }

ProcessId ballot_owner(Ballot b, std::uint64_t cap) {
  return ProcessId{static_cast<std::uint32_t>(b.value % cap)};
}

std::strong_ordering round_cmp(const Round& a, const Round& b) { return a <=> b; }

StopSign make_stop_sign(ConfigId next_config, std::vector<ProcessId> processes) {
  std::sort(processes.begin(), processes.end());
  processes.erase(std::unique(processes.begin(), processes.end()), processes.end());
  StopSign ss;
  ss.next_config = next_config;
  for (auto p : processes) ss.replica_map.emplace(p, ReplicaId{next_config, p});
  ss.processes = std::move(processes);
  return ss;
}

const LogEntry& Log::at(std::uint64_t global) const {
  if (global < offset_) {
    throw TruncationViolated("index " + std::to_string(global) + " below truncation offset " +
                             std::to_string(offset_));
  }
  if (global >= length()) {
    throw std::out_of_range("index " + std::to_string(global) + " beyond log length " +
                            std::to_string(length()));
  }
  return entries_[global - offset_];
}

bool Log::contains(const LogEntry& e) const {
  return std::find(entries_.begin(), entries_.end(), e) != entries_.end();
}

bool Log::append(const LogEntry& e, AppendMode mode) {
  if (ends_with_stop()) throw LogStopped("append after stop-sign");
  if (mode == AppendMode::dedup && contains(e)) return false;
  entries_.push_back(e);
  return true;
}

void Log::truncate_back(std::uint64_t l) {
  if (l < offset_) {
    throw TruncationViolated("prefix " + std::to_string(l) + " below truncation offset " +
                             std::to_string(offset_));
  }
  if (l < length()) entries_.resize(l - offset_);
}

std::vector<LogEntry> Log::suffix(std::uint64_t l) const {
  if (l < offset_) {
    throw TruncationViolated("suffix " + std::to_string(l) + " below truncation offset " +
                             std::to_string(offset_));
  }
  if (l >= length()) return {};
  return {entries_.begin() + static_cast<std::ptrdiff_t>(l - offset_), entries_.end()};
}

void Log::truncate_front(std::uint64_t m) {
  if (m <= offset_) return;
  if (m > length()) throw std::invalid_argument("truncate_front past log end");
  entries_.erase(entries_.begin(), entries_.begin() + static_cast<std::ptrdiff_t>(m - offset_));
  offset_ = m;
}

bool append(std::vector<LogEntry>& v, const LogEntry& e, AppendMode mode) {
  if (!v.empty() && is_stop(v.back())) throw LogStopped("append after stop-sign");
  if (mode == AppendMode::dedup && std::find(v.begin(), v.end(), e) != v.end()) return false;
  v.push_back(e);
  return true;
}

std::vector<LogEntry> prefix(std::span<const LogEntry> v, std::uint64_t l) {
  auto n = std::min<std::uint64_t>(l, v.size());
  return {v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n)};
}

std::vector<LogEntry> suffix(std::span<const LogEntry> v, std::uint64_t l) {
  auto n = std::min<std::uint64_t>(l, v.size());
  return {v.begin() + static_cast<std::ptrdiff_t>(n), v.end()};
}

const PromiseRecord& max_promise(std::span<const PromiseRecord> promises) {
  if (promises.empty()) throw std::invalid_argument("max_promise: no promises");
  const PromiseRecord* best = &promises.front();
  for (const auto& p : promises.subspan(1)) {
    if (p.accepted_round != best->accepted_round) {
      if (p.accepted_round > best->accepted_round) best = &p;
    } else if (p.suffix.size() != best->suffix.size()) {
      if (p.suffix.size() > best->suffix.size()) best = &p;
    } else if (p.from < best->from) {
      best = &p;
    }
  }
  return *best;
}

std::string to_string(ProcessId p) { return "p" + std::to_string(p.id); }

std::string to_string(const Round& r) {
  return std::to_string(r.config) + "." + std::to_string(r.ballot.value);
}

std::string to_string(const Command& c) {
  return std::to_string(c.client) + ":" + std::to_string(c.seq);
}

std::string to_string(const StopSign& s) {
  std::string out = "SS" + std::to_string(s.next_config) + "(";
  for (std::size_t i = 0; i < s.processes.size(); ++i) {
    if (i) out += ',';
    out += to_string(s.processes[i]);
  }
  return out + ")";
}

std::string to_string(const LogEntry& e) {
  return std::visit([](const auto& v) { return to_string(v); }, e);
}

std::string to_string(std::span<const LogEntry> entries) {
  std::string out = "[";
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i) out += ',';
    out += to_string(entries[i]);
  }
  return out + "]";
}

std::size_t majority(std::size_t n) { return n / 2 + 1; }

}  // namespace seqpaxos
