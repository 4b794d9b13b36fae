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

#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace seqpaxos {

using ConfigId = std::uint32_t;
using ClientId = std::uint64_t;
using Time = std::uint64_t;
using Duration = std::uint64_t;

// Upper bound on |Pi| folded into ballot numbers.
inline constexpr std::uint64_t kBallotCap = 1024;

struct ProcessId {
  std::uint32_t id = 0;

  friend constexpr auto operator<=>(ProcessId, ProcessId) = default;
};

struct ReplicaId {
  ConfigId config = 0;
  ProcessId process;

  friend constexpr auto operator<=>(const ReplicaId&, const ReplicaId&) = default;
};

/// A ballot folds a per-process sequence number and the owner's id into one
/// natural: value = s * cap + pid.
struct Ballot {
  std::uint64_t value = 0;

  friend constexpr auto operator<=>(Ballot, Ballot) = default;
};

Ballot ballot_make(std::uint64_t seq, ProcessId pid, std::uint64_t cap = kBallotCap);
std::uint64_t ballot_seq(Ballot b, std::uint64_t cap = kBallotCap);
ProcessId ballot_owner(Ballot b, std::uint64_t cap = kBallotCap);

/// (configuration, ballot). Member order gives the lexicographic comparison,
/// so every round of configuration i+1 exceeds every round of i.
struct Round {
  ConfigId config = 0;
  Ballot ballot;

  friend constexpr auto operator<=>(const Round&, const Round&) = default;
};

std::strong_ordering round_cmp(const Round& a, const Round& b);

/// Client command. Identity is (client, seq); the payload is opaque to
/// consensus and ignored by equality.
struct Command {
  ClientId client = 0;
  std::uint64_t seq = 0;
  std::string op;

  friend bool operator==(const Command& a, const Command& b) {
    return a.client == b.client && a.seq == b.seq;
  }
};

struct StopSign {
  ConfigId next_config = 0;
  std::vector<ProcessId> processes;  // sorted, unique
  std::map<ProcessId, ReplicaId> replica_map;

  friend bool operator==(const StopSign&, const StopSign&) = default;
};

StopSign make_stop_sign(ConfigId next_config, std::vector<ProcessId> processes);

using LogEntry = std::variant<Command, StopSign>;

inline bool is_stop(const LogEntry& e) { return std::holds_alternative<StopSign>(e); }

enum class AppendMode { dedup, duplicates };

class TruncationViolated : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class LogStopped : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Raised on conditions that a correct protocol run can never produce.
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Replicated log with a truncation offset. All indices and lengths are
/// global; entries below offset() have been compacted away.
class Log {
 public:
  Log() = default;
  explicit Log(std::uint64_t offset, std::vector<LogEntry> entries = {})
      : offset_(offset), entries_(std::move(entries)) {}

  std::uint64_t offset() const { return offset_; }
  std::uint64_t length() const { return offset_ + entries_.size(); }
  const std::vector<LogEntry>& entries() const { return entries_; }

  const LogEntry& at(std::uint64_t global) const;
  bool ends_with_stop() const { return !entries_.empty() && is_stop(entries_.back()); }
  bool contains(const LogEntry& e) const;

  /// Returns true if the log grew.
  bool append(const LogEntry& e, AppendMode mode);
  /// Appends without the stop-sign or duplicate checks.
  void append_raw(LogEntry e) { entries_.push_back(std::move(e)); }

  /// Keeps the first min(l, length()) entries.
  void truncate_back(std::uint64_t l);
  /// Entries from global index min(l, length()) onward.
  std::vector<LogEntry> suffix(std::uint64_t l) const;
  /// Drops entries below global index m (compaction).
  void truncate_front(std::uint64_t m);

  friend bool operator==(const Log&, const Log&) = default;

 private:
  std::uint64_t offset_ = 0;
  std::vector<LogEntry> entries_;
};

// Sequence helpers on plain entry vectors.
bool append(std::vector<LogEntry>& v, const LogEntry& e, AppendMode mode);
std::vector<LogEntry> prefix(std::span<const LogEntry> v, std::uint64_t l);
std::vector<LogEntry> suffix(std::span<const LogEntry> v, std::uint64_t l);

struct PromiseRecord {
  ReplicaId from;
  Round accepted_round;
  std::vector<LogEntry> suffix;
};

/// Max by (round, suffix length); remaining ties go to the lowest replica id.
const PromiseRecord& max_promise(std::span<const PromiseRecord> promises);

std::string to_string(ProcessId p);
std::string to_string(const Round& r);
std::string to_string(const Command& c);
std::string to_string(const StopSign& s);
std::string to_string(const LogEntry& e);
std::string to_string(std::span<const LogEntry> entries);

std::size_t majority(std::size_t n);

}  // namespace seqpaxos
