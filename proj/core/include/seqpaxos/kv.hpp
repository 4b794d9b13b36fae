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

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "seqpaxos/types.hpp"

namespace seqpaxos {

struct KvPut {
  std::string key;
  std::string value;
  friend bool operator==(const KvPut&, const KvPut&) = default;
};

struct KvGet {
  std::string key;
  friend bool operator==(const KvGet&, const KvGet&) = default;
};

/// Announces that `replica` has snapshotted everything below `l_k`.
struct SnapshotMarker {
  ProcessId replica;
  std::uint64_t k = 0;
  std::uint64_t l_k = 0;
  friend bool operator==(const SnapshotMarker&, const SnapshotMarker&) = default;
};

using KvOp = std::variant<KvPut, KvGet, SnapshotMarker>;

std::string encode_op(const KvOp& op);
KvOp decode_op(std::string_view bytes);

// Markers are commands from a reserved client range, one client per replica.
inline constexpr ClientId kMarkerClientBase = ClientId{1} << 62;
Command make_marker_command(const SnapshotMarker& m);
std::optional<SnapshotMarker> as_marker(const LogEntry& e);

Command make_put(ClientId client, std::uint64_t seq, std::string key, std::string value);
Command make_get(ClientId client, std::uint64_t seq, std::string key);

struct ClientRecord {
  std::uint64_t last_seq = 0;
  std::string response;
  friend bool operator==(const ClientRecord&, const ClientRecord&) = default;
};

struct RsmSnapshot {
  std::uint64_t id = 0;
  std::uint64_t l_k = 0;
  std::map<std::string, std::string> kv;
  std::map<ClientId, ClientRecord> clients;
  friend bool operator==(const RsmSnapshot&, const RsmSnapshot&) = default;
};

std::string encode_snapshot(const RsmSnapshot& s);
RsmSnapshot decode_snapshot(std::string_view bytes);

struct ApplyResult {
  ClientId client = 0;
  std::uint64_t seq = 0;
  std::string response;
  bool executed = false;  // false: answered from the client table
};

/// Key-value state machine with the sequential-client dedup table.
class KvStore {
 public:
  KvStore() = default;
  static KvStore from_snapshot(const RsmSnapshot& s);

  /// Applies the entry at global index g; entries must arrive without gaps.
  /// Stop-signs and snapshot markers leave the state untouched. A stale
  /// command (older than the client's last) is neither executed nor answered.
  std::optional<ApplyResult> apply(const LogEntry& entry, std::uint64_t g);

  /// Snapshot at exactly `covered` applied entries.
  RsmSnapshot take_snapshot(std::uint64_t covered);

  static KvStore restore(const RsmSnapshot& s, const std::vector<LogEntry>& suffix,
                         std::uint64_t start);

  std::uint64_t applied() const { return applied_; }
  const std::map<std::string, std::string>& kv() const { return kv_; }
  const std::map<ClientId, ClientRecord>& clients() const { return clients_; }
  std::uint64_t digest() const;

  /// State with id/l_k fixed to zero; byte-comparable across replicas.
  std::string state_bytes() const;

  friend bool operator==(const KvStore& a, const KvStore& b) {
    return a.applied_ == b.applied_ && a.kv_ == b.kv_ && a.clients_ == b.clients_;
  }

 private:
  std::uint64_t applied_ = 0;
  std::uint64_t next_snapshot_id_ = 1;
  std::map<std::string, std::string> kv_;
  std::map<ClientId, ClientRecord> clients_;
};

}  // namespace seqpaxos
