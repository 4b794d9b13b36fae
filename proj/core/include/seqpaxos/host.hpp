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
#include <set>
#include <string>
#include <vector>

#include "seqpaxos/ble.hpp"
#include "seqpaxos/compaction.hpp"
#include "seqpaxos/kv.hpp"
#include "seqpaxos/message.hpp"
#include "seqpaxos/replica.hpp"
#include "seqpaxos/storage.hpp"

namespace seqpaxos {

enum class TimerKind { ble, buffer, fetch };

const char* to_string(TimerKind k);

struct HostOptions {
  Duration delta = kDefaultDelta;
  AppendMode append_mode = AppendMode::dedup;
  std::uint64_t snapshot_every = 0;  // 0 disables snapshots and truncation
  Duration buffer_window = 100;
  Duration fetch_retry = 100;
  Duration marker_retry = 20;
  std::size_t buffer_limit = 4096;
  Mutation mutation = Mutation::none;
};

/// What a host needs from the world around it. The simulator implements
/// this; the observation hooks default to no-ops.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual Time now() const = 0;
  virtual void send(const Message& m) = 0;
  virtual void set_timer(ProcessId p, TimerKind kind, ConfigId config, Duration after) = 0;
  virtual Storage& storage(ProcessId p, ConfigId config) = 0;
  virtual std::vector<ConfigId> stored_configs(ProcessId p) = 0;
  virtual void remove_storage(ProcessId p, ConfigId config) = 0;
  /// Hands a proposal (a snapshot marker) to another process's host.
  virtual void forward(ProcessId from, ProcessId to, ConfigId config, const LogEntry& e) = 0;

  virtual void on_deliver(ProcessId, ConfigId, std::uint64_t, const LogEntry&,
                          const std::optional<ApplyResult>&) {}
  virtual void on_leader(ProcessId, ConfigId, const LeaderEvent&) {}
  /// A proposal originated by the host itself (snapshot markers).
  virtual void on_propose(ProcessId, ConfigId, const LogEntry&) {}
  /// Instance start. `chunk` is set when the initial state was fetched.
  virtual void on_instance_start(ProcessId, ConfigId, std::uint64_t, const StateChunk*) {}
  virtual void on_instance_recover(ProcessId, ConfigId, const PersistentState&) {}
  virtual void on_note(ProcessId, ConfigId, const std::string&, const std::string&) {}
};

/// One configuration's replica stack at one process.
struct Instance {
  ConfigId config = 0;
  std::vector<ProcessId> members;
  Replica replica;
  BallotLeaderElection ble;
  KvStore rsm;
  SnapshotLedger ledger;
  RsmSnapshot base;                      // state at sigma_len
  std::optional<RsmSnapshot> snapshot;   // latest durable snapshot
  std::optional<StopSign> stop;          // set once the stop-sign is delivered
  std::uint64_t stop_index = 0;
  std::optional<Command> pending_marker;
  Time marker_sent = 0;
  std::set<ProcessId> confirmations;     // processes known to hold the final state
};

/// Per-process configuration lifecycle: one instance per configuration,
/// message routing by configuration id, stop-sign handoff and state
/// transfer to joining processes.
class ProcessHost {
 public:
  ProcessHost(ProcessId self, HostOptions opts, Environment& env);

  /// First boot. Members of the initial configuration start it with an
  /// empty initial sequence; everyone else idles until offered state.
  void boot(const std::vector<ProcessId>& initial_members);
  /// Rebuilds every stored instance after a crash.
  void recover();

  void on_message(const Message& m);
  void on_timer(TimerKind kind, ConfigId config);
  /// Client proposal, handed to the active configuration.
  void on_client_propose(const LogEntry& e);
  /// Proposal aimed at a given configuration (stop-signs, markers).
  void on_propose_to(ConfigId config, const LogEntry& e);
  void on_connection_lost(ProcessId peer);
  /// Removes a stopped configuration. Returns an empty string on success,
  /// otherwise the reason for refusing.
  std::string cleanup(ConfigId config);

  ProcessId self() const { return self_; }
  std::optional<ConfigId> active() const { return active_; }
  const Instance* instance(ConfigId c) const;
  const std::map<ConfigId, Instance>& instances() const { return instances_; }
  std::uint64_t digest() const;

 private:
  Instance& start_instance(ConfigId c, std::vector<ProcessId> members, std::uint64_t sigma_len,
                           RsmSnapshot base, const StateChunk* chunk);
  Instance make_instance(ConfigId c, std::vector<ProcessId> members, Replica replica,
                         RsmSnapshot base, Ballot seed);
  void execute(Instance& inst, Outputs out);
  void handle_deliver(Instance& inst, std::uint64_t g, const LogEntry& e);
  void handle_stop(Instance& inst, std::uint64_t g, const StopSign& ss);
  void maybe_snapshot(Instance& inst);
  void submit_marker(Instance& inst);
  void on_ble_timeout(Instance& inst);
  void handle_state_message(const Message& m);
  void buffer(const Message& m);
  void request_state(ConfigId c);
  void replay_buffered(ConfigId c);
  std::optional<StateChunk> build_chunk(ConfigId c) const;
  void arm_ble(Instance& inst);

  ProcessId self_;
  HostOptions opts_;
  Environment& env_;
  std::map<ConfigId, Instance> instances_;
  std::optional<ConfigId> active_;
  std::set<ConfigId> removed_;

  struct Pending {
    std::vector<Message> messages;
    std::vector<ProcessId> holders;
    std::size_t next_holder = 0;
    bool buffer_armed = false;
    bool fetch_armed = false;
  };
  std::map<ConfigId, Pending> pending_;
};

}  // namespace seqpaxos
