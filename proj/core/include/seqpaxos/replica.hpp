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
#include <variant>
#include <vector>

#include "seqpaxos/message.hpp"
#include "seqpaxos/storage.hpp"
#include "seqpaxos/types.hpp"

namespace seqpaxos {

enum class Role { follower, leader };
enum class Phase { none, prepare, accept, recover };

const char* to_string(Role r);
const char* to_string(Phase p);

/// Deliberate protocol defects used to show the checker and the explorer
/// catch them. Never enable outside tests.
enum class Mutation {
  none,
  skip_promise_persist,  // Promise sent without persisting n_prom
  accept_lower_round,    // Prepare accepted for any round other than n_prom
  skip_stale_guard,      // Promise suffix ignores the leader's accepted round
  extend_past_stop,      // leader keeps appending after a stop-sign
};

const char* to_string(Mutation m);

struct ReplicaConfig {
  ConfigId config = 0;
  std::vector<ProcessId> members;  // sorted
  ProcessId self;
  AppendMode append_mode = AppendMode::dedup;
  std::uint64_t sigma_len = 0;
  Mutation mutation = Mutation::none;
};

struct PersistAction {
  PersistRecord record;
};
struct SendAction {
  ProcessId to;
  MessageBody body;
};
struct DeliverAction {
  std::uint64_t index = 0;
  LogEntry entry;
};

using Action = std::variant<PersistAction, SendAction, DeliverAction>;

/// Transition result. Actions must be executed in order: persistence always
/// precedes the sends and deliveries that depend on it.
struct Outputs {
  std::vector<Action> actions;
  bool stopped = false;  // a stop-sign was delivered by this transition
};

/// One replica of one configuration: proposer, acceptor and learner of
/// sequence consensus with fail-recovery, session loss and stop-signs.
///
/// Handlers are pure state transitions; durable effects come back as
/// PersistAction values. The replica is a copyable value, which the
/// small-model explorer relies on.
class Replica {
 public:
  /// Fresh replica: n_prom = n_a = (config, 0), v_a = sigma as a log of
  /// length sigma_len with nothing retained below it.
  explicit Replica(ReplicaConfig cfg);

  /// Restores from persisted state into (follower, recover).
  static Replica recover(ReplicaConfig cfg, const PersistentState& persisted);

  /// The image to persist when this configuration starts.
  PersistentState initial_state() const;

  Outputs on_leader(ProcessId leader, Ballot b);
  Outputs on_message(ProcessId from, const MessageBody& body);
  Outputs on_prepare(ProcessId from, const Prepare& m);
  Outputs on_promise(ProcessId from, const Promise& m);
  Outputs on_accept_sync(ProcessId from, const AcceptSync& m);
  Outputs on_accept(ProcessId from, const Accept& m);
  Outputs on_accepted(ProcessId from, const Accepted& m);
  Outputs on_decide(ProcessId from, const Decide& m);
  Outputs on_prepare_req(ProcessId from);
  Outputs on_propose(const LogEntry& entry);
  Outputs on_connection_lost(ProcessId peer);

  /// Drops entries below up_to; the caller guarantees every replica has
  /// snapshotted at least that far.
  Outputs truncate(std::uint64_t up_to);

  bool stopped() const { return v_a_.ends_with_stop(); }

  const ReplicaConfig& config() const { return cfg_; }
  ProcessId self() const { return cfg_.self; }
  Role role() const { return role_; }
  Phase phase() const { return phase_; }
  Round n_leader() const { return n_l_; }
  Round n_prom() const { return n_prom_; }
  Round n_a() const { return n_a_; }
  const Log& v_a() const { return v_a_; }
  std::uint64_t l_d() const { return l_d_; }
  std::uint64_t l_c() const { return l_c_; }
  const std::map<ProcessId, std::uint64_t>& las() const { return las_; }
  const std::map<ProcessId, std::uint64_t>& lds() const { return lds_; }
  const std::vector<LogEntry>& proposals() const { return prop_cmds_; }
  std::optional<ProcessId> leader_hint() const { return leader_hint_; }

  /// True when this follower should ask `leader` for a Prepare: it is in
  /// recover, or it has not yet promised the leader's current round.
  bool wants_prepare(ProcessId leader, Ballot b) const;

  /// Summary digest for trace lines; `full` also folds in log contents and
  /// leader bookkeeping (used for explorer state hashing).
  void digest_into(Fnv1a& h, bool full = false) const;

  /// Appends every field that influences future behaviour, for state hashing.
  void encode_state(Writer& w) const;

 private:
  Round round_of(Ballot b) const { return Round{cfg_.config, b}; }
  void send(Outputs& out, ProcessId to, MessageBody body) const;
  void persist(Outputs& out, PersistRecord rec) const;
  void adopt_majority(Outputs& out);
  void maybe_decide(Outputs& out);
  void deliver_up_to(Outputs& out, std::uint64_t l);
  bool is_member(ProcessId p) const;

  ReplicaConfig cfg_;
  Role role_ = Role::follower;
  Phase phase_ = Phase::none;
  Round n_l_;
  std::map<ProcessId, PromiseRecord> promises_;
  std::map<ProcessId, std::uint64_t> las_;
  std::map<ProcessId, std::uint64_t> lds_;  // absent = unset
  std::vector<LogEntry> prop_cmds_;
  std::uint64_t l_c_ = 0;
  std::optional<ProcessId> leader_hint_;

  Round n_prom_;
  Round n_a_;
  Log v_a_;
  std::uint64_t l_d_ = 0;
};

}  // namespace seqpaxos
