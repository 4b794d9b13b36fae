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

#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <unordered_set>
#include <vector>

#include "seqpaxos/host.hpp"
#include "seqpaxos/scenario.hpp"
#include "seqpaxos/trace.hpp"

namespace seqpaxos {

/// Client ids used by `burst` directives: base + process id.
inline constexpr ClientId kBurstClientBase = ClientId{1} << 61;

struct SimOptions {
  /// Crash whichever process performs the k-th persist (1-based, counted over
  /// the whole run) right after that write, then recover it.
  std::optional<std::uint64_t> crash_at_persist;
  Duration recover_after = 30;
  /// Root for file-backed storage when the scenario gives no path.
  std::filesystem::path output_root = "out";
  /// Observer for every message handed to the network.
  std::function<void(Time, const Message&)> on_send;
};

struct SimResult {
  Trace trace;
  /// Everything each process ever delivered or fetched, by global index.
  std::map<std::uint32_t, std::vector<std::optional<LogEntry>>> history;
  /// Deliveries per (process, configuration) in order.
  std::map<std::pair<std::uint32_t, ConfigId>, std::vector<std::pair<std::uint64_t, LogEntry>>>
      decided;
  /// State chunks that started an instance, per (process, configuration).
  std::map<std::pair<std::uint32_t, ConfigId>, StateChunk> fetched;
  /// Final RSM state of each live process's active instance.
  std::map<std::uint32_t, std::string> final_state;
  std::map<std::uint32_t, ConfigId> final_config;
  std::set<std::uint32_t> alive_at_end;
  /// Distinct commands each client issued, in order.
  std::map<ClientId, std::vector<Command>> issued;
  /// First response per (client, seq).
  std::map<ClientId, std::map<std::uint64_t, std::string>> responses;
  std::uint64_t duplicate_submissions = 0;
  std::uint64_t table_answers = 0;  // responses served from the client table
  std::uint64_t mismatched_responses = 0;
  std::uint64_t persist_count = 0;
  std::uint64_t errors = 0;
  std::uint64_t crashes = 0;
};

class CrashPoint : public std::exception {
 public:
  const char* what() const noexcept override { return "crash point"; }
};

/// Deterministic discrete-event simulation of a scenario: FIFO sessions with
/// seeded omission on drops, crashes with amnesia, partitions, timers,
/// sequential clients and the script's directives. Single-threaded.
class Simulation : public Environment {
 public:
  explicit Simulation(Scenario scenario, SimOptions options = {});
  ~Simulation() override;

  SimResult run();

  // Environment
  Time now() const override { return now_; }
  void send(const Message& m) override;
  void set_timer(ProcessId p, TimerKind kind, ConfigId config, Duration after) override;
  Storage& storage(ProcessId p, ConfigId config) override;
  std::vector<ConfigId> stored_configs(ProcessId p) override;
  void remove_storage(ProcessId p, ConfigId config) override;
  void forward(ProcessId from, ProcessId to, ConfigId config, const LogEntry& e) override;
  void on_deliver(ProcessId p, ConfigId c, std::uint64_t g, const LogEntry& e,
                  const std::optional<ApplyResult>& result) override;
  void on_leader(ProcessId p, ConfigId c, const LeaderEvent& ev) override;
  void on_propose(ProcessId p, ConfigId c, const LogEntry& e) override;
  void on_instance_start(ProcessId p, ConfigId c, std::uint64_t sigma_len,
                         const StateChunk* chunk) override;
  void on_instance_recover(ProcessId p, ConfigId c, const PersistentState& st) override;
  void on_note(ProcessId p, ConfigId c, const std::string& kind, const std::string& text) override;

  void on_persisted(ProcessId p, ConfigId c, const PersistRecord& rec);

  const ProcessHost* host(ProcessId p) const;
  bool alive(ProcessId p) const;

 private:
  struct Delivery {
    Message m;
    std::uint64_t id = 0;
  };
  struct Forwarded {
    ProcessId from, to;
    ConfigId config = 0;
    LogEntry entry;
  };
  struct TimerFire {
    ProcessId p;
    TimerKind kind = TimerKind::ble;
    ConfigId config = 0;
    std::uint64_t incarnation = 0;
  };
  struct DirectiveFire {
    std::size_t index = 0;
  };
  struct ClientSubmit {
    ClientId client = 0;
    std::uint64_t seq = 0;
    bool duplicate = false;
  };
  struct ClientNext {
    ClientId client = 0;
  };
  struct Reconnect {
    ProcessId a, b;
  };
  struct ConnLost {
    ProcessId at, peer;
    std::uint64_t incarnation = 0;
  };
  struct AutoRecover {
    ProcessId p;
  };
  struct ReconfigRetry {
    std::size_t index = 0;
  };
  using EventBody = std::variant<Delivery, Forwarded, TimerFire, DirectiveFire, ClientSubmit,
                                 ClientNext, Reconnect, ConnLost, AutoRecover, ReconfigRetry>;
  struct Event {
    Time t = 0;
    std::uint64_t seq = 0;
    EventBody body;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.t != b.t ? a.t > b.t : a.seq > b.seq;
    }
  };

  struct Link {
    std::uint64_t session = 1;
    bool up = true;
    Time last_sched[2] = {0, 0};
    std::deque<std::uint64_t> inflight[2];
  };

  struct Client {
    ClientId id = 0;
    std::deque<Command> queue;
    std::optional<Command> current;
    std::uint64_t next_seq = 1;
  };

  struct Reconfig {
    StopSign stop;
    ConfigId from = 0;
    bool done = false;
  };

  struct Process {
    std::unique_ptr<ProcessHost> host;
    bool alive = true;
    std::uint64_t incarnation = 0;
  };

  class TracedStorage;

  void schedule(Time t, EventBody body);
  void dispatch(Event& ev);
  void record(std::string kind, std::string from, std::string to, std::string payload,
              std::optional<ProcessId> actor);
  template <typename F>
  void with_host(ProcessId p, F&& f);

  Link& link(ProcessId a, ProcessId b);
  static int direction(ProcessId from, ProcessId to) { return from < to ? 0 : 1; }
  bool can_connect(ProcessId a, ProcessId b) const;
  void drop_link(ProcessId a, ProcessId b, bool notify_a, bool notify_b);
  void open_link(ProcessId a, ProcessId b);

  void run_directive(const Directive& d, std::size_t index);
  void crash(ProcessId p, const std::string& why);
  void recover(ProcessId p);
  std::optional<ProcessId> current_leader() const;

  Client& client(ClientId id);
  void client_next(Client& c);
  void submit(Client& c, const Command& cmd, bool duplicate);
  void submit_reconfig(std::size_t index);

  std::string storage_dir(ProcessId p, ConfigId c) const;
  std::string digest_of(ProcessId p) const;

  Scenario scenario_;
  SimOptions options_;
  std::filesystem::path storage_root_;
  Time now_ = 0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t next_msg_ = 0;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::mt19937_64 rng_;
  std::map<std::uint32_t, Process> processes_;
  std::map<std::pair<std::uint32_t, std::uint32_t>, Link> links_;
  std::unordered_set<std::uint64_t> lost_;
  std::map<std::uint32_t, std::size_t> group_;  // partition groups; empty when healed
  std::map<std::pair<std::uint32_t, ConfigId>, std::unique_ptr<TracedStorage>> disks_;
  std::map<ClientId, Client> clients_;
  std::vector<Reconfig> reconfigs_;
  std::uint64_t workload_counter_ = 0;
  SimResult result_;
};

SimResult simulate(const Scenario& scenario, const SimOptions& options = {});

/// Text rendering of one process's final state for replicas/p<id>.state.
std::string render_replica_state(const SimResult& result, ProcessId p);

}  // namespace seqpaxos
