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

#include "seqpaxos/explorer.hpp"

#include <sstream>
#include <unordered_map>

#include "seqpaxos/ble.hpp"
#include "seqpaxos/codec.hpp"
#include "seqpaxos/storage.hpp"

namespace seqpaxos {
namespace {

struct Node {
  std::optional<Replica> replica;
  PersistentState disk;
  std::optional<LeaderEvent> notified;
  std::uint64_t delivered = 0;  // decided prefix this node has delivered
};

struct World {
  std::vector<Node> nodes;
  std::vector<std::vector<MessageBody>> links;  // from * n + to
  std::optional<LeaderEvent> leader;
  std::size_t elections = 0;
  std::size_t crashes = 0;
  std::size_t drops = 0;
  std::size_t next_proposal = 0;
  std::vector<std::optional<LogEntry>> agreed;
};

enum class EventKind { deliver, notify, elect, propose, crash, recover, drop };

struct Event {
  EventKind kind;
  std::size_t a = 0;
  std::size_t b = 0;
};

struct Bad {
  std::string property;
  std::string detail;
};

ProcessId pid(std::size_t i) { return ProcessId{static_cast<std::uint32_t>(i + 1)}; }

class Explorer {
 public:
  explicit Explorer(const ExploreParams& params) : p_(params) {
    for (std::size_t i = 0; i < p_.procs; ++i) members_.push_back(pid(i));
    std::uint64_t seq = 1;
    for (std::size_t i = 0; i <= p_.cmds; ++i) {
      if (p_.stop_at && *p_.stop_at == i) proposals_.push_back(make_stop_sign(1, members_));
      if (i < p_.cmds) proposals_.push_back(Command{1, seq++, "op"});
    }
  }

  ExploreResult run() {
    World w;
    w.nodes.resize(p_.procs);
    w.links.resize(p_.procs * p_.procs);
    for (std::size_t i = 0; i < p_.procs; ++i) {
      Replica r(config_for(i));
      w.nodes[i].disk = r.initial_state();
      w.nodes[i].replica = std::move(r);
    }
    initial_ = w;
    dfs(w, 0, 0);
    if (result_.counterexample) {
      result_.status = ExploreStatus::violation;
    } else if (budget_hit_) {
      result_.status = ExploreStatus::budget_exceeded;
    }
    return std::move(result_);
  }

 private:
  ReplicaConfig config_for(std::size_t i) const {
    return ReplicaConfig{0, members_, pid(i), p_.append_mode, 0, p_.mutation};
  }

  std::uint64_t hash(const World& w) {
    auto& wr = scratch_;
    wr.clear();
    for (const auto& n : w.nodes) {
      wr.u8(n.replica ? 1 : 0);
      if (n.replica) n.replica->encode_state(wr);
      encode(wr, n.disk);
      wr.u64(n.notified ? n.notified->ballot.value : 0);
      wr.u64(n.delivered);
    }
    for (const auto& q : w.links) {
      wr.u32(static_cast<std::uint32_t>(q.size()));
      for (const auto& m : q) encode(wr, m);
    }
    wr.u64(w.leader ? w.leader->ballot.value : 0);
    wr.u64(w.elections);
    wr.u64(w.crashes);
    wr.u64(w.drops);
    wr.u64(w.next_proposal);
    for (const auto& e : w.agreed) {
      wr.u8(e ? 1 : 0);
      if (e) encode(wr, *e);
    }
    return std::hash<std::string_view>{}(wr.str());
  }

  /// Dense index of an event, for sleep-set bitmasks (at most 60 for 5 processes).
  unsigned bit(const Event& e) const {
    auto n = p_.procs;
    switch (e.kind) {
      case EventKind::deliver: return static_cast<unsigned>(e.a * n + e.b);
      case EventKind::notify: return static_cast<unsigned>(n * n + e.a);
      case EventKind::propose: return static_cast<unsigned>(n * n + n + e.a);
      case EventKind::elect: return static_cast<unsigned>(n * n + 2 * n + e.a);
      case EventKind::crash: return static_cast<unsigned>(n * n + 3 * n + e.a);
      case EventKind::recover: return static_cast<unsigned>(n * n + 4 * n + e.a);
      case EventKind::drop: break;
    }
    // pairs i<j in row-major order
    std::size_t k = 0;
    for (std::size_t i = 0; i < e.a; ++i) k += n - 1 - i;
    return static_cast<unsigned>(n * n + 5 * n + k + (e.b - e.a - 1));
  }

  /// Conservative independence: events touching different nodes commute.
  /// Faults touch every node and are dependent with everything; elections
  /// change what notify does; proposals share the proposal cursor.
  static bool independent(const Event& x, const Event& y) {
    auto global = [](EventKind k) {
      return k == EventKind::crash || k == EventKind::recover || k == EventKind::drop;
    };
    if (global(x.kind) || global(y.kind)) return false;
    if (x.kind == EventKind::elect || y.kind == EventKind::elect) {
      auto other = x.kind == EventKind::elect ? y.kind : x.kind;
      return other == EventKind::deliver || other == EventKind::propose;
    }
    if (x.kind == EventKind::propose && y.kind == EventKind::propose) return false;
    auto node = [](const Event& e) { return e.kind == EventKind::deliver ? e.b : e.a; };
    return node(x) != node(y);
  }

  std::vector<Event> enabled(const World& w) const {
    std::vector<Event> out;
    auto n = p_.procs;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (!w.links[i * n + j].empty()) out.push_back({EventKind::deliver, i, j});
      }
    }
    if (w.leader) {
      for (std::size_t q = 0; q < n; ++q) {
        const auto& node = w.nodes[q];
        if (!node.replica) continue;
        if (node.notified != w.leader ||
            node.replica->wants_prepare(w.leader->leader, w.leader->ballot)) {
          out.push_back({EventKind::notify, q, 0});
        }
      }
    }
    if (w.next_proposal < proposals_.size()) {
      for (std::size_t q = 0; q < n; ++q) {
        const auto& node = w.nodes[q];
        if (node.replica && node.replica->role() == Role::leader) {
          out.push_back({EventKind::propose, q, 0});
        }
      }
    }
    if (w.elections < p_.elections) {
      for (std::size_t q = 0; q < n; ++q) {
        if (w.nodes[q].replica) out.push_back({EventKind::elect, q, 0});
      }
    }
    for (std::size_t q = 0; q < n; ++q) {
      if (!w.nodes[q].replica) {
        out.push_back({EventKind::recover, q, 0});
      } else if (w.crashes < p_.crashes) {
        out.push_back({EventKind::crash, q, 0});
      }
    }
    if (w.drops < p_.drops) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          if (w.nodes[i].replica && w.nodes[j].replica) out.push_back({EventKind::drop, i, j});
        }
      }
    }
    return out;
  }

  std::string describe(const World& w, const Event& e) const {
    auto n = p_.procs;
    switch (e.kind) {
      case EventKind::deliver:
        return "deliver " + to_string(pid(e.a)) + "->" + to_string(pid(e.b)) + " " +
               to_string(w.links[e.a * n + e.b].front());
      case EventKind::notify:
        return "leader " + to_string(w.leader->leader) + " b=" +
               std::to_string(w.leader->ballot.value) + " at " + to_string(pid(e.a));
      case EventKind::elect:
        return "elect " + to_string(pid(e.a));
      case EventKind::propose:
        return "propose " + to_string(proposals_[w.next_proposal]) + " at " + to_string(pid(e.a));
      case EventKind::crash:
        return "crash " + to_string(pid(e.a));
      case EventKind::recover:
        return "recover " + to_string(pid(e.a));
      case EventKind::drop:
        return "drop " + to_string(pid(e.a)) + "-" + to_string(pid(e.b));
    }
    return "?";
  }

  bool proposed(const World& w, const LogEntry& e) const {
    for (std::size_t i = 0; i < w.next_proposal; ++i) {
      if (proposals_[i] == e) return true;
    }
    return false;
  }

  /// Executes a transition's outputs at node q and checks the invariants
  /// that can be judged at this point.
  std::optional<Bad> apply(World& w, std::size_t q, Outputs out,
                           const Prepare* answering = nullptr) const {
    auto n = p_.procs;
    auto& node = w.nodes[q];
    for (auto& action : out.actions) {
      if (auto* pa = std::get_if<PersistAction>(&action)) {
        if (const auto* pr = std::get_if<PromisePersist>(&pa->record);
            p_.check_persistence && pr && pr->n < node.disk.n_prom) {
          return Bad{"persist-order", to_string(pid(q)) + " lowered n_prom from " +
                                          to_string(node.disk.n_prom) + " to " + to_string(pr->n)};
        }
        apply_record(node.disk, pa->record);
      } else if (auto* sa = std::get_if<SendAction>(&action)) {
        auto to = static_cast<std::size_t>(sa->to.id - 1);
        if (p_.check_persistence) {
          if (const auto* pr = std::get_if<Promise>(&sa->body); pr && node.disk.n_prom != pr->n) {
            return Bad{"persist-order", to_string(pid(q)) + " promised " + to_string(pr->n) +
                                            " with n_prom " + to_string(node.disk.n_prom) +
                                            " on disk"};
          }
          if (const auto* ac = std::get_if<Accepted>(&sa->body);
              ac && (node.disk.n_a != ac->n || node.disk.v_a.length() < ac->la)) {
            return Bad{"persist-order", to_string(pid(q)) + " acknowledged la=" +
                                            std::to_string(ac->la) + " before persisting it"};
          }
        }
        if (const auto* pr = std::get_if<Promise>(&sa->body); pr && answering &&
                                                               pr->n == answering->n &&
                                                               pr->na < answering->na &&
                                                               !pr->suffix.empty()) {
          return Bad{"stale-suffix", to_string(pid(q)) + " shipped " +
                                         std::to_string(pr->suffix.size()) +
                                         " entries accepted in " + to_string(pr->na) +
                                         " to a leader that accepted in " +
                                         to_string(answering->na)};
        }
        if (to != q && w.nodes[to].replica) w.links[q * n + to].push_back(std::move(sa->body));
      } else {
        const auto& d = std::get<DeliverAction>(action);
        if (d.index != node.delivered) {
          return Bad{"SC3", to_string(pid(q)) + " delivered g=" + std::to_string(d.index) +
                                " after " + std::to_string(node.delivered) + " entries"};
        }
        if (p_.check_persistence && node.disk.l_d < d.index + 1) {
          return Bad{"persist-order", to_string(pid(q)) + " delivered g=" +
                                          std::to_string(d.index) + " before persisting l_d"};
        }
        ++node.delivered;
        if (!proposed(w, d.entry)) {
          return Bad{"SC1", to_string(pid(q)) + " decided unproposed " + to_string(d.entry)};
        }
        // Judged in both directions so the verdict does not depend on which
        // of two commuting decides ran first.
        for (std::size_t g = 0; g < w.agreed.size(); ++g) {
          if (!w.agreed[g]) continue;
          if (g < d.index && is_stop(*w.agreed[g])) {
            return Bad{"stop-finality", to_string(pid(q)) + " decided " + to_string(d.entry) +
                                            " at g=" + std::to_string(d.index) +
                                            " after the stop-sign at g=" + std::to_string(g)};
          }
          if (g > d.index && is_stop(d.entry)) {
            return Bad{"stop-finality", to_string(pid(q)) + " decided the stop-sign at g=" +
                                            std::to_string(d.index) + " below " +
                                            to_string(*w.agreed[g]) + " at g=" +
                                            std::to_string(g)};
          }
        }
        if (p_.append_mode == AppendMode::dedup && !is_stop(d.entry)) {
          for (std::size_t g = 0; g < w.agreed.size(); ++g) {
            if (g != d.index && w.agreed[g] && *w.agreed[g] == d.entry) {
              return Bad{"dedup", to_string(d.entry) + " decided at g=" + std::to_string(g) +
                                      " and g=" + std::to_string(d.index)};
            }
          }
        }
        if (w.agreed.size() <= d.index) w.agreed.resize(d.index + 1);
        auto& slot = w.agreed[d.index];
        if (!slot) {
          slot = d.entry;
        } else if (!(*slot == d.entry) || is_stop(*slot) != is_stop(d.entry)) {
          return Bad{"SC2", to_string(pid(q)) + " decided " + to_string(d.entry) + " at g=" +
                                std::to_string(d.index) + " where " + to_string(*slot) +
                                " was decided"};
        }
      }
    }
    return std::nullopt;
  }

  std::optional<Bad> lost_connection(World& w, std::size_t at, std::size_t peer) const {
    if (!w.nodes[at].replica) return std::nullopt;
    return apply(w, at, w.nodes[at].replica->on_connection_lost(pid(peer)));
  }

  std::optional<Bad> step(World& w, const Event& e) const {
    auto n = p_.procs;
    try {
      switch (e.kind) {
        case EventKind::deliver: {
          auto& q = w.links[e.a * n + e.b];
          auto body = std::move(q.front());
          q.erase(q.begin());
          auto& node = w.nodes[e.b];
          auto out = node.replica->on_message(pid(e.a), body);
          return apply(w, e.b, std::move(out), std::get_if<Prepare>(&body));
        }
        case EventKind::notify: {
          auto& node = w.nodes[e.a];
          node.notified = w.leader;
          return apply(w, e.a, node.replica->on_leader(w.leader->leader, w.leader->ballot));
        }
        case EventKind::elect:
          ++w.elections;
          w.leader = LeaderEvent{pid(e.a), ballot_make(w.elections, pid(e.a))};
          return std::nullopt;
        case EventKind::propose: {
          const auto& entry = proposals_[w.next_proposal++];
          return apply(w, e.a, w.nodes[e.a].replica->on_propose(entry));
        }
        case EventKind::crash: {
          ++w.crashes;
          auto& node = w.nodes[e.a];
          node.replica.reset();
          node.notified.reset();
          for (std::size_t j = 0; j < n; ++j) {
            w.links[e.a * n + j].clear();
            w.links[j * n + e.a].clear();
          }
          for (std::size_t j = 0; j < n; ++j) {
            if (j == e.a) continue;
            if (auto bad = lost_connection(w, j, e.a)) return bad;
          }
          return std::nullopt;
        }
        case EventKind::recover: {
          auto& node = w.nodes[e.a];
          if (node.disk.l_d < node.delivered) {
            return Bad{"SC3", to_string(pid(e.a)) + " recovered with l_d=" +
                                  std::to_string(node.disk.l_d) + " after delivering " +
                                  std::to_string(node.delivered)};
          }
          node.replica = Replica::recover(config_for(e.a), node.disk);
          node.delivered = node.disk.l_d;
          return std::nullopt;
        }
        case EventKind::drop: {
          ++w.drops;
          w.links[e.a * n + e.b].clear();
          w.links[e.b * n + e.a].clear();
          if (auto bad = lost_connection(w, e.a, e.b)) return bad;
          return lost_connection(w, e.b, e.a);
        }
      }
    } catch (const std::exception& ex) {
      return Bad{"exception", ex.what()};
    }
    return std::nullopt;
  }

  /// Descriptions of the events on the current path, rebuilt by replaying it
  /// from the initial world so the search itself never formats strings.
  std::vector<std::string> replay_schedule() const {
    std::vector<std::string> out;
    World w = initial_;
    for (const auto& e : path_) {
      out.push_back(describe(w, e));
      step(w, e);
    }
    return out;
  }

  /// Depth-bounded DFS with sleep sets. A state is skipped when an earlier
  /// visit reached it at no greater depth with a sleep set contained in ours,
  /// since that visit explored a superset of what we would.
  bool dfs(const World& w, std::size_t depth, std::uint64_t sleep) {
    auto h = hash(w);
    auto [it, inserted] = visited_.try_emplace(h, Visit{depth, sleep});
    if (!inserted) {
      if (it->second.depth <= depth && (it->second.sleep & ~sleep) == 0) return false;
      it->second = Visit{depth, sleep};
    } else {
      ++result_.states;
    }
    if (result_.states > p_.max_states) {
      budget_hit_ = true;
      return false;
    }
    if (depth == p_.depth) {
      ++result_.depth_cutoffs;
      return false;
    }
    auto events = enabled(w);
    if (depth == 0) {
      // Processes are interchangeable in the initial state: ballots differ in
      // their sequence number before the id breaks ties, so it is enough to
      // start every schedule at p1.
      std::erase_if(events, [](const Event& e) {
        return e.a != 0 || (e.kind == EventKind::drop && e.b != 1);
      });
    }
    std::vector<Event> done;
    for (const auto& e : events) {
      if (sleep >> bit(e) & 1) continue;
      std::uint64_t child_sleep = 0;
      for (const auto& t : events) {
        if (!((sleep >> bit(t) & 1) || std::find_if(done.begin(), done.end(), [&](const Event& d) {
                                          return d.kind == t.kind && d.a == t.a && d.b == t.b;
                                        }) != done.end())) {
          continue;
        }
        if (independent(t, e)) child_sleep |= std::uint64_t{1} << bit(t);
      }
      World next = w;
      path_.push_back(e);
      ++result_.transitions;
      if (auto bad = step(next, e)) {
        result_.counterexample = Counterexample{bad->property, bad->detail, replay_schedule()};
        return true;
      }
      if (dfs(next, depth + 1, child_sleep)) return true;
      path_.pop_back();
      if (budget_hit_) return false;
      done.push_back(e);
    }
    return false;
  }

  struct Visit {
    std::size_t depth;
    std::uint64_t sleep;
  };

  ExploreParams p_;
  std::vector<ProcessId> members_;
  std::vector<LogEntry> proposals_;
  std::unordered_map<std::uint64_t, Visit> visited_;
  Writer scratch_;
  World initial_;
  std::vector<Event> path_;
  ExploreResult result_;
  bool budget_hit_ = false;
};

}  // namespace

const char* to_string(ExploreStatus s) {
  switch (s) {
    case ExploreStatus::pass: return "pass";
    case ExploreStatus::violation: return "violation";
    case ExploreStatus::budget_exceeded: return "budget-exceeded";
  }
  return "?";
}

ExploreResult explore(const ExploreParams& params) {
  if (params.procs == 0 || params.procs >= kBallotCap) {
    throw std::invalid_argument("explore: procs out of range");
  }
  return Explorer(params).run();
}

std::string render_result(const ExploreParams& params, const ExploreResult& result) {
  std::ostringstream out;
  out << "explore procs=" << params.procs << " cmds=" << params.cmds
      << " crashes=" << params.crashes << " drops=" << params.drops
      << " elections=" << params.elections << " depth=" << params.depth
      << " mutation=" << to_string(params.mutation) << "\n";
  out << "verdict " << to_string(result.status) << "\n";
  out << "states " << result.states << "\n";
  out << "transitions " << result.transitions << "\n";
  out << "depth_cutoffs " << result.depth_cutoffs << "\n";
  if (result.counterexample) {
    const auto& c = *result.counterexample;
    out << "violation " << c.property << ": " << c.detail << "\n";
    for (std::size_t i = 0; i < c.schedule.size(); ++i) {
      out << "  " << i + 1 << ". " << c.schedule[i] << "\n";
    }
  }
  return out.str();
}

}  // namespace seqpaxos
