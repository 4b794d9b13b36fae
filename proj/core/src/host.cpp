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

#include "seqpaxos/host.hpp"

#include <algorithm>

#include "seqpaxos/codec.hpp"

namespace seqpaxos {
namespace {

bool contains(const std::vector<ProcessId>& v, ProcessId p) {
  return std::find(v.begin(), v.end(), p) != v.end();
}

RsmSnapshot state_at(const KvStore& rsm) {
  return RsmSnapshot{0, rsm.applied(), rsm.kv(), rsm.clients()};
}

}  // namespace

const char* to_string(TimerKind k) {
  switch (k) {
    case TimerKind::ble: return "ble";
    case TimerKind::buffer: return "buffer";
    case TimerKind::fetch: return "fetch";
  }
  return "?";
}

ProcessHost::ProcessHost(ProcessId self, HostOptions opts, Environment& env)
    : self_(self), opts_(opts), env_(env) {}

const Instance* ProcessHost::instance(ConfigId c) const {
  auto it = instances_.find(c);
  return it == instances_.end() ? nullptr : &it->second;
}

Instance ProcessHost::make_instance(ConfigId c, std::vector<ProcessId> members, Replica replica,
                                    RsmSnapshot base, Ballot seed) {
  auto floor = replica.v_a().offset();
  return Instance{c,
                  members,
                  std::move(replica),
                  BallotLeaderElection(self_, members, opts_.delta, seed),
                  KvStore::from_snapshot(base),
                  SnapshotLedger(members, floor),
                  base,
                  base,
                  std::nullopt,
                  0,
                  std::nullopt,
                  0,
                  {}};
}

void ProcessHost::boot(const std::vector<ProcessId>& initial_members) {
  if (contains(initial_members, self_)) {
    start_instance(0, initial_members, 0, RsmSnapshot{}, nullptr);
  }
}

Instance& ProcessHost::start_instance(ConfigId c, std::vector<ProcessId> members,
                                      std::uint64_t sigma_len, RsmSnapshot base,
                                      const StateChunk* chunk) {
  std::sort(members.begin(), members.end());
  ReplicaConfig cfg{c, members, self_, opts_.append_mode, sigma_len, opts_.mutation};
  Replica replica(cfg);
  auto state = replica.initial_state();
  SnapshotImage image{encode_snapshot(base), sigma_len};
  state.snapshot = image;
  state.base = image;
  env_.storage(self_, c).persist(InitRecord{state});

  auto& inst =
      instances_.insert_or_assign(c, make_instance(c, members, std::move(replica), base, Ballot{}))
          .first->second;
  if (!active_ || c > *active_) active_ = c;
  env_.on_instance_start(self_, c, sigma_len, chunk);
  arm_ble(inst);
  replay_buffered(c);
  return inst;
}

void ProcessHost::recover() {
  auto configs = env_.stored_configs(self_);
  std::sort(configs.begin(), configs.end());
  for (auto c : configs) {
    auto st = env_.storage(self_, c).load();
    if (!st) continue;
    ReplicaConfig cfg{c, st->members, self_, opts_.append_mode, st->sigma_len, opts_.mutation};
    auto replica = Replica::recover(cfg, *st);
    RsmSnapshot base = st->base ? decode_snapshot(st->base->blob) : RsmSnapshot{};
    RsmSnapshot snap = st->snapshot ? decode_snapshot(st->snapshot->blob) : base;
    auto& inst = instances_
                     .insert_or_assign(c, make_instance(c, st->members, std::move(replica), base,
                                                        st->n_prom.ballot))
                     .first->second;
    inst.snapshot = snap;
    inst.rsm = KvStore::from_snapshot(snap);
    if (snap.l_k > st->sigma_len && snap.id > 0) {
      inst.pending_marker = make_marker_command(SnapshotMarker{self_, snap.id, snap.l_k});
    }
    for (auto g = snap.l_k; g < st->l_d; ++g) {
      const auto& e = inst.replica.v_a().at(g);
      inst.rsm.apply(e, g);
      if (auto m = as_marker(e)) {
        inst.ledger.on_snapshot_decided(m->replica, m->k, m->l_k);
        if (inst.pending_marker && m->replica == self_ && m->k == inst.pending_marker->seq) {
          inst.pending_marker.reset();
        }
      } else if (const auto* ss = std::get_if<StopSign>(&e)) {
        inst.stop = *ss;
        inst.stop_index = g;
      }
    }
    if (!active_ || c > *active_) active_ = c;
    env_.on_instance_recover(self_, c, *st);
  }
  for (auto& [c, inst] : instances_) arm_ble(inst);
  std::vector<ConfigId> stopped;
  for (const auto& [c, inst] : instances_) {
    if (inst.stop) stopped.push_back(c);
  }
  for (auto c : stopped) {
    auto& inst = instances_.at(c);
    const auto& ss = *inst.stop;
    if (contains(ss.processes, self_) && !instances_.count(ss.next_config) &&
        !removed_.count(ss.next_config)) {
      start_instance(ss.next_config, ss.processes, inst.stop_index + 1, state_at(inst.rsm), nullptr);
    }
  }
}

void ProcessHost::arm_ble(Instance& inst) {
  env_.set_timer(self_, TimerKind::ble, inst.config, inst.ble.delay());
}

void ProcessHost::execute(Instance& inst, Outputs out) {
  for (auto& action : out.actions) {
    if (auto* p = std::get_if<PersistAction>(&action)) {
      env_.storage(self_, inst.config).persist(p->record);
    } else if (auto* s = std::get_if<SendAction>(&action)) {
      env_.send(Message{self_, s->to, inst.config, std::move(s->body)});
    } else {
      auto& d = std::get<DeliverAction>(action);
      handle_deliver(inst, d.index, d.entry);
    }
  }
  inst.ble.observe_ballot(inst.replica.n_prom().ballot);
}

void ProcessHost::handle_deliver(Instance& inst, std::uint64_t g, const LogEntry& e) {
  auto result = inst.rsm.apply(e, g);
  env_.on_deliver(self_, inst.config, g, e, result);
  if (auto m = as_marker(e)) {
    if (inst.pending_marker && m->replica == self_ && m->k == inst.pending_marker->seq) {
      inst.pending_marker.reset();
    }
    if (opts_.snapshot_every > 0) {
      if (auto t = inst.ledger.on_snapshot_decided(m->replica, m->k, m->l_k)) {
        env_.on_note(self_, inst.config, "truncate", "to=" + std::to_string(*t));
        execute(inst, inst.replica.truncate(*t));
      }
    }
  }
  if (const auto* ss = std::get_if<StopSign>(&e)) {
    handle_stop(inst, g, *ss);
  } else {
    maybe_snapshot(inst);
  }
}

void ProcessHost::maybe_snapshot(Instance& inst) {
  if (opts_.snapshot_every == 0 || inst.stop) return;
  if (inst.rsm.applied() % opts_.snapshot_every != 0) return;
  auto snap = inst.rsm.take_snapshot(inst.rsm.applied());
  env_.storage(self_, inst.config).persist(SnapshotPersist{{encode_snapshot(snap), snap.l_k}});
  inst.snapshot = snap;
  inst.pending_marker = make_marker_command(SnapshotMarker{self_, snap.id, snap.l_k});
  submit_marker(inst);
}

void ProcessHost::submit_marker(Instance& inst) {
  if (!inst.pending_marker) return;
  inst.marker_sent = env_.now();
  const auto& leader = inst.ble.leader();
  if (!leader) return;
  env_.on_propose(self_, inst.config, *inst.pending_marker);
  if (leader->leader == self_) {
    execute(inst, inst.replica.on_propose(*inst.pending_marker));
  } else {
    env_.forward(self_, leader->leader, inst.config, *inst.pending_marker);
  }
}

void ProcessHost::handle_stop(Instance& inst, std::uint64_t g, const StopSign& ss) {
  inst.stop = ss;
  inst.stop_index = g;
  auto sigma_len = g + 1;
  env_.on_note(self_, inst.config, "stop", to_string(ss) + " len=" + std::to_string(sigma_len));
  auto next = ss.next_config;
  if (contains(ss.processes, self_)) {
    inst.confirmations.insert(self_);
    if (!instances_.count(next) && !removed_.count(next)) {
      start_instance(next, ss.processes, sigma_len, state_at(inst.rsm), nullptr);
    }
  }
  std::set<ProcessId> audience(inst.members.begin(), inst.members.end());
  audience.insert(ss.processes.begin(), ss.processes.end());
  audience.erase(self_);
  for (auto q : audience) env_.send(Message{self_, q, next, StateOffer{next, sigma_len}});
}

void ProcessHost::on_ble_timeout(Instance& inst) {
  auto step = inst.ble.on_timeout();
  for (auto& [to, body] : step.sends) env_.send(Message{self_, to, inst.config, std::move(body)});
  if (step.leader) {
    env_.on_leader(self_, inst.config, *step.leader);
    execute(inst, inst.replica.on_leader(step.leader->leader, step.leader->ballot));
  } else if (const auto& l = inst.ble.leader();
             l && inst.replica.wants_prepare(l->leader, l->ballot)) {
    execute(inst, inst.replica.on_leader(l->leader, l->ballot));
  }
  if (inst.pending_marker && env_.now() >= inst.marker_sent + opts_.marker_retry) {
    submit_marker(inst);
  }
  env_.set_timer(self_, TimerKind::ble, inst.config, step.next_timeout);
}

void ProcessHost::on_timer(TimerKind kind, ConfigId c) {
  switch (kind) {
    case TimerKind::ble:
      if (auto it = instances_.find(c); it != instances_.end()) on_ble_timeout(it->second);
      break;
    case TimerKind::buffer:
      pending_[c].buffer_armed = false;
      if (!instances_.count(c)) request_state(c);
      break;
    case TimerKind::fetch:
      pending_[c].fetch_armed = false;
      if (!instances_.count(c)) request_state(c);
      break;
  }
}

void ProcessHost::on_message(const Message& m) {
  if (std::holds_alternative<StateOffer>(m.body) || std::holds_alternative<StateRequest>(m.body) ||
      std::holds_alternative<StateChunk>(m.body)) {
    handle_state_message(m);
    return;
  }
  auto it = instances_.find(m.config);
  if (it == instances_.end()) {
    if (!removed_.count(m.config) && (!active_ || m.config > *active_)) buffer(m);
    return;
  }
  auto& inst = it->second;
  if (const auto* hb = std::get_if<HeartbeatRequest>(&m.body)) {
    auto reply = inst.ble.on_heartbeat_request(m.from, hb->round, hb->max_ballot);
    env_.send(Message{self_, m.from, m.config, reply});
    return;
  }
  if (const auto* hb = std::get_if<HeartbeatReply>(&m.body)) {
    inst.ble.on_heartbeat_reply(m.from, hb->round, hb->ballot);
    return;
  }
  execute(inst, inst.replica.on_message(m.from, m.body));
}

void ProcessHost::buffer(const Message& m) {
  auto& p = pending_[m.config];
  // Heartbeats only show who runs the configuration. Replaying them later
  // would answer long-closed rounds and inflate the senders' BLE delay.
  bool heartbeat = std::holds_alternative<HeartbeatRequest>(m.body) ||
                   std::holds_alternative<HeartbeatReply>(m.body);
  if (!heartbeat && p.messages.size() < opts_.buffer_limit) p.messages.push_back(m);
  if (!contains(p.holders, m.from)) p.holders.push_back(m.from);
  if (!p.buffer_armed && !p.fetch_armed) {
    p.buffer_armed = true;
    env_.set_timer(self_, TimerKind::buffer, m.config, opts_.buffer_window);
  }
}

void ProcessHost::request_state(ConfigId c) {
  auto& p = pending_[c];
  if (p.holders.empty()) return;
  auto to = p.holders[p.next_holder++ % p.holders.size()];
  env_.on_note(self_, c, "fetch", "request from " + to_string(to));
  env_.send(Message{self_, to, c, StateRequest{c}});
  if (!p.fetch_armed) {
    p.fetch_armed = true;
    env_.set_timer(self_, TimerKind::fetch, c, opts_.fetch_retry);
  }
}

void ProcessHost::replay_buffered(ConfigId c) {
  auto it = pending_.find(c);
  if (it == pending_.end()) return;
  auto msgs = std::move(it->second.messages);
  pending_.erase(it);
  for (const auto& m : msgs) on_message(m);
}

std::optional<StateChunk> ProcessHost::build_chunk(ConfigId c) const {
  if (c >= 1) {
    if (const auto* prev = instance(c - 1); prev && prev->stop && prev->stop->next_config == c) {
      const RsmSnapshot& s = prev->snapshot ? *prev->snapshot : prev->base;
      auto sigma_len = prev->stop_index + 1;
      auto suffix = prev->replica.v_a().suffix(s.l_k);
      suffix.resize(sigma_len - s.l_k);
      return StateChunk{c, *prev->stop, sigma_len, encode_snapshot(s), s.l_k, std::move(suffix)};
    }
  }
  if (const auto* inst = instance(c)) {
    return StateChunk{c, make_stop_sign(c, inst->members), inst->base.l_k,
                      encode_snapshot(inst->base), inst->base.l_k, {}};
  }
  return std::nullopt;
}

void ProcessHost::handle_state_message(const Message& m) {
  if (const auto* offer = std::get_if<StateOffer>(&m.body)) {
    auto c = offer->config;
    if (c >= 1) {
      if (auto it = instances_.find(c - 1); it != instances_.end()) {
        it->second.confirmations.insert(m.from);
        return;  // the stop-sign reaches us through our own instance
      }
    }
    if (instances_.count(c) || removed_.count(c) || (active_ && c <= *active_)) return;
    auto& p = pending_[c];
    if (!contains(p.holders, m.from)) p.holders.push_back(m.from);
    if (!p.fetch_armed && !p.buffer_armed) request_state(c);
    return;
  }
  if (const auto* req = std::get_if<StateRequest>(&m.body)) {
    if (auto chunk = build_chunk(req->config)) {
      env_.on_note(self_, req->config, "fetch", "serve " + to_string(m.from));
      env_.send(Message{self_, m.from, req->config, std::move(*chunk)});
    }
    return;
  }
  const auto& chunk = std::get<StateChunk>(m.body);
  auto c = chunk.config;
  if (instances_.count(c) || removed_.count(c) || (active_ && c <= *active_)) return;
  if (!contains(chunk.stop.processes, self_)) return;
  RsmSnapshot snap;
  try {
    snap = decode_snapshot(chunk.snapshot);
  } catch (const DecodeError& e) {
    env_.on_note(self_, c, "fetch", std::string("undecodable snapshot: ") + e.what());
    return;
  }
  if (snap.l_k != chunk.snapshot_at || chunk.snapshot_at > chunk.sigma_len ||
      chunk.suffix.size() != chunk.sigma_len - chunk.snapshot_at) {
    env_.on_note(self_, c, "fetch", "inconsistent state chunk from " + to_string(m.from));
    return;
  }
  auto rsm = KvStore::restore(snap, chunk.suffix, chunk.snapshot_at);
  start_instance(c, chunk.stop.processes, chunk.sigma_len, state_at(rsm), &chunk);
  env_.send(Message{self_, m.from, c, StateOffer{c, chunk.sigma_len}});
}

void ProcessHost::on_client_propose(const LogEntry& e) {
  if (!active_) return;
  auto& inst = instances_.at(*active_);
  execute(inst, inst.replica.on_propose(e));
}

void ProcessHost::on_propose_to(ConfigId config, const LogEntry& e) {
  auto it = instances_.find(config);
  if (it == instances_.end()) return;
  execute(it->second, it->second.replica.on_propose(e));
}

void ProcessHost::on_connection_lost(ProcessId peer) {
  for (auto& [c, inst] : instances_) execute(inst, inst.replica.on_connection_lost(peer));
}

std::string ProcessHost::cleanup(ConfigId config) {
  auto it = instances_.find(config);
  if (it == instances_.end()) return "no instance for c" + std::to_string(config);
  if (active_ && *active_ == config) return "c" + std::to_string(config) + " is active";
  const auto& inst = it->second;
  if (!inst.stop) return "c" + std::to_string(config) + " has not stopped";
  bool confirmed = std::any_of(inst.confirmations.begin(), inst.confirmations.end(),
                               [&](ProcessId p) { return contains(inst.stop->processes, p); });
  if (!confirmed) return "no confirmed transfer of c" + std::to_string(config) + " final state";
  instances_.erase(it);
  removed_.insert(config);
  env_.remove_storage(self_, config);
  return {};
}

std::uint64_t ProcessHost::digest() const {
  Fnv1a h;
  h.add_u64(active_ ? *active_ + 1 : 0);
  for (const auto& [c, inst] : instances_) {
    inst.replica.digest_into(h);
    h.add_u64(inst.ble.leader() ? inst.ble.leader()->ballot.value : 0);
    h.add_u64(inst.rsm.applied());
  }
  return h.value();
}

}  // namespace seqpaxos
