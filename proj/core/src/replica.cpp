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

#include "seqpaxos/replica.hpp"

#include <algorithm>

#include "seqpaxos/codec.hpp"

namespace seqpaxos {

const char* to_string(Role r) { return r == Role::leader ? "leader" : "follower"; }

const char* to_string(Phase p) {
  switch (p) {
    case Phase::none: return "none";
    case Phase::prepare: return "prepare";
    case Phase::accept: return "accept";
    case Phase::recover: return "recover";
  }
  return "?";
}

const char* to_string(Mutation m) {
  switch (m) {
    case Mutation::none: return "none";
    case Mutation::skip_promise_persist: return "skip-promise-persist";
    case Mutation::accept_lower_round: return "accept-lower-round";
    case Mutation::skip_stale_guard: return "skip-stale-guard";
    case Mutation::extend_past_stop: return "extend-past-stop";
  }
  return "?";
}

Replica::Replica(ReplicaConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.members.empty()) throw std::invalid_argument("replica: empty membership");
  std::sort(cfg_.members.begin(), cfg_.members.end());
  if (!is_member(cfg_.self)) {
    throw std::invalid_argument("replica: " + seqpaxos::to_string(cfg_.self) +
                                " is not a member of c" + std::to_string(cfg_.config));
  }
  n_l_ = n_prom_ = n_a_ = Round{cfg_.config, Ballot{0}};
  v_a_ = Log(cfg_.sigma_len);
  l_d_ = l_c_ = cfg_.sigma_len;
  for (auto p : cfg_.members) las_[p] = cfg_.sigma_len;
}

Replica Replica::recover(ReplicaConfig cfg, const PersistentState& persisted) {
  cfg.sigma_len = persisted.sigma_len;
  Replica r(std::move(cfg));
  r.n_prom_ = persisted.n_prom;
  r.n_a_ = persisted.n_a;
  r.v_a_ = persisted.v_a;
  r.l_d_ = persisted.l_d;
  r.l_c_ = persisted.sigma_len;
  r.phase_ = Phase::recover;
  return r;
}

PersistentState Replica::initial_state() const {
  PersistentState s;
  s.config = cfg_.config;
  s.members = cfg_.members;
  s.sigma_len = cfg_.sigma_len;
  s.n_prom = n_prom_;
  s.n_a = n_a_;
  s.v_a = v_a_;
  s.l_d = l_d_;
  return s;
}

bool Replica::is_member(ProcessId p) const {
  return std::binary_search(cfg_.members.begin(), cfg_.members.end(), p);
}

void Replica::send(Outputs& out, ProcessId to, MessageBody body) const {
  out.actions.emplace_back(SendAction{to, std::move(body)});
}

void Replica::persist(Outputs& out, PersistRecord rec) const {
  out.actions.emplace_back(PersistAction{std::move(rec)});
}

bool Replica::wants_prepare(ProcessId leader, Ballot b) const {
  if (leader == cfg_.self || role_ == Role::leader) return false;
  return phase_ == Phase::recover || round_of(b) > n_prom_;
}

Outputs Replica::on_leader(ProcessId leader, Ballot b) {
  Outputs out;
  leader_hint_ = leader;
  auto n = round_of(b);
  if (leader == cfg_.self && n > n_l_ && n > n_prom_) {
    n_l_ = n_prom_ = n;
    persist(out, PromisePersist{n});
    promises_.clear();
    promises_[cfg_.self] = PromiseRecord{ReplicaId{cfg_.config, cfg_.self}, n_a_, v_a_.suffix(l_d_)};
    for (auto& [p, l] : las_) l = cfg_.sigma_len;
    lds_.clear();
    lds_[cfg_.self] = l_d_;
    l_c_ = cfg_.sigma_len;
    role_ = Role::leader;
    phase_ = Phase::prepare;
    for (auto p : cfg_.members) {
      if (p != cfg_.self) send(out, p, Prepare{n_l_, l_d_, n_a_});
    }
    if (promises_.size() >= majority(cfg_.members.size())) adopt_majority(out);
    return out;
  }
  if (wants_prepare(leader, b)) send(out, leader, PrepareReq{});
  if (leader != cfg_.self && role_ == Role::leader) {
    role_ = Role::follower;
    prop_cmds_.clear();
  }
  return out;
}

Outputs Replica::on_message(ProcessId from, const MessageBody& body) {
  if (const auto* m = std::get_if<Prepare>(&body)) return on_prepare(from, *m);
  if (const auto* m = std::get_if<Promise>(&body)) return on_promise(from, *m);
  if (const auto* m = std::get_if<AcceptSync>(&body)) return on_accept_sync(from, *m);
  if (const auto* m = std::get_if<Accept>(&body)) return on_accept(from, *m);
  if (const auto* m = std::get_if<Accepted>(&body)) return on_accepted(from, *m);
  if (const auto* m = std::get_if<Decide>(&body)) return on_decide(from, *m);
  if (std::holds_alternative<PrepareReq>(body)) return on_prepare_req(from);
  return {};
}

Outputs Replica::on_prepare(ProcessId from, const Prepare& m) {
  Outputs out;
  if (!is_member(from)) return out;
  bool resync = m.n == n_prom_ && role_ == Role::follower && phase_ == Phase::recover;
  bool fresh = cfg_.mutation == Mutation::accept_lower_round ? m.n != n_prom_ : n_prom_ < m.n;
  if (!fresh && !resync) return out;
  n_prom_ = m.n;
  if (cfg_.mutation != Mutation::skip_promise_persist) persist(out, PromisePersist{m.n});
  role_ = Role::follower;
  phase_ = Phase::prepare;
  leader_hint_ = from;
  promises_.clear();
  prop_cmds_.clear();
  std::vector<LogEntry> sfx;
  if (n_a_ >= m.na || cfg_.mutation == Mutation::skip_stale_guard) sfx = v_a_.suffix(m.ld);
  send(out, from, Promise{m.n, n_a_, std::move(sfx), l_d_});
  return out;
}

Outputs Replica::on_promise(ProcessId from, const Promise& m) {
  Outputs out;
  if (role_ != Role::leader || m.n != n_l_ || !is_member(from)) return out;
  if (phase_ == Phase::prepare) {
    promises_[from] = PromiseRecord{ReplicaId{cfg_.config, from}, m.na, m.suffix};
    lds_[from] = m.ld;
    if (promises_.size() >= majority(cfg_.members.size())) adopt_majority(out);
  } else if (phase_ == Phase::accept) {
    lds_[from] = m.ld;
    send(out, from, AcceptSync{n_l_, v_a_.suffix(m.ld), m.ld});
    if (l_c_ != cfg_.sigma_len) send(out, from, Decide{l_c_, n_l_});
  }
  return out;
}

void Replica::adopt_majority(Outputs& out) {
  std::vector<PromiseRecord> ps;
  ps.reserve(promises_.size());
  for (const auto& [p, rec] : promises_) ps.push_back(rec);
  const auto& best = max_promise(ps);
  v_a_.truncate_back(l_d_);
  for (const auto& e : best.suffix) v_a_.append_raw(e);

  if (!v_a_.ends_with_stop()) {
    std::stable_partition(prop_cmds_.begin(), prop_cmds_.end(),
                          [](const LogEntry& e) { return !is_stop(e); });
    for (const auto& c : prop_cmds_) {
      if (v_a_.ends_with_stop()) break;
      v_a_.append(c, cfg_.append_mode);
    }
  }
  prop_cmds_.clear();

  n_a_ = n_l_;
  persist(out, AcceptSyncPersist{n_l_, l_d_, v_a_.suffix(l_d_)});
  las_[cfg_.self] = v_a_.length();
  phase_ = Phase::accept;
  for (const auto& [p, ld] : lds_) {
    if (p != cfg_.self) send(out, p, AcceptSync{n_l_, v_a_.suffix(ld), ld});
  }
  maybe_decide(out);
}

Outputs Replica::on_accept_sync(ProcessId, const AcceptSync& m) {
  Outputs out;
  if (role_ != Role::follower || phase_ != Phase::prepare || m.n != n_prom_) return out;
  if (m.ld > v_a_.length()) {
    throw ProtocolError("AcceptSync cut " + std::to_string(m.ld) + " beyond local log length " +
                        std::to_string(v_a_.length()));
  }
  v_a_.truncate_back(m.ld);
  for (const auto& e : m.suffix) v_a_.append_raw(e);
  n_a_ = m.n;
  persist(out, AcceptSyncPersist{m.n, m.ld, m.suffix});
  phase_ = Phase::accept;
  send(out, ballot_owner(m.n.ballot), Accepted{m.n, v_a_.length()});
  return out;
}

Outputs Replica::on_accept(ProcessId, const Accept& m) {
  Outputs out;
  if (role_ != Role::follower || phase_ != Phase::accept || m.n != n_prom_) return out;
  if (v_a_.ends_with_stop() && cfg_.mutation != Mutation::extend_past_stop) {
    throw LogStopped("Accept of " + seqpaxos::to_string(m.entry) + " after stop-sign");
  }
  v_a_.append_raw(m.entry);
  persist(out, AppendPersist{m.entry});
  send(out, ballot_owner(m.n.ballot), Accepted{m.n, v_a_.length()});
  return out;
}

Outputs Replica::on_accepted(ProcessId from, const Accepted& m) {
  Outputs out;
  if (role_ != Role::leader || phase_ != Phase::accept || m.n != n_l_ || !is_member(from)) {
    return out;
  }
  las_[from] = m.la;
  maybe_decide(out);
  return out;
}

void Replica::maybe_decide(Outputs& out) {
  std::vector<std::uint64_t> vals;
  vals.reserve(las_.size());
  for (const auto& [p, l] : las_) vals.push_back(l);
  std::sort(vals.begin(), vals.end(), std::greater<>());
  auto chosen = vals[majority(cfg_.members.size()) - 1];
  if (chosen <= l_c_) return;
  l_c_ = chosen;
  for (const auto& [p, ld] : lds_) {
    if (p != cfg_.self) send(out, p, Decide{l_c_, n_l_});
  }
  deliver_up_to(out, l_c_);
}

Outputs Replica::on_decide(ProcessId, const Decide& m) {
  Outputs out;
  if (role_ != Role::follower || phase_ != Phase::accept || m.n != n_prom_) return out;
  if (m.l > v_a_.length()) {
    throw ProtocolError("Decide " + std::to_string(m.l) + " beyond local log length " +
                        std::to_string(v_a_.length()));
  }
  deliver_up_to(out, m.l);
  return out;
}

void Replica::deliver_up_to(Outputs& out, std::uint64_t l) {
  if (l <= l_d_) return;
  persist(out, DecidePersist{l});
  for (auto g = l_d_; g < l; ++g) {
    const auto& e = v_a_.at(g);
    out.actions.emplace_back(DeliverAction{g, e});
    if (is_stop(e)) out.stopped = true;
  }
  l_d_ = l;
}

Outputs Replica::on_prepare_req(ProcessId from) {
  Outputs out;
  if (role_ != Role::leader || !is_member(from) || from == cfg_.self) return out;
  send(out, from, Prepare{n_l_, l_d_, n_a_});
  return out;
}

Outputs Replica::on_propose(const LogEntry& entry) {
  Outputs out;
  if (role_ != Role::leader) return out;
  bool past_stop = stopped();
  if (past_stop && cfg_.mutation != Mutation::extend_past_stop) return out;
  if (phase_ == Phase::prepare) {
    if (std::find(prop_cmds_.begin(), prop_cmds_.end(), entry) != prop_cmds_.end()) return out;
    if (is_stop(entry) && std::any_of(prop_cmds_.begin(), prop_cmds_.end(), is_stop)) return out;
    prop_cmds_.push_back(entry);
    return out;
  }
  if (phase_ != Phase::accept) return out;
  if (past_stop) {
    v_a_.append_raw(entry);
  } else if (!v_a_.append(entry, cfg_.append_mode)) {
    return out;
  }
  persist(out, AppendPersist{entry});
  las_[cfg_.self] = v_a_.length();
  for (const auto& [p, ld] : lds_) {
    if (p != cfg_.self) send(out, p, Accept{n_l_, entry});
  }
  maybe_decide(out);
  return out;
}

Outputs Replica::on_connection_lost(ProcessId peer) {
  if (role_ == Role::follower &&
      (leader_hint_ == peer || ballot_owner(n_prom_.ballot) == peer)) {
    phase_ = Phase::recover;
  }
  return {};
}

Outputs Replica::truncate(std::uint64_t up_to) {
  Outputs out;
  if (up_to <= v_a_.offset()) return out;
  if (up_to > l_d_) {
    throw ProtocolError("truncate to " + std::to_string(up_to) + " beyond decided length " +
                        std::to_string(l_d_));
  }
  persist(out, TruncatePersist{up_to});
  v_a_.truncate_front(up_to);
  return out;
}

void Replica::digest_into(Fnv1a& h, bool full) const {
  h.add_u64(cfg_.config);
  h.add_u64(static_cast<std::uint64_t>(role_) * 8 + static_cast<std::uint64_t>(phase_));
  for (const Round& r : {n_l_, n_prom_, n_a_}) {
    h.add_u64(r.config);
    h.add_u64(r.ballot.value);
  }
  h.add_u64(v_a_.offset());
  h.add_u64(v_a_.length());
  h.add_u64(l_d_);
  h.add_u64(l_c_);
  if (!full) return;
  Writer w;
  encode_state(w);
  h.add(w.str());
}

void Replica::encode_state(Writer& w) const {
  w.u64(cfg_.config);
  w.u8(static_cast<std::uint8_t>(static_cast<unsigned>(role_) * 8 + static_cast<unsigned>(phase_)));
  for (const Round& r : {n_l_, n_prom_, n_a_}) encode(w, r);
  w.u64(v_a_.offset());
  w.u64(l_d_);
  w.u64(l_c_);
  encode_entries(w, v_a_.entries());
  encode_entries(w, prop_cmds_);
  for (const auto& [p, rec] : promises_) {
    w.u32(p.id);
    encode(w, rec.accepted_round);
    encode_entries(w, rec.suffix);
  }
  w.u32(0);
  for (const auto& [p, l] : las_) {
    w.u32(p.id);
    w.u64(l);
  }
  w.u32(0);
  for (const auto& [p, l] : lds_) {
    w.u32(p.id);
    w.u64(l);
  }
  w.u32(0);
  w.u32(leader_hint_ ? leader_hint_->id : 0);
}

}  // namespace seqpaxos
