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

#include "seqpaxos/simnet.hpp"

#include <algorithm>
#include <sstream>

#include "seqpaxos/codec.hpp"
#include "seqpaxos/kv.hpp"

namespace seqpaxos {
namespace {

std::string cfg(ConfigId c) { return "c" + std::to_string(c); }

std::string client_name(ClientId id) { return "k" + std::to_string(id); }

std::string in_quotes(const std::string& s) { return "\"" + s + "\""; }

}  // namespace

/// Storage decorator: traces every completed write and fires the optional
/// crash point right after it.
class Simulation::TracedStorage : public Storage {
 public:
  TracedStorage(Simulation& sim, ProcessId p, ConfigId c, std::unique_ptr<Storage> inner)
      : sim_(sim), p_(p), c_(c), inner_(std::move(inner)) {}

  void persist(const PersistRecord& record) override {
    inner_->persist(record);
    sim_.on_persisted(p_, c_, record);
  }
  std::optional<PersistentState> load() override { return inner_->load(); }
  void destroy() override { inner_->destroy(); }

 private:
  Simulation& sim_;
  ProcessId p_;
  ConfigId c_;
  std::unique_ptr<Storage> inner_;
};

Simulation::Simulation(Scenario scenario, SimOptions options)
    : scenario_(std::move(scenario)), options_(std::move(options)), rng_(scenario_.seed) {
  storage_root_ = scenario_.storage_path.empty()
                      ? options_.output_root / "storage"
                      : std::filesystem::path(scenario_.storage_path);
}

Simulation::~Simulation() = default;

const ProcessHost* Simulation::host(ProcessId p) const {
  auto it = processes_.find(p.id);
  return it == processes_.end() || !it->second.alive ? nullptr : it->second.host.get();
}

bool Simulation::alive(ProcessId p) const {
  auto it = processes_.find(p.id);
  return it != processes_.end() && it->second.alive;
}

void Simulation::schedule(Time t, EventBody body) {
  queue_.push(Event{t, next_seq_++, std::move(body)});
}

std::string Simulation::digest_of(ProcessId p) const {
  const auto* h = host(p);
  return h ? hex32(h->digest()) : std::string(kNoDigest);
}

void Simulation::record(std::string kind, std::string from, std::string to, std::string payload,
                        std::optional<ProcessId> actor) {
  result_.trace.records.push_back(TraceRecord{now_, std::move(kind), std::move(from),
                                              std::move(to), std::move(payload),
                                              actor ? digest_of(*actor) : std::string(kNoDigest)});
}

template <typename F>
void Simulation::with_host(ProcessId p, F&& f) {
  auto& proc = processes_.at(p.id);
  if (!proc.alive) return;
  try {
    f(*proc.host);
  } catch (const CrashPoint&) {
    crash(p, "persist-crash");
    schedule(now_ + options_.recover_after, AutoRecover{p});
  } catch (const std::exception& e) {
    ++result_.errors;
    record("error", to_string(p), "-", e.what(), std::nullopt);
    crash(p, "error");
  }
}

Simulation::Link& Simulation::link(ProcessId a, ProcessId b) {
  auto key = a < b ? std::make_pair(a.id, b.id) : std::make_pair(b.id, a.id);
  return links_[key];
}

bool Simulation::can_connect(ProcessId a, ProcessId b) const {
  if (!alive(a) || !alive(b)) return false;
  if (group_.empty()) return true;
  return group_.at(a.id) == group_.at(b.id);
}

void Simulation::drop_link(ProcessId a, ProcessId b, bool notify_a, bool notify_b) {
  auto& l = link(a, b);
  if (!l.up) return;
  l.up = false;
  std::string lost_counts;
  for (int dir = 0; dir < 2; ++dir) {
    auto& q = l.inflight[dir];
    std::size_t keep = q.size() == 0 ? 0 : static_cast<std::size_t>(rng_() % (q.size() + 1));
    for (std::size_t i = keep; i < q.size(); ++i) lost_.insert(q[i]);
    lost_counts += (dir ? "," : "") + std::to_string(q.size() - keep);
    q.resize(keep);
  }
  record("session_drop", to_string(a), to_string(b),
         "session=" + std::to_string(l.session) + " lost=" + lost_counts, std::nullopt);
  // ConnectionLost reaches each side after the surviving messages from the other.
  auto notify = [&](ProcessId at, ProcessId peer) {
    Time t = std::max(now_, l.last_sched[direction(peer, at)]);
    schedule(t, ConnLost{at, peer, processes_.at(at.id).incarnation});
  };
  if (notify_a && alive(a)) notify(a, b);
  if (notify_b && alive(b)) notify(b, a);
}

void Simulation::open_link(ProcessId a, ProcessId b) {
  auto& l = link(a, b);
  if (l.up || !can_connect(a, b)) return;
  l.up = true;
  ++l.session;
  record("reconnect", to_string(a), to_string(b), "session=" + std::to_string(l.session),
         std::nullopt);
}

void Simulation::send(const Message& m) {
  if (options_.on_send) options_.on_send(now_, m);
  bool hb = is_heartbeat(m.body);
  bool traced = !hb || scenario_.trace_heartbeats;
  auto payload = [&] { return cfg(m.config) + " " + to_string(m.body); };
  if (traced) record("send", to_string(m.from), to_string(m.to), payload(), m.from);
  if (m.to == m.from) {
    schedule(now_, Delivery{m, next_msg_++});
    return;
  }
  auto& l = link(m.from, m.to);
  if (!l.up) {
    if (traced) record("lost", to_string(m.from), to_string(m.to), payload(), std::nullopt);
    return;
  }
  Duration jitter = scenario_.jitter ? rng_() % (scenario_.jitter + 1) : 0;
  int dir = direction(m.from, m.to);
  Time t = std::max(now_ + scenario_.latency + jitter, l.last_sched[dir]);
  l.last_sched[dir] = t;
  auto id = next_msg_++;
  l.inflight[dir].push_back(id);
  schedule(t, Delivery{m, id});
}

void Simulation::set_timer(ProcessId p, TimerKind kind, ConfigId config, Duration after) {
  schedule(now_ + after, TimerFire{p, kind, config, processes_.at(p.id).incarnation});
}

std::string Simulation::storage_dir(ProcessId p, ConfigId c) const {
  return (storage_root_ / to_string(p) / cfg(c)).string();
}

Storage& Simulation::storage(ProcessId p, ConfigId config) {
  auto key = std::make_pair(p.id, config);
  auto it = disks_.find(key);
  if (it == disks_.end()) {
    std::unique_ptr<Storage> inner;
    if (scenario_.storage == StorageBackend::file) {
      inner = std::make_unique<FileStorage>(storage_dir(p, config));
    } else {
      inner = std::make_unique<VolatileStorage>();
    }
    it = disks_.emplace(key, std::make_unique<TracedStorage>(*this, p, config, std::move(inner)))
             .first;
  }
  return *it->second;
}

std::vector<ConfigId> Simulation::stored_configs(ProcessId p) {
  std::vector<ConfigId> out;
  if (scenario_.storage == StorageBackend::file) {
    auto dir = storage_root_ / to_string(p);
    if (!std::filesystem::exists(dir)) return out;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      auto name = entry.path().filename().string();
      if (name.size() > 1 && name[0] == 'c') out.push_back(static_cast<ConfigId>(std::stoul(name.substr(1))));
    }
  } else {
    for (auto& [key, disk] : disks_) {
      if (key.first == p.id && disk->load()) out.push_back(key.second);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void Simulation::remove_storage(ProcessId p, ConfigId config) {
  storage(p, config).destroy();
  disks_.erase(std::make_pair(p.id, config));
}

void Simulation::on_persisted(ProcessId p, ConfigId c, const PersistRecord& rec) {
  ++result_.persist_count;
  record("persist", to_string(p), "-", cfg(c) + " " + to_string(rec), p);
  if (options_.crash_at_persist && *options_.crash_at_persist == result_.persist_count) {
    throw CrashPoint();
  }
}

void Simulation::forward(ProcessId from, ProcessId to, ConfigId config, const LogEntry& e) {
  if (from == to) {
    schedule(now_, Forwarded{from, to, config, e});
    return;
  }
  auto& l = link(from, to);
  if (!l.up) return;
  schedule(now_ + scenario_.latency, Forwarded{from, to, config, e});
}

void Simulation::on_deliver(ProcessId p, ConfigId c, std::uint64_t g, const LogEntry& e,
                            const std::optional<ApplyResult>& res) {
  record("decide", to_string(p), "-", cfg(c) + " g=" + std::to_string(g) + " " + to_string(e), p);
  auto& hist = result_.history[p.id];
  if (hist.size() <= g) hist.resize(g + 1);
  hist[g] = e;
  result_.decided[{p.id, c}].emplace_back(g, e);

  if (is_stop(e)) {
    for (auto& r : reconfigs_) {
      if (r.from == c) r.done = true;
    }
  }
  if (!res) return;
  auto cit = clients_.find(res->client);
  if (cit == clients_.end()) return;
  auto& firsts = result_.responses[res->client];
  auto fit = firsts.find(res->seq);
  if (!res->executed) ++result_.table_answers;
  if (fit == firsts.end()) {
    firsts.emplace(res->seq, res->response);
    record("response", to_string(p), client_name(res->client),
           std::to_string(res->client) + ":" + std::to_string(res->seq) + " " +
               in_quotes(res->response),
           p);
    auto& cl = cit->second;
    if (cl.current && cl.current->seq == res->seq) {
      cl.current.reset();
      schedule(now_ + scenario_.think_time, ClientNext{cl.id});
    }
  } else if (fit->second != res->response) {
    ++result_.mismatched_responses;
    record("error", to_string(p), client_name(res->client),
           "response mismatch for " + std::to_string(res->client) + ":" +
               std::to_string(res->seq) + " " + in_quotes(res->response) + " vs " +
               in_quotes(fit->second),
           p);
  }
}

void Simulation::on_leader(ProcessId p, ConfigId c, const LeaderEvent& ev) {
  record("leader", to_string(p), to_string(ev.leader),
         cfg(c) + " b=" + std::to_string(ev.ballot.value), p);
}

void Simulation::on_propose(ProcessId p, ConfigId c, const LogEntry& e) {
  record("propose", to_string(p), "*", cfg(c) + " " + to_string(e), p);
}

void Simulation::on_instance_start(ProcessId p, ConfigId c, std::uint64_t sigma_len,
                                   const StateChunk* chunk) {
  const auto* h = host(p);
  const auto* inst = h ? h->instance(c) : nullptr;
  std::string members = inst ? render_process_list(inst->members) : "";
  std::string source = chunk ? "fetch" : (c == 0 ? "boot" : "local");
  record("init", to_string(p), "-",
         cfg(c) + " members=" + members + " sigma=" + std::to_string(sigma_len) +
             " source=" + source,
         p);
  if (chunk) {
    result_.fetched[{p.id, c}] = *chunk;
    auto& hist = result_.history[p.id];
    if (hist.size() < chunk->sigma_len) hist.resize(chunk->sigma_len);
    for (std::size_t i = 0; i < chunk->suffix.size(); ++i) {
      hist[chunk->snapshot_at + i] = chunk->suffix[i];
    }
  }
}

void Simulation::on_instance_recover(ProcessId p, ConfigId c, const PersistentState& st) {
  record("restore", to_string(p), "-",
         cfg(c) + " ld=" + std::to_string(st.l_d) + " nprom=" + to_string(st.n_prom) +
             " na=" + to_string(st.n_a) + " len=" + std::to_string(st.v_a.length()) +
             " sigma=" + std::to_string(st.sigma_len),
         std::nullopt);
  // A crash between persisting l_d and delivering leaves decided entries the
  // host re-applies silently on restore. Record them as delivered.
  auto from = std::max(st.sigma_len, st.snapshot ? st.snapshot->l_k : st.sigma_len);
  auto& hist = result_.history[p.id];
  auto& decided = result_.decided[{p.id, c}];
  if (hist.size() < st.l_d) hist.resize(st.l_d);
  for (auto g = from; g < st.l_d; ++g) {
    if (hist[g]) continue;
    hist[g] = st.v_a.at(g);
    if (decided.empty() || decided.back().first < g) decided.emplace_back(g, *hist[g]);
  }
}

void Simulation::on_note(ProcessId p, ConfigId c, const std::string& kind,
                         const std::string& text) {
  record(kind, to_string(p), "-", cfg(c) + " " + text, std::nullopt);
}

std::optional<ProcessId> Simulation::current_leader() const {
  std::optional<ProcessId> best;
  Round best_round;
  for (const auto& [id, proc] : processes_) {
    if (!proc.alive || !proc.host->active()) continue;
    const auto* inst = proc.host->instance(*proc.host->active());
    if (!inst || inst->replica.role() != Role::leader) continue;
    if (!best || inst->replica.n_leader() > best_round) {
      best = ProcessId{id};
      best_round = inst->replica.n_leader();
    }
  }
  return best;
}

void Simulation::crash(ProcessId p, const std::string& why) {
  auto& proc = processes_.at(p.id);
  if (!proc.alive) return;
  ++result_.crashes;
  record("crash", to_string(p), "-", why + " incarnation=" + std::to_string(proc.incarnation),
         std::nullopt);
  proc.alive = false;
  proc.host.reset();
  ++proc.incarnation;
  for (const auto& [id, other] : processes_) {
    if (id != p.id) drop_link(p, ProcessId{id}, false, true);
  }
  if (scenario_.storage == StorageBackend::file) {
    // Forget cached file handles; recovery must read the disk.
    for (auto it = disks_.begin(); it != disks_.end();) {
      it = it->first.first == p.id ? disks_.erase(it) : std::next(it);
    }
  }
}

void Simulation::recover(ProcessId p) {
  auto& proc = processes_.at(p.id);
  proc.alive = true;
  proc.host = std::make_unique<ProcessHost>(
      p,
      HostOptions{scenario_.delta, scenario_.append_mode, scenario_.snapshot_every, 100, 100, 20,
                  4096, scenario_.mutation},
      *this);
  record("recover", to_string(p), "-", "incarnation=" + std::to_string(proc.incarnation),
         std::nullopt);
  for (const auto& [id, other] : processes_) {
    if (id != p.id) open_link(p, ProcessId{id});
  }
  with_host(p, [&](ProcessHost& h) {
    if (stored_configs(p).empty()) {
      h.boot(scenario_.members);
    } else {
      h.recover();
    }
  });
}

Simulation::Client& Simulation::client(ClientId id) {
  auto [it, inserted] = clients_.try_emplace(id);
  if (inserted) it->second.id = id;
  return it->second;
}

void Simulation::client_next(Client& c) {
  if (c.current || c.queue.empty()) return;
  c.current = c.queue.front();
  c.queue.pop_front();
  result_.issued[c.id].push_back(*c.current);
  submit(c, *c.current, false);
}

void Simulation::submit(Client& c, const Command& cmd, bool duplicate) {
  record("propose", client_name(c.id), "*", to_string(cmd), std::nullopt);
  for (auto& [id, proc] : processes_) {
    if (proc.alive) with_host(ProcessId{id}, [&](ProcessHost& h) { h.on_client_propose(cmd); });
  }
  if (duplicate) return;
  if (scenario_.retry_rate > 0) {
    double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    if (u < scenario_.retry_rate) {
      ++result_.duplicate_submissions;
      schedule(now_ + 1, ClientSubmit{c.id, cmd.seq, true});
    }
  }
  schedule(now_ + scenario_.client_retry, ClientSubmit{c.id, cmd.seq, false});
}

void Simulation::submit_reconfig(std::size_t index) {
  auto& r = reconfigs_.at(index);
  if (r.done) return;
  record("propose", "script", "*", cfg(r.from) + " " + to_string(r.stop), std::nullopt);
  for (auto& [id, proc] : processes_) {
    if (proc.alive) {
      with_host(ProcessId{id}, [&](ProcessHost& h) { h.on_propose_to(r.from, r.stop); });
    }
  }
  schedule(now_ + scenario_.client_retry, ReconfigRetry{index});
}

void Simulation::run_directive(const Directive& d, std::size_t) {
  switch (d.kind) {
    case DirectiveKind::crash: {
      auto target = d.target_leader ? current_leader() : std::optional<ProcessId>(d.procs.at(0));
      if (!target || !alive(*target)) {
        record("note", "script", "-", "crash skipped: no live target", std::nullopt);
        break;
      }
      crash(*target, "scripted");
      break;
    }
    case DirectiveKind::recover: {
      if (d.target_all) {
        for (auto& [id, proc] : processes_) {
          if (!proc.alive) recover(ProcessId{id});
        }
      } else if (alive(d.procs.at(0))) {
        ++result_.errors;
        record("error", "script", to_string(d.procs.at(0)),
               "line " + std::to_string(d.line) + ": recover of a live process", std::nullopt);
      } else {
        recover(d.procs.at(0));
      }
      break;
    }
    case DirectiveKind::drop: {
      auto a = d.procs.at(0);
      auto b = d.procs.at(1);
      if (!link(a, b).up) {
        record("note", "script", "-", "drop skipped: session already down", std::nullopt);
        break;
      }
      drop_link(a, b, true, true);
      schedule(now_ + scenario_.reconnect, Reconnect{a, b});
      break;
    }
    case DirectiveKind::partition: {
      group_.clear();
      std::string desc;
      for (std::size_t g = 0; g < d.groups.size(); ++g) {
        for (auto p : d.groups[g]) group_[p.id] = g;
        desc += (g ? "|" : "") + render_process_list(d.groups[g]);
      }
      std::size_t next = d.groups.size();
      for (const auto& [id, proc] : processes_) {
        if (!group_.count(id)) group_[id] = next++;
      }
      record("partition", "-", "-", desc, std::nullopt);
      for (const auto& [a, pa] : processes_) {
        for (const auto& [b, pb] : processes_) {
          if (a < b && group_.at(a) != group_.at(b)) {
            drop_link(ProcessId{a}, ProcessId{b}, true, true);
          }
        }
      }
      break;
    }
    case DirectiveKind::heal: {
      group_.clear();
      record("heal", "-", "-", "", std::nullopt);
      for (const auto& [a, pa] : processes_) {
        for (const auto& [b, pb] : processes_) {
          if (a < b) open_link(ProcessId{a}, ProcessId{b});
        }
      }
      break;
    }
    case DirectiveKind::propose: {
      auto& c = client(d.client);
      auto seq = c.next_seq++;
      c.queue.push_back(d.is_put ? make_put(c.id, seq, d.key, d.value)
                                 : make_get(c.id, seq, d.key));
      client_next(c);
      break;
    }
    case DirectiveKind::workload: {
      for (std::uint64_t i = 0; i < d.commands; ++i) {
        auto& c = client(1 + i % d.clients);
        auto seq = c.next_seq++;
        auto key = "x" + std::to_string(rng_() % d.keys);
        if (rng_() % 10 < 7) {
          c.queue.push_back(make_put(c.id, seq, key, "v" + std::to_string(++workload_counter_)));
        } else {
          c.queue.push_back(make_get(c.id, seq, key));
        }
      }
      for (std::uint64_t i = 1; i <= d.clients; ++i) client_next(client(i));
      break;
    }
    case DirectiveKind::burst: {
      auto p = d.procs.at(0);
      ClientId id = kBurstClientBase + p.id;
      for (std::uint64_t i = 1; i <= d.count; ++i) {
        auto cmd = make_put(id, i, "burst", std::to_string(i));
        record("propose", to_string(p), to_string(p), to_string(LogEntry{cmd}), std::nullopt);
        with_host(p, [&](ProcessHost& h) { h.on_client_propose(cmd); });
      }
      break;
    }
    case DirectiveKind::reconfigure: {
      ConfigId top = 0;
      for (const auto& [id, proc] : processes_) {
        if (proc.alive && proc.host->active()) top = std::max(top, *proc.host->active());
      }
      reconfigs_.push_back(Reconfig{make_stop_sign(top + 1, d.procs), top, false});
      submit_reconfig(reconfigs_.size() - 1);
      break;
    }
    case DirectiveKind::cleanup: {
      auto p = d.procs.at(0);
      if (!alive(p)) {
        record("cleanup", to_string(p), "-", cfg(d.config) + " refused: process is down",
               std::nullopt);
        break;
      }
      std::string reason;
      with_host(p, [&](ProcessHost& h) { reason = h.cleanup(d.config); });
      record("cleanup", to_string(p), "-",
             cfg(d.config) + (reason.empty() ? " done" : " refused: " + reason), p);
      break;
    }
    case DirectiveKind::end:
      break;
  }
}

void Simulation::dispatch(Event& ev) {
  std::visit(
      [&](auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, Delivery>) {
          const auto& m = e.m;
          bool traced = !is_heartbeat(m.body) || scenario_.trace_heartbeats;
          if (m.from != m.to) {
            auto& q = link(m.from, m.to).inflight[direction(m.from, m.to)];
            if (!q.empty() && q.front() == e.id) q.pop_front();
          }
          if (lost_.erase(e.id) || !alive(m.to)) {
            if (traced) {
              record("lost", to_string(m.from), to_string(m.to),
                     cfg(m.config) + " " + to_string(m.body), std::nullopt);
            }
            return;
          }
          if (traced) {
            record("recv", to_string(m.from), to_string(m.to),
                   cfg(m.config) + " " + to_string(m.body), m.to);
          }
          with_host(m.to, [&](ProcessHost& h) { h.on_message(m); });
        } else if constexpr (std::is_same_v<T, Forwarded>) {
          if (!alive(e.to)) return;
          with_host(e.to, [&](ProcessHost& h) { h.on_propose_to(e.config, e.entry); });
        } else if constexpr (std::is_same_v<T, TimerFire>) {
          if (!alive(e.p) || processes_.at(e.p.id).incarnation != e.incarnation) return;
          with_host(e.p, [&](ProcessHost& h) { h.on_timer(e.kind, e.config); });
        } else if constexpr (std::is_same_v<T, DirectiveFire>) {
          run_directive(scenario_.directives.at(e.index), e.index);
        } else if constexpr (std::is_same_v<T, ClientSubmit>) {
          auto& c = client(e.client);
          if (!c.current || c.current->seq != e.seq) return;
          submit(c, *c.current, e.duplicate);
        } else if constexpr (std::is_same_v<T, ClientNext>) {
          client_next(client(e.client));
        } else if constexpr (std::is_same_v<T, Reconnect>) {
          open_link(e.a, e.b);
        } else if constexpr (std::is_same_v<T, ConnLost>) {
          if (!alive(e.at) || processes_.at(e.at.id).incarnation != e.incarnation) return;
          record("conn_lost", to_string(e.peer), to_string(e.at), "", e.at);
          with_host(e.at, [&](ProcessHost& h) { h.on_connection_lost(e.peer); });
        } else if constexpr (std::is_same_v<T, AutoRecover>) {
          if (!alive(e.p)) recover(e.p);
        } else if constexpr (std::is_same_v<T, ReconfigRetry>) {
          submit_reconfig(e.index);
        }
      },
      ev.body);
}

SimResult Simulation::run() {
  auto& tr = result_.trace;
  tr.set_header("scenario", scenario_.name);
  tr.set_header("seed", std::to_string(scenario_.seed));
  tr.set_header("processes", render_process_list(scenario_.processes));
  tr.set_header("members", render_process_list(scenario_.members));
  tr.set_header("append", scenario_.append_mode == AppendMode::dedup ? "dedup" : "duplicates");
  tr.set_header("snapshot_every", std::to_string(scenario_.snapshot_every));
  tr.set_header("storage", scenario_.storage == StorageBackend::file ? "file" : "memory");
  if (scenario_.stable_from) tr.set_header("stable_from", std::to_string(*scenario_.stable_from));
  tr.set_header("end", std::to_string(scenario_.end));
  if (options_.crash_at_persist) {
    tr.set_header("crash_at_persist", std::to_string(*options_.crash_at_persist));
  }

  if (scenario_.storage == StorageBackend::file) std::filesystem::remove_all(storage_root_);
  for (auto p : scenario_.processes) {
    auto& proc = processes_[p.id];
    proc.host = std::make_unique<ProcessHost>(
        p,
        HostOptions{scenario_.delta, scenario_.append_mode, scenario_.snapshot_every, 100, 100,
                    20, 4096, scenario_.mutation},
        *this);
  }
  for (auto p : scenario_.processes) {
    for (auto q : scenario_.processes) {
      if (p < q) link(p, q);
    }
  }
  for (auto p : scenario_.processes) {
    with_host(p, [&](ProcessHost& h) { h.boot(scenario_.members); });
  }
  for (std::size_t i = 0; i < scenario_.directives.size(); ++i) {
    schedule(scenario_.directives[i].at, DirectiveFire{i});
  }

  while (!queue_.empty() && queue_.top().t <= scenario_.end) {
    Event ev = queue_.top();
    queue_.pop();
    now_ = ev.t;
    dispatch(ev);
  }
  now_ = scenario_.end;

  std::size_t live = 0;
  for (auto& [id, proc] : processes_) {
    if (!proc.alive) continue;
    ++live;
    result_.alive_at_end.insert(id);
    if (auto a = proc.host->active()) {
      const auto* inst = proc.host->instance(*a);
      result_.final_state[id] = inst->rsm.state_bytes();
      result_.final_config[id] = *a;
    }
  }
  record("end", "-", "-",
         "live=" + std::to_string(live) + " persists=" + std::to_string(result_.persist_count) +
             " errors=" + std::to_string(result_.errors),
         std::nullopt);
  return std::move(result_);
}

SimResult simulate(const Scenario& scenario, const SimOptions& options) {
  Simulation sim(scenario, options);
  return sim.run();
}

std::string render_replica_state(const SimResult& result, ProcessId p) {
  std::ostringstream out;
  out << "process " << to_string(p) << "\n";
  out << "alive " << (result.alive_at_end.count(p.id) ? "yes" : "no") << "\n";
  if (auto it = result.final_config.find(p.id); it != result.final_config.end()) {
    out << "active c" << it->second << "\n";
  }
  if (auto it = result.final_state.find(p.id); it != result.final_state.end()) {
    Fnv1a h;
    h.add(it->second);
    out << "kv_digest " << hex32(h.value()) << "\n";
  }
  auto hit = result.history.find(p.id);
  std::size_t n = hit == result.history.end() ? 0 : hit->second.size();
  out << "decided " << n << "\n";
  for (std::size_t g = 0; g < n; ++g) {
    const auto& e = hit->second[g];
    out << g << " " << (e ? to_string(*e) : std::string("?")) << "\n";
  }
  return out.str();
}

}  // namespace seqpaxos
