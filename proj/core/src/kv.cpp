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

#include "seqpaxos/kv.hpp"

#include "seqpaxos/codec.hpp"

namespace seqpaxos {

std::string encode_op(const KvOp& op) {
  Writer w;
  if (const auto* p = std::get_if<KvPut>(&op)) {
    w.u8(0);
    w.bytes(p->key);
    w.bytes(p->value);
  } else if (const auto* g = std::get_if<KvGet>(&op)) {
    w.u8(1);
    w.bytes(g->key);
  } else {
    const auto& m = std::get<SnapshotMarker>(op);
    w.u8(2);
    w.u32(m.replica.id);
    w.u64(m.k);
    w.u64(m.l_k);
  }
  return w.take();
}

KvOp decode_op(std::string_view bytes) {
  Reader r(bytes);
  KvOp out;
  switch (r.u8()) {
    case 0: {
      KvPut p;
      p.key = r.bytes();
      p.value = r.bytes();
      out = std::move(p);
      break;
    }
    case 1:
      out = KvGet{r.bytes()};
      break;
    case 2: {
      SnapshotMarker m;
      m.replica = ProcessId{r.u32()};
      m.k = r.u64();
      m.l_k = r.u64();
      out = m;
      break;
    }
    default:
      throw DecodeError("unknown kv op tag");
  }
  r.expect_done();
  return out;
}

Command make_marker_command(const SnapshotMarker& m) {
  return Command{kMarkerClientBase + m.replica.id, m.k, encode_op(m)};
}

std::optional<SnapshotMarker> as_marker(const LogEntry& e) {
  const auto* c = std::get_if<Command>(&e);
  if (!c || c->client < kMarkerClientBase) return std::nullopt;
  auto op = decode_op(c->op);
  if (const auto* m = std::get_if<SnapshotMarker>(&op)) return *m;
  return std::nullopt;
}

Command make_put(ClientId client, std::uint64_t seq, std::string key, std::string value) {
  if (key.empty()) throw std::invalid_argument("put: empty key");
  return Command{client, seq, encode_op(KvPut{std::move(key), std::move(value)})};
}

Command make_get(ClientId client, std::uint64_t seq, std::string key) {
  if (key.empty()) throw std::invalid_argument("get: empty key");
  return Command{client, seq, encode_op(KvGet{std::move(key)})};
}

std::string encode_snapshot(const RsmSnapshot& s) {
  Writer w;
  w.u64(s.id);
  w.u64(s.l_k);
  w.u32(static_cast<std::uint32_t>(s.kv.size()));
  for (const auto& [k, v] : s.kv) {
    w.bytes(k);
    w.bytes(v);
  }
  w.u32(static_cast<std::uint32_t>(s.clients.size()));
  for (const auto& [c, rec] : s.clients) {
    w.u64(c);
    w.u64(rec.last_seq);
    w.bytes(rec.response);
  }
  return w.take();
}

RsmSnapshot decode_snapshot(std::string_view bytes) {
  Reader r(bytes);
  RsmSnapshot s;
  s.id = r.u64();
  s.l_k = r.u64();
  auto n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    auto k = r.bytes();
    s.kv[std::move(k)] = r.bytes();
  }
  auto m = r.u32();
  for (std::uint32_t i = 0; i < m; ++i) {
    auto c = r.u64();
    ClientRecord rec;
    rec.last_seq = r.u64();
    rec.response = r.bytes();
    s.clients[c] = std::move(rec);
  }
  r.expect_done();
  return s;
}

KvStore KvStore::from_snapshot(const RsmSnapshot& s) {
  KvStore st;
  st.applied_ = s.l_k;
  st.kv_ = s.kv;
  st.clients_ = s.clients;
  st.next_snapshot_id_ = s.id + 1;
  return st;
}

std::optional<ApplyResult> KvStore::apply(const LogEntry& entry, std::uint64_t g) {
  if (g != applied_) {
    throw ProtocolError("rsm: entry " + std::to_string(g) + " applied at position " +
                        std::to_string(applied_));
  }
  ++applied_;
  const auto* c = std::get_if<Command>(&entry);
  if (!c || c->client >= kMarkerClientBase) return std::nullopt;

  ApplyResult res{c->client, c->seq, {}, false};
  auto it = clients_.find(c->client);
  if (it != clients_.end()) {
    if (c->seq == it->second.last_seq) {
      res.response = it->second.response;
      return res;
    }
    if (c->seq < it->second.last_seq) return std::nullopt;
  }
  auto op = decode_op(c->op);
  if (const auto* p = std::get_if<KvPut>(&op)) {
    kv_[p->key] = p->value;
    res.response = "OK";
  } else if (const auto* get = std::get_if<KvGet>(&op)) {
    auto kv = kv_.find(get->key);
    res.response = kv == kv_.end() ? std::string() : kv->second;
  } else {
    return std::nullopt;
  }
  res.executed = true;
  clients_[c->client] = ClientRecord{c->seq, res.response};
  return res;
}

RsmSnapshot KvStore::take_snapshot(std::uint64_t covered) {
  if (covered != applied_) {
    throw std::invalid_argument("snapshot at " + std::to_string(covered) + " but " +
                                std::to_string(applied_) + " entries applied");
  }
  return RsmSnapshot{next_snapshot_id_++, covered, kv_, clients_};
}

KvStore KvStore::restore(const RsmSnapshot& s, const std::vector<LogEntry>& suffix,
                         std::uint64_t start) {
  if (start != s.l_k) {
    throw std::invalid_argument("restore: suffix starts at " + std::to_string(start) +
                                ", snapshot covers " + std::to_string(s.l_k));
  }
  auto st = from_snapshot(s);
  for (std::size_t i = 0; i < suffix.size(); ++i) st.apply(suffix[i], start + i);
  return st;
}

std::string KvStore::state_bytes() const {
  return encode_snapshot(RsmSnapshot{0, 0, kv_, clients_});
}

std::uint64_t KvStore::digest() const {
  Fnv1a h;
  h.add(state_bytes());
  return h.value();
}

}  // namespace seqpaxos
