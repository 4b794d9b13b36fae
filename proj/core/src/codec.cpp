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

#include "seqpaxos/codec.hpp"

#include <cstdio>

namespace seqpaxos {

void Writer::bytes(std::string_view s) {
  u32(static_cast<std::uint32_t>(s.size()));
  out_.append(s);
}

void Reader::need(std::size_t n) const {
  if (in_.size() - pos_ < n) {
    throw DecodeError("short read: need " + std::to_string(n) + " bytes, have " +
                      std::to_string(in_.size() - pos_));
  }
}

std::uint8_t Reader::u8() {
  need(1);
  return static_cast<std::uint8_t>(in_[pos_++]);
}

std::uint32_t Reader::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(static_cast<std::uint8_t>(in_[pos_++])) << (8 * i);
  return v;
}

std::uint64_t Reader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(static_cast<std::uint8_t>(in_[pos_++])) << (8 * i);
  return v;
}

std::string Reader::bytes() {
  auto n = u32();
  return std::string(raw(n));
}

std::string_view Reader::raw(std::size_t n) {
  need(n);
  auto out = in_.substr(pos_, n);
  pos_ += n;
  return out;
}

void Reader::expect_done() const {
  if (!done()) throw DecodeError(std::to_string(remaining()) + " trailing bytes");
}

void encode(Writer& w, const Round& r) {
  w.u32(r.config);
  w.u64(r.ballot.value);
}

void encode(Writer& w, const StopSign& s) {
  w.u32(s.next_config);
  w.u32(static_cast<std::uint32_t>(s.processes.size()));
  for (auto p : s.processes) w.u32(p.id);
}

void encode(Writer& w, const LogEntry& e) {
  if (const auto* c = std::get_if<Command>(&e)) {
    w.u8(0);
    w.u64(c->client);
    w.u64(c->seq);
    w.bytes(c->op);
  } else {
    w.u8(1);
    encode(w, std::get<StopSign>(e));
  }
}

void encode_entries(Writer& w, const std::vector<LogEntry>& entries) {
  w.u32(static_cast<std::uint32_t>(entries.size()));
  for (const auto& e : entries) encode(w, e);
}

Round decode_round(Reader& r) {
  Round out;
  out.config = r.u32();
  out.ballot.value = r.u64();
  return out;
}

StopSign decode_stop_sign(Reader& r) {
  auto next = r.u32();
  auto n = r.u32();
  std::vector<ProcessId> procs;
  for (std::uint32_t i = 0; i < n; ++i) procs.push_back(ProcessId{r.u32()});
  return make_stop_sign(next, std::move(procs));
}

LogEntry decode_entry(Reader& r) {
  auto tag = r.u8();
  if (tag == 0) {
    Command c;
    c.client = r.u64();
    c.seq = r.u64();
    c.op = r.bytes();
    return c;
  }
  if (tag == 1) return decode_stop_sign(r);
  throw DecodeError("unknown entry tag " + std::to_string(tag));
}

std::vector<LogEntry> decode_entries(Reader& r) {
  auto n = r.u32();
  if (n > r.remaining()) throw DecodeError("entry count exceeds input");
  std::vector<LogEntry> out;
  out.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) out.push_back(decode_entry(r));
  return out;
}

void encode(Writer& w, const MessageBody& body) {
  w.u8(static_cast<std::uint8_t>(body.index()));
  std::visit(
      [&w](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Prepare>) {
          encode(w, m.n);
          w.u64(m.ld);
          encode(w, m.na);
        } else if constexpr (std::is_same_v<T, Promise>) {
          encode(w, m.n);
          encode(w, m.na);
          encode_entries(w, m.suffix);
          w.u64(m.ld);
        } else if constexpr (std::is_same_v<T, AcceptSync>) {
          encode(w, m.n);
          encode_entries(w, m.suffix);
          w.u64(m.ld);
        } else if constexpr (std::is_same_v<T, Accept>) {
          encode(w, m.n);
          encode(w, m.entry);
        } else if constexpr (std::is_same_v<T, Accepted>) {
          encode(w, m.n);
          w.u64(m.la);
        } else if constexpr (std::is_same_v<T, Decide>) {
          w.u64(m.l);
          encode(w, m.n);
        } else if constexpr (std::is_same_v<T, PrepareReq>) {
        } else if constexpr (std::is_same_v<T, HeartbeatRequest>) {
          w.u64(m.round);
          w.u64(m.max_ballot.value);
        } else if constexpr (std::is_same_v<T, HeartbeatReply>) {
          w.u64(m.round);
          w.u64(m.ballot.value);
        } else if constexpr (std::is_same_v<T, StateOffer>) {
          w.u32(m.config);
          w.u64(m.sigma_len);
        } else if constexpr (std::is_same_v<T, StateRequest>) {
          w.u32(m.config);
        } else if constexpr (std::is_same_v<T, StateChunk>) {
          w.u32(m.config);
          encode(w, m.stop);
          w.u64(m.sigma_len);
          w.bytes(m.snapshot);
          w.u64(m.snapshot_at);
          encode_entries(w, m.suffix);
        }
      },
      body);
}

MessageBody decode_message(Reader& r) {
  auto tag = r.u8();
  switch (tag) {
    case 0: {
      Prepare m;
      m.n = decode_round(r);
      m.ld = r.u64();
      m.na = decode_round(r);
      return m;
    }
    case 1: {
      Promise m;
      m.n = decode_round(r);
      m.na = decode_round(r);
      m.suffix = decode_entries(r);
      m.ld = r.u64();
      return m;
    }
    case 2: {
      AcceptSync m;
      m.n = decode_round(r);
      m.suffix = decode_entries(r);
      m.ld = r.u64();
      return m;
    }
    case 3: {
      Accept m;
      m.n = decode_round(r);
      m.entry = decode_entry(r);
      return m;
    }
    case 4: {
      Accepted m;
      m.n = decode_round(r);
      m.la = r.u64();
      return m;
    }
    case 5: {
      Decide m;
      m.l = r.u64();
      m.n = decode_round(r);
      return m;
    }
    case 6:
      return PrepareReq{};
    case 7: {
      HeartbeatRequest m;
      m.round = r.u64();
      m.max_ballot.value = r.u64();
      return m;
    }
    case 8: {
      HeartbeatReply m;
      m.round = r.u64();
      m.ballot.value = r.u64();
      return m;
    }
    case 9: {
      StateOffer m;
      m.config = r.u32();
      m.sigma_len = r.u64();
      return m;
    }
    case 10: {
      StateRequest m;
      m.config = r.u32();
      return m;
    }
    case 11: {
      StateChunk m;
      m.config = r.u32();
      m.stop = decode_stop_sign(r);
      m.sigma_len = r.u64();
      m.snapshot = r.bytes();
      m.snapshot_at = r.u64();
      m.suffix = decode_entries(r);
      return m;
    }
    default:
      throw DecodeError("unknown message tag " + std::to_string(tag));
  }
}

std::string encode_entries(const std::vector<LogEntry>& entries) {
  Writer w;
  encode_entries(w, entries);
  return w.take();
}

std::string encode_message(const MessageBody& body) {
  Writer w;
  encode(w, body);
  return w.take();
}

void Fnv1a::add(std::string_view bytes) {
  for (unsigned char c : bytes) {
    h_ ^= c;
    h_ *= 0x100000001b3ULL;
  }
}

void Fnv1a::add_u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h_ ^= static_cast<std::uint8_t>(v >> (8 * i));
    h_ *= 0x100000001b3ULL;
  }
}

std::string hex32(std::uint64_t digest) {
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", static_cast<unsigned>((digest ^ (digest >> 32)) & 0xffffffffu));
  return buf;
}

}  // namespace seqpaxos
