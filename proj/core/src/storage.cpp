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

#include "seqpaxos/storage.hpp"

#include <zlib.h>

#include <fstream>
#include <iterator>

namespace seqpaxos {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr std::size_t kWalHeader = 1 + 8 + 4 + 4;
constexpr std::size_t kBaseHeader = 4 + 8 + 4 + 4;

std::uint32_t crc(std::string_view a, std::string_view b = {}) {
  uLong c = crc32(0L, Z_NULL, 0);
  c = crc32(c, reinterpret_cast<const Bytef*>(a.data()), static_cast<uInt>(a.size()));
  c = crc32(c, reinterpret_cast<const Bytef*>(b.data()), static_cast<uInt>(b.size()));
  return static_cast<std::uint32_t>(c);
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

void apply_record(PersistentState& state, const PersistRecord& record) {
  std::visit(Overloaded{
                 [&](const InitRecord& r) { state = r.state; },
                 [&](const PromisePersist& r) { state.n_prom = r.n; },
                 [&](const AcceptSyncPersist& r) {
                   state.n_a = r.n_a;
                   state.v_a.truncate_back(r.cut);
                   for (const auto& e : r.suffix) state.v_a.append_raw(e);
                 },
                 [&](const AppendPersist& r) { state.v_a.append_raw(r.entry); },
                 [&](const DecidePersist& r) { state.l_d = r.l_d; },
                 [&](const SnapshotPersist& r) { state.snapshot = r.image; },
                 [&](const TruncatePersist& r) { state.v_a.truncate_front(r.up_to); },
             },
             record);
}

std::string to_string(const PersistRecord& record) {
  return std::visit(
      Overloaded{
          [](const InitRecord& r) {
            return "init{sigma=" + std::to_string(r.state.sigma_len) +
                   ",nprom=" + to_string(r.state.n_prom) + ",na=" + to_string(r.state.n_a) +
                   ",len=" + std::to_string(r.state.v_a.length()) +
                   ",ld=" + std::to_string(r.state.l_d) + "}";
          },
          [](const PromisePersist& r) { return "promise{n=" + to_string(r.n) + "}"; },
          [](const AcceptSyncPersist& r) {
            return "accept{na=" + to_string(r.n_a) + ",cut=" + std::to_string(r.cut) +
                   ",len=" + std::to_string(r.cut + r.suffix.size()) + "}";
          },
          [](const AppendPersist& r) { return "append{entry=" + to_string(r.entry) + "}"; },
          [](const DecidePersist& r) { return "decide{ld=" + std::to_string(r.l_d) + "}"; },
          [](const SnapshotPersist& r) { return "snapshot{lk=" + std::to_string(r.image.l_k) + "}"; },
          [](const TruncatePersist& r) { return "truncate{to=" + std::to_string(r.up_to) + "}"; },
      },
      record);
}

void encode(Writer& w, const PersistentState& s) {
  w.u32(s.config);
  w.u32(static_cast<std::uint32_t>(s.members.size()));
  for (auto p : s.members) w.u32(p.id);
  w.u64(s.sigma_len);
  encode(w, s.n_prom);
  encode(w, s.n_a);
  w.u64(s.v_a.offset());
  encode_entries(w, s.v_a.entries());
  w.u64(s.l_d);
  for (const auto* img : {&s.snapshot, &s.base}) {
    w.u8(*img ? 1 : 0);
    if (*img) {
      w.bytes((*img)->blob);
      w.u64((*img)->l_k);
    }
  }
}

PersistentState decode_persistent_state(Reader& r) {
  PersistentState s;
  s.config = r.u32();
  auto n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) s.members.push_back(ProcessId{r.u32()});
  s.sigma_len = r.u64();
  s.n_prom = decode_round(r);
  s.n_a = decode_round(r);
  auto offset = r.u64();
  s.v_a = Log(offset, decode_entries(r));
  s.l_d = r.u64();
  for (auto* img : {&s.snapshot, &s.base}) {
    if (r.u8()) {
      SnapshotImage out;
      out.blob = r.bytes();
      out.l_k = r.u64();
      *img = std::move(out);
    }
  }
  return s;
}

std::uint8_t record_type(const PersistRecord& rec) {
  return static_cast<std::uint8_t>(rec.index() + 1);
}

void encode(Writer& w, const PersistRecord& rec) {
  std::visit(Overloaded{
                 [&](const InitRecord& r) { encode(w, r.state); },
                 [&](const PromisePersist& r) { encode(w, r.n); },
                 [&](const AcceptSyncPersist& r) {
                   encode(w, r.n_a);
                   w.u64(r.cut);
                   encode_entries(w, r.suffix);
                 },
                 [&](const AppendPersist& r) { encode(w, r.entry); },
                 [&](const DecidePersist& r) { w.u64(r.l_d); },
                 [&](const SnapshotPersist& r) {
                   w.bytes(r.image.blob);
                   w.u64(r.image.l_k);
                 },
                 [&](const TruncatePersist& r) { w.u64(r.up_to); },
             },
             rec);
}

PersistRecord decode_record(std::uint8_t type, Reader& r) {
  switch (type) {
    case 1:
      return InitRecord{decode_persistent_state(r)};
    case 2:
      return PromisePersist{decode_round(r)};
    case 3: {
      AcceptSyncPersist p;
      p.n_a = decode_round(r);
      p.cut = r.u64();
      p.suffix = decode_entries(r);
      return p;
    }
    case 4:
      return AppendPersist{decode_entry(r)};
    case 5:
      return DecidePersist{r.u64()};
    case 6: {
      SnapshotPersist p;
      p.image.blob = r.bytes();
      p.image.l_k = r.u64();
      return p;
    }
    case 7:
      return TruncatePersist{r.u64()};
    default:
      throw DecodeError("unknown record type " + std::to_string(type));
  }
}

std::string frame_record(const PersistRecord& rec, std::uint64_t seq) {
  Writer payload;
  encode(payload, rec);
  Writer head;
  head.u8(record_type(rec));
  head.u64(seq);
  head.u32(static_cast<std::uint32_t>(payload.str().size()));
  auto sum = crc(head.str(), payload.str());
  head.u32(sum);
  return head.take() + payload.str();
}

void VolatileStorage::persist(const PersistRecord& record) {
  ++count_;
  if (std::holds_alternative<InitRecord>(record)) {
    state_ = std::get<InitRecord>(record).state;
    return;
  }
  if (!state_) throw ProtocolError("persist before init record");
  apply_record(*state_, record);
}

FileStorage::FileStorage(std::filesystem::path dir, std::size_t compact_every)
    : dir_(std::move(dir)), compact_every_(compact_every) {}

std::optional<PersistentState> FileStorage::load() {
  loaded_ = true;
  cache_.reset();
  seq_ = 0;
  since_compact_ = 0;
  std::uint64_t base_seq = 0;

  auto base_path = dir_ / "base.bin";
  if (std::filesystem::exists(base_path)) {
    auto data = read_file(base_path);
    if (data.size() < kBaseHeader) throw StorageCorrupted(base_path.string() + ": short base image");
    Reader r(data);
    auto magic = r.u32();
    base_seq = r.u64();
    auto len = r.u32();
    auto sum = r.u32();
    if (magic != kBaseMagic) throw StorageCorrupted(base_path.string() + ": bad magic");
    if (r.remaining() != len) throw StorageCorrupted(base_path.string() + ": length mismatch");
    auto payload = r.raw(len);
    if (crc(std::string_view(data).substr(0, kBaseHeader - 4), payload) != sum) {
      throw StorageCorrupted(base_path.string() + ": checksum mismatch");
    }
    Reader body(payload);
    try {
      cache_ = decode_persistent_state(body);
      body.expect_done();
    } catch (const DecodeError& e) {
      throw StorageCorrupted(base_path.string() + ": " + e.what());
    }
    seq_ = base_seq;
  }

  auto wal_path = dir_ / "wal.bin";
  if (std::filesystem::exists(wal_path)) {
    auto data = read_file(wal_path);
    std::size_t pos = 0;
    while (data.size() - pos >= kWalHeader) {
      Reader h(std::string_view(data).substr(pos, kWalHeader));
      auto type = h.u8();
      auto seq = h.u64();
      auto len = h.u32();
      auto sum = h.u32();
      if (data.size() - pos - kWalHeader < len) break;  // torn tail
      auto head = std::string_view(data).substr(pos, kWalHeader - 4);
      auto payload = std::string_view(data).substr(pos + kWalHeader, len);
      if (crc(head, payload) != sum) {
        throw StorageCorrupted(wal_path.string() + ": checksum mismatch at offset " +
                               std::to_string(pos));
      }
      pos += kWalHeader + len;
      if (seq <= base_seq) continue;
      Reader body(payload);
      PersistRecord rec;
      try {
        rec = decode_record(type, body);
        body.expect_done();
      } catch (const DecodeError& e) {
        throw StorageCorrupted(wal_path.string() + ": " + e.what());
      }
      if (std::holds_alternative<InitRecord>(rec)) {
        cache_ = std::get<InitRecord>(rec).state;
      } else {
        if (!cache_) throw StorageCorrupted(wal_path.string() + ": record before init");
        apply_record(*cache_, rec);
      }
      seq_ = seq;
      ++since_compact_;
    }
    if (pos != data.size()) std::filesystem::resize_file(wal_path, pos);
  }
  return cache_;
}

void FileStorage::persist(const PersistRecord& record) {
  if (!loaded_) load();
  if (std::holds_alternative<InitRecord>(record)) {
    cache_ = std::get<InitRecord>(record).state;
    write_base(*cache_, ++seq_);
    return;
  }
  if (!cache_) throw ProtocolError("persist before init record");
  apply_record(*cache_, record);
  append_wal(record);
  if (++since_compact_ >= compact_every_) write_base(*cache_, seq_);
}

void FileStorage::append_wal(const PersistRecord& record) {
  std::filesystem::create_directories(dir_);
  std::ofstream out(dir_ / "wal.bin", std::ios::binary | std::ios::app);
  auto frame = frame_record(record, ++seq_);
  out.write(frame.data(), static_cast<std::streamsize>(frame.size()));
  out.flush();
  if (!out) throw std::runtime_error("wal write failed in " + dir_.string());
}

void FileStorage::write_base(const PersistentState& state, std::uint64_t seq) {
  std::filesystem::create_directories(dir_);
  Writer payload;
  encode(payload, state);
  Writer head;
  head.u32(kBaseMagic);
  head.u64(seq);
  head.u32(static_cast<std::uint32_t>(payload.str().size()));
  auto sum = crc(head.str(), payload.str());
  head.u32(sum);
  auto tmp = dir_ / "base.bin.tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(head.str().data(), static_cast<std::streamsize>(head.str().size()));
    out.write(payload.str().data(), static_cast<std::streamsize>(payload.str().size()));
    out.flush();
    if (!out) throw std::runtime_error("base image write failed in " + dir_.string());
  }
  std::filesystem::rename(tmp, dir_ / "base.bin");
  std::ofstream(dir_ / "wal.bin", std::ios::binary | std::ios::trunc);
  since_compact_ = 0;
}

void FileStorage::destroy() {
  std::filesystem::remove_all(dir_);
  cache_.reset();
  loaded_ = true;
  seq_ = 0;
  since_compact_ = 0;
}

}  // namespace seqpaxos
