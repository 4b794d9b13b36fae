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

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "seqpaxos/codec.hpp"
#include "seqpaxos/types.hpp"

namespace seqpaxos {

struct SnapshotImage {
  std::string blob;
  std::uint64_t l_k = 0;
  friend bool operator==(const SnapshotImage&, const SnapshotImage&) = default;
};

/// Durable part of a replica of one configuration.
struct PersistentState {
  ConfigId config = 0;
  std::vector<ProcessId> members;
  std::uint64_t sigma_len = 0;
  Round n_prom;
  Round n_a;
  Log v_a;
  std::uint64_t l_d = 0;
  // Latest durable RSM snapshot; entries from snapshot->l_k on are in v_a.
  std::optional<SnapshotImage> snapshot;
  // RSM state at sigma_len, i.e. the final state of the previous
  // configuration. Never changes after the instance starts.
  std::optional<SnapshotImage> base;

  friend bool operator==(const PersistentState&, const PersistentState&) = default;
};

struct InitRecord {
  PersistentState state;
  friend bool operator==(const InitRecord&, const InitRecord&) = default;
};
struct PromisePersist {
  Round n;
  friend bool operator==(const PromisePersist&, const PromisePersist&) = default;
};
struct AcceptSyncPersist {
  Round n_a;
  std::uint64_t cut = 0;
  std::vector<LogEntry> suffix;
  friend bool operator==(const AcceptSyncPersist&, const AcceptSyncPersist&) = default;
};
struct AppendPersist {
  LogEntry entry;
  friend bool operator==(const AppendPersist&, const AppendPersist&) = default;
};
struct DecidePersist {
  std::uint64_t l_d = 0;
  friend bool operator==(const DecidePersist&, const DecidePersist&) = default;
};
struct SnapshotPersist {
  SnapshotImage image;
  friend bool operator==(const SnapshotPersist&, const SnapshotPersist&) = default;
};
struct TruncatePersist {
  std::uint64_t up_to = 0;
  friend bool operator==(const TruncatePersist&, const TruncatePersist&) = default;
};

using PersistRecord = std::variant<InitRecord, PromisePersist, AcceptSyncPersist, AppendPersist,
                                   DecidePersist, SnapshotPersist, TruncatePersist>;

/// Folds one record into a state. Monotonicity of n_prom and l_d is the
/// caller's contract; the trace checker verifies it rather than storage.
void apply_record(PersistentState& state, const PersistRecord& record);

std::string to_string(const PersistRecord& record);

void encode(Writer& w, const PersistentState& s);
PersistentState decode_persistent_state(Reader& r);
void encode(Writer& w, const PersistRecord& rec);
PersistRecord decode_record(std::uint8_t type, Reader& r);
std::uint8_t record_type(const PersistRecord& rec);

class StorageCorrupted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Storage {
 public:
  virtual ~Storage() = default;

  virtual void persist(const PersistRecord& record) = 0;
  virtual std::optional<PersistentState> load() = 0;
  /// Removes everything (configuration cleanup).
  virtual void destroy() = 0;

  void persist_promise(Round n) { persist(PromisePersist{n}); }
  void persist_accept(Round n_a, std::uint64_t cut, std::vector<LogEntry> suffix) {
    persist(AcceptSyncPersist{n_a, cut, std::move(suffix)});
  }
  void persist_append(LogEntry e) { persist(AppendPersist{std::move(e)}); }
  void persist_decide(std::uint64_t l_d) { persist(DecidePersist{l_d}); }
  void persist_snapshot(std::string blob, std::uint64_t l_k) {
    persist(SnapshotPersist{SnapshotImage{std::move(blob), l_k}});
  }
  void persist_truncate(std::uint64_t up_to) { persist(TruncatePersist{up_to}); }
};

/// In-memory backend. Survives simulated crashes because the simulator owns
/// it, not the crashed host.
class VolatileStorage : public Storage {
 public:
  void persist(const PersistRecord& record) override;
  std::optional<PersistentState> load() override { return state_; }
  void destroy() override { state_.reset(); }

  std::size_t persist_count() const { return count_; }

 private:
  std::optional<PersistentState> state_;
  std::size_t count_ = 0;
};

/// Append-only record log (wal.bin) with periodic compaction into a base
/// image (base.bin). A torn final record is discarded on load; a checksum
/// mismatch on a complete record raises StorageCorrupted.
class FileStorage : public Storage {
 public:
  explicit FileStorage(std::filesystem::path dir, std::size_t compact_every = 64);

  void persist(const PersistRecord& record) override;
  std::optional<PersistentState> load() override;
  void destroy() override;

  const std::filesystem::path& dir() const { return dir_; }

 private:
  void write_base(const PersistentState& state, std::uint64_t seq);
  void append_wal(const PersistRecord& record);

  std::filesystem::path dir_;
  std::size_t compact_every_;
  std::optional<PersistentState> cache_;
  bool loaded_ = false;
  std::uint64_t seq_ = 0;
  std::size_t since_compact_ = 0;
};

inline constexpr std::uint32_t kBaseMagic = 0x42505153;  // "SQPB"

/// Raw WAL framing, exposed for tests and tools.
std::string frame_record(const PersistRecord& rec, std::uint64_t seq);

}  // namespace seqpaxos
