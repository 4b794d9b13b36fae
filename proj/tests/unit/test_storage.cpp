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

#include <gtest/gtest.h>

#include <fstream>

#include "testing.hpp"
#include "seqpaxos/storage.hpp"

namespace seqpaxos {
namespace {

using testing::C;
using testing::Gen;
using testing::P;
using testing::R;

namespace fs = std::filesystem;

constexpr std::size_t kFrameHeader = 1 + 8 + 4 + 4;  // type, seq, length, crc

PersistentState empty_state() {
  PersistentState s;
  s.members = {P(1), P(2), P(3)};
  return s;
}


TEST(FileStorage, FreshDirectoryHasNothing) {
  FileStorage st(testing::scratch_dir("fresh"));
  EXPECT_FALSE(st.load());
}

TEST(FileStorage, DecidedLengthSurvivesReopen) {
  auto dir = testing::scratch_dir("decide");
  {
    FileStorage st(dir);
    st.persist(InitRecord{empty_state()});
    for (std::uint64_t i = 1; i <= 5; ++i) st.persist_append(C(1, i));
    st.persist_decide(5);
  }
  FileStorage again(dir);
  auto s = again.load();
  ASSERT_TRUE(s);
  EXPECT_EQ(s->l_d, 5u);
}

TEST(FileStorage, AppendsComeBackInOrder) {
  auto dir = testing::scratch_dir("appends");
  {
    FileStorage st(dir, 1000);
    st.persist(InitRecord{empty_state()});
    for (std::uint64_t i = 1; i <= 20; ++i) st.persist_append(C(1, i));
  }
  auto s = FileStorage(dir).load();
  ASSERT_TRUE(s);
  ASSERT_EQ(s->v_a.length(), 20u);
  for (std::uint64_t i = 0; i < 20; ++i) EXPECT_EQ(s->v_a.at(i), LogEntry{C(1, i + 1)});
}

TEST(FileStorage, TruncateKeepsTail) {
  auto dir = testing::scratch_dir("truncate");
  {
    FileStorage st(dir);
    st.persist(InitRecord{empty_state()});
    for (std::uint64_t i = 1; i <= 7; ++i) st.persist_append(C(1, i));
    st.persist_decide(7);
    st.persist_truncate(3);
  }
  auto s = FileStorage(dir).load();
  ASSERT_TRUE(s);
  EXPECT_EQ(s->v_a.offset(), 3u);
  EXPECT_EQ(s->v_a.entries().size(), 4u);
}

TEST(FileStorage, TornFinalRecordIsDiscardedAtEveryCut) {
  auto dir = testing::scratch_dir("torn");
  {
    FileStorage st(dir, 1000);
    st.persist(InitRecord{empty_state()});
    st.persist_append(C(1, 1));
    st.persist_append(C(1, 2));
  }
  auto wal = dir / "wal.bin";
  auto full = fs::file_size(wal);
  auto last = frame_record(AppendPersist{C(1, 2)}, 3).size();
  std::ifstream in(wal, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), {});
  for (std::size_t keep = full - last; keep < full; ++keep) {
    {
      std::ofstream out(wal, std::ios::binary | std::ios::trunc);
      out.write(bytes.data(), static_cast<std::streamsize>(keep));
    }
    FileStorage st(dir, 1000);
    auto s = st.load();
    ASSERT_TRUE(s);
    EXPECT_EQ(s->v_a.length(), 1u) << "kept " << keep;
    EXPECT_EQ(fs::file_size(wal), full - last);  // torn bytes trimmed
  }
}

TEST(FileStorage, WritesAfterTornTailAreReadable) {
  auto dir = testing::scratch_dir("torn-resume");
  {
    FileStorage st(dir, 1000);
    st.persist(InitRecord{empty_state()});
    st.persist_append(C(1, 1));
  }
  fs::resize_file(dir / "wal.bin", fs::file_size(dir / "wal.bin") - 3);
  {
    FileStorage st(dir, 1000);
    st.load();
    st.persist_append(C(1, 9));
  }
  auto s = FileStorage(dir).load();
  ASSERT_TRUE(s);
  EXPECT_EQ(s->v_a.entries(), (std::vector<LogEntry>{C(1, 9)}));
}

TEST(FileStorage, ChecksumMismatchIsCorruption) {
  auto dir = testing::scratch_dir("crc");
  {
    FileStorage st(dir, 1000);
    st.persist(InitRecord{empty_state()});
    st.persist_append(C(1, 1));
    st.persist_append(C(1, 2));
  }
  auto wal = dir / "wal.bin";
  std::fstream f(wal, std::ios::binary | std::ios::in | std::ios::out);
  f.seekp(static_cast<std::streamoff>(kFrameHeader + 2));  // inside the first payload
  f.put('\x7f');
  f.close();
  FileStorage st(dir);
  EXPECT_THROW(st.load(), StorageCorrupted);
}

TEST(FileStorage, CorruptBaseImageIsDetected) {
  auto dir = testing::scratch_dir("base");
  {
    FileStorage st(dir);
    st.persist(InitRecord{empty_state()});
  }
  std::fstream f(dir / "base.bin", std::ios::binary | std::ios::in | std::ios::out);
  f.seekp(0);
  f.put('\0');
  f.close();
  FileStorage st(dir);
  EXPECT_THROW(st.load(), StorageCorrupted);
}

TEST(FileStorage, DestroyRemovesEverything) {
  auto dir = testing::scratch_dir("destroy");
  FileStorage st(dir);
  st.persist(InitRecord{empty_state()});
  st.destroy();
  EXPECT_FALSE(fs::exists(dir));
  EXPECT_FALSE(FileStorage(dir).load());
}

TEST(FileStorage, FrameLayoutIsHeaderThenPayload) {
  auto frame = frame_record(DecidePersist{5}, 9);
  ASSERT_EQ(frame.size(), kFrameHeader + 8);
  EXPECT_EQ(static_cast<unsigned char>(frame[0]), record_type(DecidePersist{5}));
  EXPECT_EQ(static_cast<unsigned char>(frame[1]), 9);  // seq, little endian
  EXPECT_EQ(static_cast<unsigned char>(frame[9]), 8);  // payload length
  EXPECT_EQ(static_cast<unsigned char>(frame[kFrameHeader]), 5);
}

TEST(VolatileStorage, RejectsRecordsBeforeInit) {
  VolatileStorage st;
  EXPECT_THROW(st.persist_decide(1), ProtocolError);
}

/// A random record valid for the current state.
PersistRecord random_record(Gen& g, const PersistentState& s) {
  auto len = s.v_a.length();
  auto off = s.v_a.offset();
  switch (g.below(7)) {
    case 0: return PromisePersist{R(0, s.n_prom.ballot.value + g.between(0, 3))};
    case 1: {
      auto cut = g.between(std::max(off, s.l_d), std::max(std::max(off, s.l_d), len));
      return AcceptSyncPersist{R(0, s.n_prom.ballot.value), cut, g.entries(4)};
    }
    case 2: return AppendPersist{C(g.between(1, 3), g.between(1, 99), g.word())};
    case 3: return DecidePersist{g.between(s.l_d, std::max(s.l_d, len))};
    case 4: return SnapshotPersist{SnapshotImage{g.word(12), g.between(off, s.l_d)}};
    case 5: return TruncatePersist{g.between(off, std::max(off, std::min(s.l_d, len)))};
    default: {
      if (g.chance(0.8)) return AppendPersist{C(1, g.below(9))};
      auto st = empty_state();
      st.config = static_cast<ConfigId>(g.below(3));
      st.sigma_len = g.below(4);
      st.v_a = Log(st.sigma_len);
      st.l_d = st.sigma_len;
      if (g.chance(0.5)) st.base = SnapshotImage{g.word(8), st.sigma_len};
      return InitRecord{st};
    }
  }
}

TEST(StorageProperty, FileBackendMatchesVolatileAcrossReopens) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    Gen g(seed);
    auto dir = testing::scratch_dir("prop");
    auto every = static_cast<std::size_t>(g.between(1, 12));
    auto file = std::make_unique<FileStorage>(dir, every);
    VolatileStorage mem;
    PersistentState init = empty_state();
    file->persist(InitRecord{init});
    mem.persist(InitRecord{init});
    for (int i = 0; i < 120; ++i) {
      auto rec = random_record(g, *mem.load());
      file->persist(rec);
      mem.persist(rec);
      if (g.chance(0.1)) {
        file = std::make_unique<FileStorage>(dir, every);
        ASSERT_EQ(file->load(), mem.load()) << "seed " << seed << " step " << i;
      }
    }
    EXPECT_EQ(FileStorage(dir, every).load(), mem.load()) << "seed " << seed;
    fs::remove_all(dir);
  }
}

TEST(StorageProperty, RecordsRoundTripThroughFrames) {
  Gen g(41);
  auto s = empty_state();
  for (int i = 0; i < 500; ++i) {
    auto rec = random_record(g, s);
    auto frame = frame_record(rec, 1);
    Reader r(std::string_view(frame).substr(kFrameHeader));
    auto back = decode_record(static_cast<std::uint8_t>(frame[0]), r);
    r.expect_done();
    EXPECT_EQ(back, rec);
    if (std::holds_alternative<InitRecord>(rec)) {
      s = std::get<InitRecord>(rec).state;
    } else {
      apply_record(s, rec);
    }
  }
}

}  // namespace
}  // namespace seqpaxos
