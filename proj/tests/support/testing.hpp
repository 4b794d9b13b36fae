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

// Shared helpers for tests: seeded generators and small fixtures.

#pragma once

#include <atomic>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "seqpaxos/kv.hpp"
#include "seqpaxos/scenario.hpp"
#include "seqpaxos/types.hpp"

namespace seqpaxos::testing {

inline ProcessId P(std::uint32_t id) { return ProcessId{id}; }

inline Command C(ClientId client, std::uint64_t seq, std::string op = "op") {
  return Command{client, seq, std::move(op)};
}

inline Round R(ConfigId c, std::uint64_t b) { return Round{c, Ballot{b}}; }

inline std::filesystem::path source_dir() { return SEQPAXOS_SOURCE_DIR; }

inline Scenario bundled(const std::string& name) {
  return load_scenario(source_dir() / "scenarios" / (name + ".scn"));
}

/// Fresh empty directory under the system temp dir, unique per call.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  auto dir = std::filesystem::temp_directory_path() /
             ("seqpaxos-test-" + tag + "-" + std::to_string(::getpid()) + "-" +
              std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Seeded value generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : rng_() % n; }
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }
  bool chance(double p) { return std::uniform_real_distribution<double>(0, 1)(rng_) < p; }

  std::string word(std::size_t max_len = 6) {
    std::string s;
    auto n = between(0, max_len);
    for (std::size_t i = 0; i < n; ++i) s.push_back(static_cast<char>('a' + below(26)));
    return s;
  }

  Round round() { return Round{static_cast<ConfigId>(below(4)), Ballot{below(5000)}}; }

  StopSign stop_sign() {
    std::vector<ProcessId> ps;
    for (std::uint32_t p = 1; p <= 5; ++p) {
      if (chance(0.6)) ps.push_back(ProcessId{p});
    }
    if (ps.empty()) ps.push_back(ProcessId{1});
    return make_stop_sign(static_cast<ConfigId>(between(1, 9)), ps);
  }

  LogEntry entry() {
    if (chance(0.1)) return stop_sign();
    return Command{between(1, 5), between(1, 50), word()};
  }

  std::vector<LogEntry> entries(std::size_t max_len = 6) {
    std::vector<LogEntry> v;
    auto n = between(0, max_len);
    for (std::size_t i = 0; i < n; ++i) v.push_back(entry());
    return v;
  }

  /// A put or get on a small key space, as a client command.
  Command kv_command(ClientId client, std::uint64_t seq, std::size_t keys = 4) {
    auto key = "k" + std::to_string(below(keys));
    if (chance(0.7)) return make_put(client, seq, key, word(3));
    return make_get(client, seq, key);
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace seqpaxos::testing
