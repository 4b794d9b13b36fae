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
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "seqpaxos/replica.hpp"
#include "seqpaxos/types.hpp"

namespace seqpaxos {

enum class StorageBackend { memory, file };

enum class DirectiveKind {
  crash,        // crash pN | crash leader
  recover,      // recover pN | recover all
  drop,         // drop pA pB
  partition,    // partition p1,p2 | p3
  heal,         // heal
  propose,      // propose kC put <key> <value> | propose kC get <key>
  workload,     // workload clients=C commands=N keys=K
  burst,        // burst pN <count>
  reconfigure,  // reconfigure p1,p2,p4
  cleanup,      // cleanup pN cK
  end,          // end
};

const char* to_string(DirectiveKind k);

struct Directive {
  Time at = 0;
  std::size_t line = 0;
  DirectiveKind kind = DirectiveKind::end;
  std::vector<ProcessId> procs;
  bool target_leader = false;  // crash leader
  bool target_all = false;     // recover all
  std::vector<std::vector<ProcessId>> groups;
  ClientId client = 0;
  bool is_put = true;
  std::string key;
  std::string value;
  std::uint64_t clients = 0;
  std::uint64_t commands = 0;
  std::uint64_t keys = 0;
  std::uint64_t count = 0;
  ConfigId config = 0;
};

/// A simulation script: `key = value` headers, then `@<time> <directive>`
/// lines in nondecreasing time order. '#' starts a comment.
struct Scenario {
  std::string name = "scenario";
  std::vector<ProcessId> processes;
  std::vector<ProcessId> members;  // configuration 0
  Duration latency = 1;
  Duration jitter = 0;
  Duration delta = 10;
  AppendMode append_mode = AppendMode::dedup;
  std::uint64_t snapshot_every = 0;
  StorageBackend storage = StorageBackend::memory;
  std::string storage_path;  // file backend directory; empty = under the output root
  std::uint64_t seed = 1;
  std::optional<Time> stable_from;
  Duration reconnect = 5;
  double retry_rate = 0.0;     // chance that a client submission is duplicated
  Duration client_retry = 20;  // resubmission period while unanswered
  Duration think_time = 2;     // gap between a response and the next command
  bool trace_heartbeats = true;
  Mutation mutation = Mutation::none;
  Time end = 1000;
  std::vector<Directive> directives;
};

class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);
/// Inverse of parse_scenario up to comments and whitespace.
std::string render_scenario(const Scenario& s);
std::string render_directive(const Directive& d);

}  // namespace seqpaxos
