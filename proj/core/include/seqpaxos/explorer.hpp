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

#include <optional>
#include <string>
#include <vector>

#include "seqpaxos/replica.hpp"

namespace seqpaxos {

/// Bounds of a small-model exploration. Every interleaving of message
/// deliveries, leader notifications, proposals and faults within these bounds
/// is visited, modulo states already seen at the same or smaller depth.
struct ExploreParams {
  std::size_t procs = 3;
  std::size_t cmds = 2;
  std::size_t crashes = 1;
  std::size_t drops = 1;
  std::size_t elections = 2;  // fresh (leader, ballot) events
  std::size_t depth = 14;     // events per schedule
  /// Position of a stop-sign among the proposals, if any (0 = first).
  std::optional<std::size_t> stop_at;
  Mutation mutation = Mutation::none;
  AppendMode append_mode = AppendMode::dedup;
  bool check_persistence = true;
  std::size_t max_states = 20'000'000;
};

struct Counterexample {
  std::string property;
  std::string detail;
  std::vector<std::string> schedule;
};

enum class ExploreStatus { pass, violation, budget_exceeded };

struct ExploreResult {
  ExploreStatus status = ExploreStatus::pass;
  std::size_t states = 0;       // distinct states visited
  std::size_t transitions = 0;  // events executed
  std::size_t depth_cutoffs = 0;
  std::optional<Counterexample> counterexample;
};

const char* to_string(ExploreStatus s);

ExploreResult explore(const ExploreParams& params);

std::string render_result(const ExploreParams& params, const ExploreResult& result);

}  // namespace seqpaxos
