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

#include <functional>
#include <string>
#include <vector>

#include "seqpaxos/checker.hpp"
#include "seqpaxos/scenario.hpp"
#include "seqpaxos/simnet.hpp"

namespace seqpaxos {

struct FuzzOptions {
  std::size_t runs = 0;
  std::uint64_t seed0 = 1;
  std::size_t threads = 1;
  Duration tail = 200;  // fault-free suffix of every run
  std::filesystem::path output_root = "out";
};

struct RunOutcome {
  std::uint64_t seed = 0;
  bool safety_pass = true;
  LivenessStatus liveness = LivenessStatus::not_applicable;
  std::string first_violation;
  std::size_t records = 0;
  std::size_t decided = 0;  // length of the longest decided sequence
};

struct FuzzSummary {
  std::size_t runs = 0;
  std::size_t safety_failures = 0;
  std::size_t liveness_pass = 0;
  std::size_t liveness_failures = 0;
  std::size_t liveness_not_applicable = 0;
  std::vector<RunOutcome> failures;
  bool pass() const { return safety_failures == 0 && liveness_failures == 0; }
};

/// The base scenario with seeded faults added: leader crashes with later
/// recovery, session drops and one partition that heals, all before the
/// fault-free tail, plus a small client workload inside the tail. Sets
/// stable_from to the start of the tail. The base script's own crashes and
/// recoveries are dropped so they cannot collide with the injected ones.
Scenario make_fuzz_variant(const Scenario& base, std::uint64_t seed, Duration tail = 200);

RunOutcome run_checked(const Scenario& scenario, const SimOptions& options = {});

FuzzSummary run_fuzz(const Scenario& base, const FuzzOptions& options);

std::string render_summary(const FuzzSummary& summary);

}  // namespace seqpaxos
