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

#include "seqpaxos/trace.hpp"

namespace seqpaxos {

/// Property ids used in verdicts.
namespace property {
inline constexpr const char* kSC1 = "SC1";                  // decided only what was proposed
inline constexpr const char* kSC2 = "SC2";                  // per-index agreement
inline constexpr const char* kSC3 = "SC3";                  // local decisions only grow
inline constexpr const char* kSC4 = "SC4";                  // stable-tail liveness
inline constexpr const char* kDedup = "dedup";              // no duplicate in decided sequence
inline constexpr const char* kPersist = "persist-order";    // persist before dependent send
inline constexpr const char* kStale = "stale-suffix";       // Promise ships a stale suffix
inline constexpr const char* kFinality = "stop-finality";   // nothing after a decided stop
inline constexpr const char* kContinuity = "continuity";    // next config starts at the stop
inline constexpr const char* kBle = "BLE3";                 // leader ballots increase
inline constexpr const char* kError = "exception";          // a replica raised an error
}  // namespace property

struct Violation {
  std::string property;
  std::size_t record = 0;  // index into Trace::records
  std::string detail;
};

struct Verdict {
  std::vector<Violation> violations;
  bool pass() const { return violations.empty(); }
};

enum class LivenessStatus { pass, fail, not_applicable };

struct LivenessVerdict {
  LivenessStatus status = LivenessStatus::not_applicable;
  std::string reason;  // why the check did not apply
  std::size_t checked_commands = 0;
  std::vector<Violation> violations;
};

struct SafetyOptions {
  /// Enforce the no-duplicates clause. Defaults from the trace header: on
  /// when the run used dedup append and no compaction.
  std::optional<bool> dedup;
};

Verdict check_safety(const Trace& trace, const SafetyOptions& options = {});

/// Every command a client submitted at or after `stable_from` must be
/// decided at every live member of the last started configuration. Not
/// applicable when faults happen in the tail, a partition is left open, or
/// fewer than a majority of that configuration is alive at the end.
LivenessVerdict check_liveness(const Trace& trace, std::optional<Time> stable_from = {});

struct CheckReport {
  Verdict safety;
  LivenessVerdict liveness;
  bool pass() const {
    return safety.pass() && liveness.status != LivenessStatus::fail;
  }
};

CheckReport check_trace(const Trace& trace);

const char* to_string(LivenessStatus s);

/// Human-readable report with a record window around each violation.
std::string render_report(const Trace& trace, const CheckReport& report);

}  // namespace seqpaxos
