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

#include <map>
#include <optional>
#include <vector>

#include "seqpaxos/types.hpp"

namespace seqpaxos {

/// Tracks the largest decided snapshot point of every member. The log may be
/// truncated up to the minimum over all members, never further.
class SnapshotLedger {
 public:
  explicit SnapshotLedger(std::vector<ProcessId> members, std::uint64_t floor = 0);

  /// Returns the new truncation point when the all-member minimum advances.
  std::optional<std::uint64_t> on_snapshot_decided(ProcessId replica, std::uint64_t k,
                                                   std::uint64_t l_k);

  std::uint64_t truncated() const { return truncated_; }
  std::uint64_t reported(ProcessId p) const;

 private:
  std::map<ProcessId, std::uint64_t> latest_;
  std::uint64_t truncated_;
};

/// Global log index to position in the retained entries.
std::uint64_t translate(std::uint64_t global_index, std::uint64_t offset);

}  // namespace seqpaxos
