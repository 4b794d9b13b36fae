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

#include "seqpaxos/compaction.hpp"

#include <algorithm>

namespace seqpaxos {

SnapshotLedger::SnapshotLedger(std::vector<ProcessId> members, std::uint64_t floor)
    : truncated_(floor) {
  if (members.empty()) throw std::invalid_argument("snapshot ledger: empty membership");
  for (auto p : members) latest_[p] = floor;
}

std::optional<std::uint64_t> SnapshotLedger::on_snapshot_decided(ProcessId replica, std::uint64_t,
                                                                 std::uint64_t l_k) {
  auto it = latest_.find(replica);
  if (it == latest_.end()) return std::nullopt;
  it->second = std::max(it->second, l_k);
  std::uint64_t low = it->second;
  for (const auto& [p, l] : latest_) low = std::min(low, l);
  if (low <= truncated_) return std::nullopt;
  truncated_ = low;
  return low;
}

std::uint64_t SnapshotLedger::reported(ProcessId p) const {
  auto it = latest_.find(p);
  return it == latest_.end() ? 0 : it->second;
}

std::uint64_t translate(std::uint64_t global_index, std::uint64_t offset) {
  if (global_index < offset) {
    throw TruncationViolated("index " + std::to_string(global_index) +
                             " below truncation offset " + std::to_string(offset));
  }
  return global_index - offset;
}

}  // namespace seqpaxos
