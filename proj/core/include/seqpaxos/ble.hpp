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
#include <utility>
#include <vector>

#include "seqpaxos/message.hpp"
#include "seqpaxos/types.hpp"

namespace seqpaxos {

inline constexpr Duration kDefaultDelta = 10;

struct LeaderEvent {
  ProcessId leader;
  Ballot ballot;
  friend bool operator==(const LeaderEvent&, const LeaderEvent&) = default;
};

struct BleStep {
  std::vector<std::pair<ProcessId, MessageBody>> sends;
  std::optional<LeaderEvent> leader;
  Duration next_timeout = 0;
};

/// Gossip-based ballot leader election. Every timeout closes a heartbeat
/// round: with replies from a majority (self included) the highest ballot
/// seen becomes leader, unless it is below the largest ballot ever heard of,
/// in which case the own ballot is raised past it and the round is skipped.
class BallotLeaderElection {
 public:
  BallotLeaderElection(ProcessId self, std::vector<ProcessId> processes, Duration delta,
                       Ballot seed_ballot = {}, std::uint64_t cap = kBallotCap);

  BleStep on_timeout();
  std::optional<LeaderEvent> check_leader();
  HeartbeatReply on_heartbeat_request(ProcessId from, std::uint64_t round, Ballot max_ballot);
  void on_heartbeat_reply(ProcessId from, std::uint64_t round, Ballot ballot);

  /// Folds in a ballot learned outside heartbeats (a promised round).
  void observe_ballot(Ballot b);

  ProcessId self() const { return self_; }
  const std::vector<ProcessId>& processes() const { return processes_; }
  std::uint64_t round() const { return round_; }
  Ballot own_ballot() const { return own_; }
  Ballot max_ballot() const { return max_; }
  const std::optional<LeaderEvent>& leader() const { return leader_; }
  Duration delay() const { return delay_; }
  Duration delta() const { return delta_; }
  const std::map<ProcessId, Ballot>& ballots() const { return ballots_; }

 private:
  ProcessId self_;
  std::vector<ProcessId> processes_;
  std::uint64_t cap_;
  std::uint64_t round_ = 0;
  std::map<ProcessId, Ballot> ballots_;
  Ballot own_;
  std::optional<LeaderEvent> leader_;
  Ballot max_;
  Duration delta_;
  Duration delay_;
};

}  // namespace seqpaxos
