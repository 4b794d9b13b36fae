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

#include "seqpaxos/ble.hpp"

#include <algorithm>

namespace seqpaxos {

BallotLeaderElection::BallotLeaderElection(ProcessId self, std::vector<ProcessId> processes,
                                           Duration delta, Ballot seed_ballot, std::uint64_t cap)
    : self_(self), processes_(std::move(processes)), cap_(cap), delta_(delta), delay_(delta) {
  if (std::find(processes_.begin(), processes_.end(), self_) == processes_.end()) {
    throw std::invalid_argument("ble: " + to_string(self_) + " is not a member");
  }
  if (delta_ == 0) throw std::invalid_argument("ble: delta must be positive");
  own_ = ballot_make(0, self_, cap_);
  max_ = std::max(own_, seed_ballot);
  // A recovering process may have led with its initial ballot already; it
  // must not be elected again in a round it has promised.
  if (seed_ballot.value != 0) {
    while (own_ <= seed_ballot) own_ = Ballot{own_.value + cap_};
  }
}

BleStep BallotLeaderElection::on_timeout() {
  BleStep step;
  if (ballots_.size() + 1 >= majority(processes_.size())) step.leader = check_leader();
  ballots_.clear();
  ++round_;
  for (auto p : processes_) {
    if (p != self_) step.sends.emplace_back(p, HeartbeatRequest{round_, max_});
  }
  step.next_timeout = delay_;
  return step;
}

std::optional<LeaderEvent> BallotLeaderElection::check_leader() {
  LeaderEvent top{self_, own_};
  for (const auto& [p, b] : ballots_) {
    if (b > top.ballot) top = LeaderEvent{p, b};
  }
  if (top.ballot < max_) {
    while (own_ <= max_) own_ = Ballot{own_.value + cap_};
    leader_.reset();
    return std::nullopt;
  }
  if (leader_ != top) {
    max_ = top.ballot;
    leader_ = top;
    return top;
  }
  return std::nullopt;
}

HeartbeatReply BallotLeaderElection::on_heartbeat_request(ProcessId, std::uint64_t round,
                                                          Ballot max_ballot) {
  max_ = std::max(max_, max_ballot);
  return HeartbeatReply{round, own_};
}

void BallotLeaderElection::on_heartbeat_reply(ProcessId from, std::uint64_t round, Ballot ballot) {
  if (round == round_) {
    ballots_[from] = ballot;
  } else {
    delay_ += delta_;
  }
}

void BallotLeaderElection::observe_ballot(Ballot b) { max_ = std::max(max_, b); }

}  // namespace seqpaxos
