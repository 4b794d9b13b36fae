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

#include <string>
#include <variant>
#include <vector>

#include "seqpaxos/types.hpp"

namespace seqpaxos {

struct Prepare {
  Round n;
  std::uint64_t ld = 0;
  Round na;  // the leader's own accepted round, for the stale-suffix check
  friend bool operator==(const Prepare&, const Prepare&) = default;
};

struct Promise {
  Round n;
  Round na;
  std::vector<LogEntry> suffix;
  std::uint64_t ld = 0;
  friend bool operator==(const Promise&, const Promise&) = default;
};

struct AcceptSync {
  Round n;
  std::vector<LogEntry> suffix;
  std::uint64_t ld = 0;
  friend bool operator==(const AcceptSync&, const AcceptSync&) = default;
};

struct Accept {
  Round n;
  LogEntry entry;
  friend bool operator==(const Accept&, const Accept&) = default;
};

struct Accepted {
  Round n;
  std::uint64_t la = 0;
  friend bool operator==(const Accepted&, const Accepted&) = default;
};

struct Decide {
  std::uint64_t l = 0;
  Round n;
  friend bool operator==(const Decide&, const Decide&) = default;
};

struct PrepareReq {
  friend bool operator==(const PrepareReq&, const PrepareReq&) = default;
};

struct HeartbeatRequest {
  std::uint64_t round = 0;
  Ballot max_ballot;
  friend bool operator==(const HeartbeatRequest&, const HeartbeatRequest&) = default;
};

struct HeartbeatReply {
  std::uint64_t round = 0;
  Ballot ballot;
  friend bool operator==(const HeartbeatReply&, const HeartbeatReply&) = default;
};

// State transfer between configurations. `config` names the configuration
// being started; the final sequence of config-1 is its initial state.
struct StateOffer {
  ConfigId config = 0;
  std::uint64_t sigma_len = 0;
  friend bool operator==(const StateOffer&, const StateOffer&) = default;
};

struct StateRequest {
  ConfigId config = 0;
  friend bool operator==(const StateRequest&, const StateRequest&) = default;
};

struct StateChunk {
  ConfigId config = 0;
  StopSign stop;
  std::uint64_t sigma_len = 0;
  std::string snapshot;           // encoded RSM snapshot covering [0, snapshot_at)
  std::uint64_t snapshot_at = 0;
  std::vector<LogEntry> suffix;   // entries [snapshot_at, sigma_len)
  friend bool operator==(const StateChunk&, const StateChunk&) = default;
};

using MessageBody = std::variant<Prepare, Promise, AcceptSync, Accept, Accepted, Decide, PrepareReq,
                                 HeartbeatRequest, HeartbeatReply, StateOffer, StateRequest,
                                 StateChunk>;

struct Message {
  ProcessId from;
  ProcessId to;
  ConfigId config = 0;
  MessageBody body;
};

const char* message_name(const MessageBody& body);
bool is_heartbeat(const MessageBody& body);
std::string to_string(const MessageBody& body);

}  // namespace seqpaxos
