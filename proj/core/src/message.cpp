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

#include "seqpaxos/message.hpp"

namespace seqpaxos {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string num(std::uint64_t v) { return std::to_string(v); }

}  // namespace

const char* message_name(const MessageBody& body) {
  static constexpr const char* kNames[] = {
      "Prepare",          "Promise",        "AcceptSync", "Accept",       "Accepted",
      "Decide",           "PrepareReq",     "HeartbeatRequest", "HeartbeatReply",
      "StateOffer",       "StateRequest",   "StateChunk"};
  return kNames[body.index()];
}

bool is_heartbeat(const MessageBody& body) {
  return std::holds_alternative<HeartbeatRequest>(body) ||
         std::holds_alternative<HeartbeatReply>(body);
}

std::string to_string(const MessageBody& body) {
  return std::visit(
      Overloaded{
          [](const Prepare& m) {
            return "Prepare{n=" + to_string(m.n) + ",ld=" + num(m.ld) + ",na=" + to_string(m.na) +
                   "}";
          },
          [](const Promise& m) {
            return "Promise{n=" + to_string(m.n) + ",na=" + to_string(m.na) + ",ld=" + num(m.ld) +
                   ",suffix=" + to_string(m.suffix) + "}";
          },
          [](const AcceptSync& m) {
            return "AcceptSync{n=" + to_string(m.n) + ",ld=" + num(m.ld) +
                   ",suffix=" + to_string(m.suffix) + "}";
          },
          [](const Accept& m) {
            return "Accept{n=" + to_string(m.n) + ",entry=" + to_string(m.entry) + "}";
          },
          [](const Accepted& m) {
            return "Accepted{n=" + to_string(m.n) + ",la=" + num(m.la) + "}";
          },
          [](const Decide& m) { return "Decide{l=" + num(m.l) + ",n=" + to_string(m.n) + "}"; },
          [](const PrepareReq&) { return std::string("PrepareReq{}"); },
          [](const HeartbeatRequest& m) {
            return "HeartbeatRequest{round=" + num(m.round) + ",max=" + num(m.max_ballot.value) +
                   "}";
          },
          [](const HeartbeatReply& m) {
            return "HeartbeatReply{round=" + num(m.round) + ",ballot=" + num(m.ballot.value) + "}";
          },
          [](const StateOffer& m) {
            return "StateOffer{config=" + num(m.config) + ",len=" + num(m.sigma_len) + "}";
          },
          [](const StateRequest& m) { return "StateRequest{config=" + num(m.config) + "}"; },
          [](const StateChunk& m) {
            return "StateChunk{config=" + num(m.config) + ",stop=" + to_string(m.stop) +
                   ",len=" + num(m.sigma_len) + ",at=" + num(m.snapshot_at) +
                   ",snapshot=" + num(m.snapshot.size()) + "B,suffix=" + to_string(m.suffix) + "}";
          },
      },
      body);
}

}  // namespace seqpaxos
