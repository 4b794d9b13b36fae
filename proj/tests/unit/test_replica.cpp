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

#include <gtest/gtest.h>

#include <deque>

#include "testing.hpp"
#include "seqpaxos/replica.hpp"

namespace seqpaxos {
namespace {

using testing::C;
using testing::Gen;
using testing::P;
using testing::R;

template <typename T>
std::vector<T> only(const Outputs& out) {
  std::vector<T> v;
  for (const auto& a : out.actions) {
    if (const auto* x = std::get_if<T>(&a)) v.push_back(*x);
  }
  return v;
}

template <typename M>
std::vector<std::pair<ProcessId, M>> sent(const Outputs& out) {
  std::vector<std::pair<ProcessId, M>> v;
  for (const auto& s : only<SendAction>(out)) {
    if (const auto* m = std::get_if<M>(&s.body)) v.emplace_back(s.to, *m);
  }
  return v;
}

std::vector<ProcessId> members(std::uint32_t n) {
  std::vector<ProcessId> v;
  for (std::uint32_t i = 1; i <= n; ++i) v.push_back(P(i));
  return v;
}

ReplicaConfig config(ProcessId self, std::uint32_t n = 3) {
  return ReplicaConfig{0, members(n), self, AppendMode::dedup, 0, Mutation::none};
}

std::vector<LogEntry> commands(std::uint64_t n, ClientId client = 1) {
  std::vector<LogEntry> v;
  for (std::uint64_t i = 1; i <= n; ++i) v.push_back(C(client, i));
  return v;
}

/// A follower restored from disk with the given accepted round, log and l_d.
Replica follower(ProcessId self, Round n_prom, Round n_a, std::vector<LogEntry> log,
                 std::uint64_t l_d) {
  PersistentState st;
  st.members = members(3);
  st.n_prom = n_prom;
  st.n_a = n_a;
  st.v_a = Log(0, std::move(log));
  st.l_d = l_d;
  return Replica::recover(config(self), st);
}

/// p1 elected with ballot b and promised by every other member, empty logs.
Replica synced_leader(std::uint32_t n = 3, std::uint64_t b = 1) {
  Replica r(config(P(1), n));
  r.on_leader(P(1), Ballot{b});
  for (std::uint32_t p = 2; p <= n; ++p) r.on_promise(P(p), Promise{R(0, b), R(0, 0), {}, 0});
  return r;
}

TEST(OnLeader, FreshLeaderSendsPrepareToEachPeer) {
  Replica r(config(P(1)));
  auto out = r.on_leader(P(1), Ballot{1});
  auto prepares = sent<Prepare>(out);
  ASSERT_EQ(prepares.size(), 2u);
  for (const auto& [to, m] : prepares) {
    EXPECT_NE(to, P(1));
    EXPECT_EQ(m, (Prepare{R(0, 1), 0, R(0, 0)}));
  }
  ASSERT_FALSE(out.actions.empty());
  EXPECT_TRUE(std::holds_alternative<PersistAction>(out.actions.front()));
  EXPECT_EQ(r.role(), Role::leader);
  EXPECT_EQ(r.phase(), Phase::prepare);
}

TEST(OnLeader, SelfBelowPromiseOnlyDemotes) {
  auto r = follower(P(1), R(0, 2050), R(0, 0), {}, 0);
  auto out = r.on_leader(P(1), Ballot{1});
  EXPECT_TRUE(out.actions.empty());
  EXPECT_EQ(r.role(), Role::follower);
  EXPECT_EQ(r.n_prom(), R(0, 2050));
}

TEST(OnLeader, RecoveringFollowerAsksNewLeaderForPrepare) {
  auto r = follower(P(2), R(0, 1), R(0, 1), {}, 0);
  ASSERT_EQ(r.phase(), Phase::recover);
  auto out = r.on_leader(P(3), Ballot{3});
  auto reqs = sent<PrepareReq>(out);
  ASSERT_EQ(reqs.size(), 1u);
  EXPECT_EQ(reqs[0].first, P(3));
}

TEST(OnPrepare, ShipsEntriesBeyondLeadersDecidedLength) {
  auto log = commands(5);
  auto r = follower(P(2), R(0, 1), R(0, 1), log, 3);
  auto out = r.on_prepare(P(3), Prepare{R(0, 3), 3, R(0, 1)});
  auto promises = sent<Promise>(out);
  ASSERT_EQ(promises.size(), 1u);
  EXPECT_EQ(promises[0].second.suffix, (std::vector<LogEntry>{log[3], log[4]}));
  EXPECT_EQ(promises[0].second.na, R(0, 1));
  EXPECT_EQ(promises[0].second.ld, 3u);
}

TEST(OnPrepare, StaleFollowerShipsNothing) {
  auto r = follower(P(2), R(0, 1), R(0, 1), commands(5), 3);
  auto out = r.on_prepare(P(3), Prepare{R(0, 3), 3, R(0, 2)});
  auto promises = sent<Promise>(out);
  ASSERT_EQ(promises.size(), 1u);
  EXPECT_TRUE(promises[0].second.suffix.empty());
}

TEST(OnPrepare, LowerOrEqualRoundGetsNoReply) {
  auto r = follower(P(2), R(0, 5), R(0, 1), commands(5), 3);
  r.on_prepare(P(3), Prepare{R(0, 6), 3, R(0, 1)});  // leaves recover
  EXPECT_TRUE(r.on_prepare(P(3), Prepare{R(0, 4), 3, R(0, 1)}).actions.empty());
  EXPECT_TRUE(r.on_prepare(P(3), Prepare{R(0, 6), 3, R(0, 1)}).actions.empty());
}

TEST(OnPrepare, PersistsPromiseBeforeReplying) {
  auto r = follower(P(2), R(0, 1), R(0, 1), {}, 0);
  auto out = r.on_prepare(P(3), Prepare{R(0, 3), 0, R(0, 0)});
  ASSERT_EQ(out.actions.size(), 2u);
  const auto* pa = std::get_if<PersistAction>(&out.actions[0]);
  ASSERT_NE(pa, nullptr);
  EXPECT_EQ(std::get<PromisePersist>(pa->record).n, R(0, 3));
  EXPECT_TRUE(std::holds_alternative<SendAction>(out.actions[1]));
}

TEST(OnPromise, MajorityAdoptsBufferedProposals) {
  Replica r(config(P(1)));
  r.on_leader(P(1), Ballot{1});
  r.on_propose(C(1, 1));
  auto out = r.on_promise(P(2), Promise{R(0, 1), R(0, 0), {}, 0});
  auto syncs = sent<AcceptSync>(out);
  ASSERT_EQ(syncs.size(), 1u);
  EXPECT_EQ(syncs[0].first, P(2));
  EXPECT_EQ(syncs[0].second.suffix, (std::vector<LogEntry>{C(1, 1)}));
  EXPECT_EQ(r.phase(), Phase::accept);
}

TEST(OnPromise, AdoptedStopSignDiscardsProposals) {
  Replica r(config(P(1)));
  r.on_leader(P(1), Ballot{1});
  r.on_propose(C(1, 9));
  auto ss = make_stop_sign(1, members(3));
  r.on_promise(P(2), Promise{R(0, 1), R(0, 0), {C(1, 1), ss}, 0});
  EXPECT_TRUE(r.stopped());
  EXPECT_EQ(r.v_a().entries(), (std::vector<LogEntry>{C(1, 1), ss}));
}

TEST(OnPromise, BelowMajorityOnlyRecords) {
  Replica r(config(P(1), 5));
  r.on_leader(P(1), Ballot{1});
  auto out = r.on_promise(P(2), Promise{R(0, 1), R(0, 0), {}, 0});
  EXPECT_TRUE(out.actions.empty());
  EXPECT_EQ(r.phase(), Phase::prepare);
}

TEST(OnPromise, LateFollowerGetsLogThenDecide) {
  Replica l(config(P(1)));
  l.on_leader(P(1), Ballot{1});
  l.on_promise(P(2), Promise{R(0, 1), R(0, 0), {}, 0});
  for (const auto& c : commands(4)) l.on_propose(c);
  l.on_accepted(P(2), Accepted{R(0, 1), 4});
  ASSERT_EQ(l.l_c(), 4u);
  auto out = l.on_promise(P(3), Promise{R(0, 1), R(0, 0), {}, 0});
  ASSERT_EQ(out.actions.size(), 2u);
  const auto& sync = std::get<AcceptSync>(std::get<SendAction>(out.actions[0]).body);
  EXPECT_EQ(sync.suffix, commands(4));
  EXPECT_EQ(sync.ld, 0u);
  EXPECT_EQ(std::get<Decide>(std::get<SendAction>(out.actions[1]).body).l, 4u);
}

TEST(OnPromise, LateFollowerWithNothingChosenGetsNoDecide) {
  Replica l(config(P(1)));
  l.on_leader(P(1), Ballot{1});
  l.on_promise(P(2), Promise{R(0, 1), R(0, 0), {}, 0});
  auto out = l.on_promise(P(3), Promise{R(0, 1), R(0, 0), {}, 0});
  EXPECT_EQ(sent<AcceptSync>(out).size(), 1u);
  EXPECT_TRUE(sent<Decide>(out).empty());
}

TEST(OnPromise, WrongRoundIsIgnored) {
  Replica l(config(P(1)));
  l.on_leader(P(1), Ballot{1});
  EXPECT_TRUE(l.on_promise(P(2), Promise{R(0, 7), R(0, 0), {}, 0}).actions.empty());
  EXPECT_EQ(l.phase(), Phase::prepare);
}

TEST(OnAcceptSync, ReplacesLogAboveCut) {
  auto r = follower(P(2), R(0, 1), R(0, 1), commands(5), 3);
  r.on_prepare(P(3), Prepare{R(0, 3), 3, R(0, 1)});
  std::vector<LogEntry> xyz{C(9, 1), C(9, 2), C(9, 3)};
  auto out = r.on_accept_sync(P(3), AcceptSync{R(0, 3), xyz, 3});
  EXPECT_EQ(r.v_a().length(), 6u);
  auto acks = sent<Accepted>(out);
  ASSERT_EQ(acks.size(), 1u);
  EXPECT_EQ(acks[0].first, P(3));
  EXPECT_EQ(acks[0].second, (Accepted{R(0, 3), 6}));
}

TEST(OnAcceptSync, WrongRoundIsIgnored) {
  auto r = follower(P(2), R(0, 1), R(0, 1), commands(5), 3);
  r.on_prepare(P(3), Prepare{R(0, 3), 3, R(0, 1)});
  EXPECT_TRUE(r.on_accept_sync(P(3), AcceptSync{R(0, 6), {}, 3}).actions.empty());
}

TEST(OnAcceptSync, SecondSyncInSameRoundIsIgnored) {
  auto r = follower(P(2), R(0, 1), R(0, 1), commands(5), 3);
  r.on_prepare(P(3), Prepare{R(0, 3), 3, R(0, 1)});
  r.on_accept_sync(P(3), AcceptSync{R(0, 3), {}, 3});
  EXPECT_TRUE(r.on_accept_sync(P(3), AcceptSync{R(0, 3), commands(2), 3}).actions.empty());
  EXPECT_EQ(r.v_a().length(), 3u);
}

Replica accepting_follower(std::vector<LogEntry> log = {}) {
  Replica r(config(P(2)));
  r.on_prepare(P(1), Prepare{R(0, 1), 0, R(0, 0)});
  r.on_accept_sync(P(1), AcceptSync{R(0, 1), std::move(log), 0});
  return r;
}

TEST(OnAccept, AppendsAndAcknowledgesNewLength) {
  auto r = accepting_follower(commands(2));
  auto out = r.on_accept(P(1), Accept{R(0, 1), C(2, 1)});
  EXPECT_EQ(sent<Accepted>(out)[0].second.la, 3u);
}

TEST(OnAccept, StaleRoundIsIgnored) {
  auto r = accepting_follower();
  EXPECT_TRUE(r.on_accept(P(1), Accept{R(0, 0), C(2, 1)}).actions.empty());
}

TEST(OnAccept, EntryAfterLocalStopSignIsAnError) {
  auto r = accepting_follower({C(1, 1), make_stop_sign(1, members(3))});
  EXPECT_THROW(r.on_accept(P(1), Accept{R(0, 1), C(2, 1)}), LogStopped);
}

TEST(OnAccepted, MajorityOfTwoDecidesTwo) {
  auto l = synced_leader(3);
  for (const auto& c : commands(2)) l.on_propose(c);
  auto out = l.on_accepted(P(2), Accepted{R(0, 1), 2});
  EXPECT_EQ(l.l_c(), 2u);
  auto decides = sent<Decide>(out);
  ASSERT_FALSE(decides.empty());
  EXPECT_EQ(decides[0].second.l, 2u);
}

TEST(OnAccepted, LateSmallerAcknowledgementDecidesNothing) {
  auto l = synced_leader(3);
  for (const auto& c : commands(3)) l.on_propose(c);
  l.on_accepted(P(2), Accepted{R(0, 1), 3});
  auto out = l.on_accepted(P(3), Accepted{R(0, 1), 1});
  EXPECT_EQ(l.l_c(), 3u);
  EXPECT_TRUE(sent<Decide>(out).empty());
}

TEST(OnAccepted, ChosenLengthIsMajorityMinimum) {
  auto l = synced_leader(3);
  for (const auto& c : commands(3)) l.on_propose(c);
  l.on_accepted(P(2), Accepted{R(0, 1), 1});
  l.on_accepted(P(3), Accepted{R(0, 1), 2});
  EXPECT_EQ(l.l_c(), 2u);
}

// The longest prefix accepted by some majority, by enumerating subsets.
std::uint64_t chosen_oracle(const std::vector<std::uint64_t>& las) {
  auto n = las.size();
  std::uint64_t best = 0;
  for (std::uint64_t mask = 1; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcountll(mask)) < majority(n)) continue;
    std::uint64_t lo = UINT64_MAX;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1) lo = std::min(lo, las[i]);
    }
    best = std::max(best, lo);
  }
  return best;
}

TEST(OnAcceptedProperty, DecidedLengthMatchesSubsetOracle) {
  Gen g(31);
  for (int iter = 0; iter < 400; ++iter) {
    auto n = static_cast<std::uint32_t>(g.between(1, 7));
    auto len = g.between(0, 6);
    auto l = synced_leader(n);
    for (const auto& c : commands(len)) l.on_propose(c);
    std::vector<std::uint64_t> las{len};
    for (std::uint32_t p = 2; p <= n; ++p) {
      las.push_back(g.between(0, len));
      l.on_accepted(P(p), Accepted{R(0, 1), las.back()});
    }
    EXPECT_EQ(l.l_c(), chosen_oracle(las));
  }
}

TEST(OnDecide, DeliversTheGapInOrder) {
  auto r = accepting_follower(commands(4));
  r.on_decide(P(1), Decide{1, R(0, 1)});
  auto out = r.on_decide(P(1), Decide{3, R(0, 1)});
  auto d = only<DeliverAction>(out);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[0].index, 1u);
  EXPECT_EQ(d[1].index, 2u);
  EXPECT_EQ(r.l_d(), 3u);
}

TEST(OnDecide, StaleRoundIsIgnored) {
  auto r = accepting_follower(commands(4));
  EXPECT_TRUE(r.on_decide(P(1), Decide{2, R(0, 0)}).actions.empty());
}

TEST(OnDecide, NoProgressIsNoOp) {
  auto r = accepting_follower(commands(4));
  r.on_decide(P(1), Decide{3, R(0, 1)});
  EXPECT_TRUE(r.on_decide(P(1), Decide{2, R(0, 1)}).actions.empty());
  EXPECT_TRUE(r.on_decide(P(1), Decide{3, R(0, 1)}).actions.empty());
}

TEST(OnDecide, BeyondLocalLogIsProtocolError) {
  auto r = accepting_follower(commands(2));
  EXPECT_THROW(r.on_decide(P(1), Decide{3, R(0, 1)}), ProtocolError);
}

TEST(OnDecide, PersistsDecidedLengthBeforeDelivering) {
  auto r = accepting_follower(commands(2));
  auto out = r.on_decide(P(1), Decide{2, R(0, 1)});
  ASSERT_EQ(out.actions.size(), 3u);
  EXPECT_EQ(std::get<DecidePersist>(std::get<PersistAction>(out.actions[0]).record).l_d, 2u);
}

TEST(OnPropose, AcceptGoesToEverySyncedFollower) {
  auto l = synced_leader(3);
  auto out = l.on_propose(C(1, 1));
  EXPECT_EQ(sent<Accept>(out).size(), 2u);
}

TEST(OnPropose, DroppedAfterStopSign) {
  auto l = synced_leader(3);
  l.on_propose(make_stop_sign(1, members(3)));
  EXPECT_TRUE(l.on_propose(C(1, 1)).actions.empty());
}

TEST(OnPropose, BufferedDuringPrepareAndFlushedOnMajority) {
  Replica l(config(P(1)));
  l.on_leader(P(1), Ballot{1});
  EXPECT_TRUE(l.on_propose(C(1, 1)).actions.empty());
  EXPECT_EQ(l.proposals().size(), 1u);
  l.on_promise(P(2), Promise{R(0, 1), R(0, 0), {}, 0});
  EXPECT_TRUE(l.proposals().empty());
  EXPECT_EQ(l.v_a().entries(), (std::vector<LogEntry>{C(1, 1)}));
}

TEST(OnPropose, FollowerIgnoresProposals) {
  auto r = accepting_follower();
  EXPECT_TRUE(r.on_propose(C(1, 1)).actions.empty());
}

TEST(OnPrepareReq, LeaderResendsPrepare) {
  auto l = synced_leader(3);
  auto out = l.on_prepare_req(P(3));
  auto prepares = sent<Prepare>(out);
  ASSERT_EQ(prepares.size(), 1u);
  EXPECT_EQ(prepares[0].first, P(3));
}

TEST(OnPrepareReq, FollowerIgnoresIt) {
  auto r = accepting_follower();
  EXPECT_TRUE(r.on_prepare_req(P(3)).actions.empty());
}

TEST(OnConnectionLost, FollowerLosingLeaderRecovers) {
  auto r = accepting_follower();
  r.on_connection_lost(P(1));
  EXPECT_EQ(r.phase(), Phase::recover);
}

TEST(OnConnectionLost, LeaderLosingFollowerCarriesOn) {
  auto l = synced_leader(3);
  l.on_connection_lost(P(2));
  EXPECT_EQ(l.role(), Role::leader);
  EXPECT_EQ(l.phase(), Phase::accept);
}

TEST(OnConnectionLost, FollowerLosingOtherPeerCarriesOn) {
  auto r = accepting_follower();
  r.on_connection_lost(P(3));
  EXPECT_EQ(r.phase(), Phase::accept);
}

TEST(Recover, ResumesFromDecidedLength) {
  auto r = follower(P(2), R(0, 1), R(0, 1), commands(7), 5);
  EXPECT_EQ(r.l_d(), 5u);
  EXPECT_EQ(r.phase(), Phase::recover);
  EXPECT_EQ(r.role(), Role::follower);
}

TEST(Recover, FreshReplicaStartsEmpty) {
  Replica r(config(P(1)));
  EXPECT_EQ(r.n_prom(), R(0, 0));
  EXPECT_EQ(r.v_a().length(), 0u);
  EXPECT_EQ(r.l_d(), 0u);
  EXPECT_EQ(r.phase(), Phase::none);
}

TEST(Stopped, OnlyWithTrailingStopSign) {
  EXPECT_TRUE(accepting_follower({C(1, 1), make_stop_sign(1, members(3))}).stopped());
  EXPECT_FALSE(accepting_follower({C(1, 1)}).stopped());
  EXPECT_FALSE(accepting_follower().stopped());
}

// Random walks over a set of replicas with a lossy FIFO network, crashes with
// recovery from the persisted image, and arbitrary leader announcements.
// Every delivery must agree across replicas and be persisted first.
TEST(ReplicaProperty, RandomSchedulesAgreeAndPersistFirst) {
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    Gen g(seed);
    auto n = static_cast<std::uint32_t>(g.between(1, 5));
    struct Node {
      std::optional<Replica> r;
      PersistentState disk;
      std::uint64_t delivered = 0;
    };
    std::vector<Node> nodes(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      Replica r(config(P(i + 1), n));
      nodes[i].disk = r.initial_state();
      nodes[i].r = std::move(r);
    }
    std::vector<std::deque<MessageBody>> links(n * n);
    std::map<std::uint64_t, LogEntry> agreed;
    std::uint64_t next_cmd = 1;
    std::uint64_t ballot_seq = 0;

    auto run = [&](std::uint32_t i, Outputs out) {
      auto& node = nodes[i];
      for (auto& a : out.actions) {
        if (auto* pa = std::get_if<PersistAction>(&a)) {
          apply_record(node.disk, pa->record);
        } else if (auto* sa = std::get_if<SendAction>(&a)) {
          if (const auto* pr = std::get_if<Promise>(&sa->body)) {
            ASSERT_EQ(node.disk.n_prom, pr->n) << "seed " << seed;
          }
          if (const auto* ac = std::get_if<Accepted>(&sa->body)) {
            ASSERT_EQ(node.disk.n_a, ac->n) << "seed " << seed;
            ASSERT_GE(node.disk.v_a.length(), ac->la) << "seed " << seed;
          }
          links[i * n + (sa->to.id - 1)].push_back(sa->body);
        } else {
          const auto& d = std::get<DeliverAction>(a);
          ASSERT_EQ(d.index, node.delivered) << "seed " << seed;
          ASSERT_GE(node.disk.l_d, d.index + 1) << "seed " << seed;
          ++node.delivered;
          auto [it, fresh] = agreed.emplace(d.index, d.entry);
          if (!fresh) ASSERT_EQ(it->second, d.entry) << "seed " << seed << " g=" << d.index;
        }
      }
    };

    for (int step = 0; step < 400; ++step) {
      auto i = static_cast<std::uint32_t>(g.below(n));
      auto& node = nodes[i];
      auto choice = g.below(100);
      if (!node.r) {
        if (choice < 20) {
          node.r = Replica::recover(config(P(i + 1), n), node.disk);
          node.delivered = node.disk.l_d;
        }
        continue;
      }
      if (choice < 55) {
        auto j = static_cast<std::uint32_t>(g.below(n));
        auto& q = links[j * n + i];
        if (q.empty()) continue;
        auto body = std::move(q.front());
        q.pop_front();
        if (g.chance(0.05)) continue;  // omission
        run(i, node.r->on_message(P(j + 1), body));
      } else if (choice < 75) {
        run(i, node.r->on_propose(C(1, next_cmd++)));
      } else if (choice < 85) {
        auto l = static_cast<std::uint32_t>(g.below(n));
        if (g.chance(0.5)) ++ballot_seq;
        run(i, node.r->on_leader(P(l + 1), ballot_make(ballot_seq, P(l + 1))));
      } else if (choice < 90) {
        node.r.reset();
        for (std::uint32_t j = 0; j < n; ++j) {
          links[i * n + j].clear();
          links[j * n + i].clear();
          if (j != i && nodes[j].r) run(j, nodes[j].r->on_connection_lost(P(i + 1)));
        }
      } else {
        auto j = static_cast<std::uint32_t>(g.below(n));
        if (j == i) continue;
        links[i * n + j].clear();
        links[j * n + i].clear();
        run(i, node.r->on_connection_lost(P(j + 1)));
        if (nodes[j].r) run(j, nodes[j].r->on_connection_lost(P(i + 1)));
      }
      if (::testing::Test::HasFatalFailure()) return;
    }
  }
}

}  // namespace
}  // namespace seqpaxos
