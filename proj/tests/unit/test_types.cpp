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

#include <algorithm>
#include <tuple>

#include "testing.hpp"
#include "seqpaxos/types.hpp"

namespace seqpaxos {
namespace {

using testing::C;
using testing::Gen;
using testing::P;
using testing::R;

TEST(Ballot, MakeEvaluatesSequenceTimesCapPlusId) {
  EXPECT_EQ(ballot_make(0, P(2), 3).value, 2u);
  EXPECT_EQ(ballot_make(2, P(1), 3).value, 7u);
}

TEST(Ballot, MakeRejectsIdAtOrAboveCap) {
  EXPECT_THROW(ballot_make(1, P(5), 3), std::invalid_argument);
}

TEST(Ballot, OwnerAndSequenceInvertMake) {
  Gen g(11);
  for (int i = 0; i < 500; ++i) {
    auto s = g.below(100000);
    auto p = P(static_cast<std::uint32_t>(g.between(1, kBallotCap - 1)));
    auto b = ballot_make(s, p);
    EXPECT_EQ(ballot_seq(b), s);
    EXPECT_EQ(ballot_owner(b), p);
  }
}

TEST(Round, HigherConfigurationDominates) {
  EXPECT_EQ(round_cmp(R(0, 9), R(1, 0)), std::strong_ordering::less);
}

TEST(Round, EqualRoundsCompareEqual) {
  EXPECT_EQ(round_cmp(R(1, 3), R(1, 3)), std::strong_ordering::equal);
}

TEST(Round, BallotBreaksTiesWithinConfiguration) {
  EXPECT_EQ(round_cmp(R(2, 1), R(2, 0)), std::strong_ordering::greater);
}

TEST(Round, OrderMatchesLexicographicPairs) {
  Gen g(12);
  for (int i = 0; i < 2000; ++i) {
    auto a = g.round();
    auto b = g.round();
    auto expected = std::make_tuple(a.config, a.ballot.value) <=> std::make_tuple(b.config, b.ballot.value);
    EXPECT_EQ(round_cmp(a, b), expected);
  }
}

TEST(Append, DedupSkipsContainedCommand) {
  std::vector<LogEntry> v{C(1, 1), C(1, 2)};
  EXPECT_FALSE(append(v, C(1, 1), AppendMode::dedup));
  EXPECT_EQ(v, (std::vector<LogEntry>{C(1, 1), C(1, 2)}));
}

TEST(Append, DuplicatesModeAppendsAgain) {
  std::vector<LogEntry> v{C(1, 1), C(1, 2)};
  EXPECT_TRUE(append(v, C(1, 1), AppendMode::duplicates));
  EXPECT_EQ(v, (std::vector<LogEntry>{C(1, 1), C(1, 2), C(1, 1)}));
}

TEST(Append, EmptySequenceGrowsByOne) {
  std::vector<LogEntry> v;
  EXPECT_TRUE(append(v, C(1, 1), AppendMode::dedup));
  EXPECT_EQ(v, (std::vector<LogEntry>{C(1, 1)}));
}

TEST(Append, RefusesToExtendPastStopSign) {
  std::vector<LogEntry> v{C(1, 1), make_stop_sign(1, {P(1)})};
  EXPECT_THROW(append(v, C(1, 2), AppendMode::dedup), LogStopped);
}

TEST(Append, MatchesReferenceOnRandomSequences) {
  Gen g(13);
  for (int i = 0; i < 1000; ++i) {
    std::vector<LogEntry> v;
    for (int k = 0; k < 8; ++k) v.push_back(LogEntry{C(g.between(1, 3), g.between(1, 3))});
    LogEntry e = C(g.between(1, 3), g.between(1, 3));
    auto mode = g.chance(0.5) ? AppendMode::dedup : AppendMode::duplicates;
    auto expected = v;
    if (mode == AppendMode::duplicates || std::find(v.begin(), v.end(), e) == v.end()) {
      expected.push_back(e);
    }
    append(v, e, mode);
    EXPECT_EQ(v, expected);
  }
}

TEST(PrefixSuffix, TakesAndDropsLeadingEntries) {
  std::vector<LogEntry> v{C(1, 1), C(1, 2), C(1, 3)};
  EXPECT_EQ(prefix(v, 2), (std::vector<LogEntry>{C(1, 1), C(1, 2)}));
  EXPECT_EQ(suffix(v, 2), (std::vector<LogEntry>{C(1, 3)}));
}

TEST(PrefixSuffix, SuffixClampsAtLength) {
  std::vector<LogEntry> v{C(1, 1)};
  EXPECT_TRUE(suffix(v, 5).empty());
}

TEST(PrefixSuffix, ConcatenationRestoresSequence) {
  Gen g(14);
  for (int i = 0; i < 500; ++i) {
    auto v = g.entries(10);
    auto l = g.below(v.size() + 3);
    auto joined = prefix(v, l);
    auto tail = suffix(v, l);
    joined.insert(joined.end(), tail.begin(), tail.end());
    EXPECT_EQ(joined, v);
    EXPECT_EQ(prefix(v, l).size(), std::min<std::size_t>(l, v.size()));
  }
}

TEST(MaxPromise, HighestRoundWinsEvenIfShorter) {
  std::vector<PromiseRecord> ps{{ReplicaId{0, P(1)}, R(0, 2), {C(1, 1)}},
                                {ReplicaId{0, P(2)}, R(0, 3), {}}};
  EXPECT_TRUE(max_promise(ps).suffix.empty());
}

TEST(MaxPromise, LongestWinsWithinEqualRounds) {
  std::vector<PromiseRecord> ps{{ReplicaId{0, P(1)}, R(0, 2), {C(1, 1)}},
                                {ReplicaId{0, P(2)}, R(0, 2), {C(1, 1), C(1, 2)}}};
  EXPECT_EQ(max_promise(ps).suffix, (std::vector<LogEntry>{C(1, 1), C(1, 2)}));
}

TEST(MaxPromise, SingletonIsItself) {
  std::vector<PromiseRecord> ps{{ReplicaId{0, P(1)}, R(0, 1), {}}};
  EXPECT_TRUE(max_promise(ps).suffix.empty());
}

TEST(MaxPromise, MatchesBruteForceMaximum) {
  Gen g(15);
  for (int i = 0; i < 500; ++i) {
    std::vector<PromiseRecord> ps;
    auto n = g.between(1, 5);
    for (std::uint32_t k = 1; k <= n; ++k) {
      ps.push_back({ReplicaId{0, P(k)}, R(0, g.between(0, 3)), g.entries(4)});
    }
    const auto& got = max_promise(ps);
    for (const auto& p : ps) {
      bool beats = p.accepted_round > got.accepted_round ||
                   (p.accepted_round == got.accepted_round && p.suffix.size() > got.suffix.size());
      EXPECT_FALSE(beats);
    }
  }
}

TEST(Log, StoppedOnlyWhenLastEntryIsStopSign) {
  Log empty;
  EXPECT_FALSE(empty.ends_with_stop());
  Log one(0, {C(1, 1)});
  EXPECT_FALSE(one.ends_with_stop());
  Log stopped(0, {C(1, 1), make_stop_sign(1, {P(1)})});
  EXPECT_TRUE(stopped.ends_with_stop());
}

TEST(Log, TruncateFrontKeepsGlobalIndexing) {
  Gen g(16);
  for (int i = 0; i < 300; ++i) {
    std::vector<LogEntry> v;
    for (std::uint64_t k = 0; k < 12; ++k) v.push_back(C(1, k));
    Log log(0, v);
    auto m = g.below(13);
    log.truncate_front(m);
    EXPECT_EQ(log.offset(), m);
    EXPECT_EQ(log.length(), v.size());
    for (std::uint64_t k = m; k < v.size(); ++k) EXPECT_EQ(log.at(k), v[k]);
    if (m > 0) EXPECT_THROW(log.at(m - 1), TruncationViolated);
    EXPECT_THROW(log.at(v.size()), std::out_of_range);
  }
}

TEST(Log, TruncateOfSevenToThreeKeepsFour) {
  std::vector<LogEntry> v;
  for (std::uint64_t k = 0; k < 7; ++k) v.push_back(C(1, k));
  Log log(0, v);
  log.truncate_front(3);
  EXPECT_EQ(log.offset(), 3u);
  EXPECT_EQ(log.entries().size(), 4u);
}

TEST(Majority, IsMoreThanHalf) {
  for (std::size_t n = 1; n < 20; ++n) {
    EXPECT_GT(2 * majority(n), n);
    EXPECT_LE(2 * (majority(n) - 1), n);
  }
}

TEST(StopSign, MembersAreSortedAndUnique) {
  auto ss = make_stop_sign(2, {P(3), P(1), P(3), P(2)});
  EXPECT_EQ(ss.processes, (std::vector<ProcessId>{P(1), P(2), P(3)}));
  EXPECT_EQ(ss.next_config, 2u);
}

}  // namespace
}  // namespace seqpaxos
