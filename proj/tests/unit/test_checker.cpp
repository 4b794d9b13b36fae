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

#include "testing.hpp"
#include "seqpaxos/checker.hpp"
#include "seqpaxos/simnet.hpp"

namespace seqpaxos {
namespace {

bool flags(const Verdict& v, std::string_view property) {
  return std::any_of(v.violations.begin(), v.violations.end(),
                     [&](const Violation& x) { return x.property == property; });
}

std::string properties(const Verdict& v) {
  std::string out;
  for (const auto& x : v.violations) out += x.property + ": " + x.detail + "\n";
  return out;
}

Trace run(const std::string& name) { return simulate(testing::bundled(name)).trace; }

/// Indices of decide records at process `who`.
std::vector<std::size_t> decides_at(const Trace& t, const std::string& who) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < t.records.size(); ++i) {
    if (t.records[i].kind == "decide" && t.records[i].from == who) out.push_back(i);
  }
  return out;
}

/// Payload of a decide with its entry swapped for another's.
std::string with_entry_of(const TraceRecord& target, const TraceRecord& source) {
  auto g = *payload_field(target.payload, "g=");
  auto entry = source.payload.substr(source.payload.find("g=") + 2);
  entry = entry.substr(entry.find(' ') + 1);
  return "c0 g=" + g + " " + entry;
}

TEST(Checker, BundledScenariosPass) {
  for (const char* name : {"basic_3node", "leader_crash", "chaos_3node", "chaos_5node",
                           "reconfig_replace", "reconfig_full", "dedup_retry",
                           "isolated_leader_burst"}) {
    auto t = run(name);
    auto report = check_trace(t);
    EXPECT_TRUE(report.safety.pass()) << name << "\n" << properties(report.safety);
    EXPECT_NE(report.liveness.status, LivenessStatus::fail) << name;
  }
}

TEST(Checker, ConflictingDecisionViolatesAgreement) {
  auto t = run("basic_3node");
  auto d = decides_at(t, "p2");
  ASSERT_GE(d.size(), 2u);
  auto& first = t.records[d[0]];
  first.payload = with_entry_of(first, t.records[d[1]]);
  auto v = check_safety(t);
  EXPECT_TRUE(flags(v, property::kSC2)) << properties(v);
}

TEST(Checker, UnproposedDecisionViolatesValidity) {
  auto t = run("basic_3node");
  auto d = decides_at(t, "p3");
  ASSERT_FALSE(d.empty());
  auto& rec = t.records[d.back()];
  rec.payload = "c0 g=" + *payload_field(rec.payload, "g=") + " 9:9";
  EXPECT_TRUE(flags(check_safety(t), property::kSC1));
}

TEST(Checker, ShrinkingDecisionsViolateGrowth) {
  auto t = run("basic_3node");
  auto d = decides_at(t, "p1");
  ASSERT_GE(d.size(), 3u);
  t.records.push_back(t.records[d[1]]);
  t.records.back().t = t.records[t.records.size() - 2].t;
  EXPECT_TRUE(flags(check_safety(t), property::kSC3));
}

TEST(Checker, PromiseBeforePersistIsFlagged) {
  auto t = run("basic_3node");
  auto send = std::find_if(t.records.begin(), t.records.end(), [](const TraceRecord& r) {
    return r.kind == "send" && payload_head(r.payload).starts_with("Promise");
  });
  ASSERT_NE(send, t.records.end());
  auto who = send->from;
  auto it = std::find_if(std::make_reverse_iterator(send), t.records.rend(), [&](const TraceRecord& r) {
    return r.kind == "persist" && r.from == who && r.payload.find("promise{") != std::string::npos;
  });
  ASSERT_NE(it, t.records.rend());
  t.records.erase(std::next(it).base());
  EXPECT_TRUE(flags(check_safety(t), property::kPersist));
}

TEST(Checker, ReplicaErrorIsFlagged) {
  auto t = run("basic_3node");
  t.records.insert(t.records.begin() + 10,
                   TraceRecord{t.records[10].t, "error", "p1", "-", "c0 boom", std::string(kNoDigest)});
  EXPECT_TRUE(flags(check_safety(t), property::kError));
}

TEST(Checker, ParsedTraceGivesSameVerdict) {
  auto t = run("leader_crash");
  auto again = parse_trace(render(t));
  EXPECT_EQ(check_trace(again).pass(), check_trace(t).pass());
  EXPECT_EQ(render_report(again, check_trace(again)), render_report(t, check_trace(t)));
}

struct MutationCase {
  const char* scenario;
  Mutation mutation;
  const char* property;
};

TEST(Checker, MutantsAreCaught) {
  const MutationCase cases[] = {
      {"isolated_leader_burst", Mutation::skip_promise_persist, property::kPersist},
      {"isolated_leader_burst", Mutation::skip_stale_guard, property::kStale},
      {"reconfig_replace", Mutation::extend_past_stop, property::kFinality},
  };
  for (const auto& c : cases) {
    auto s = testing::bundled(c.scenario);
    s.mutation = c.mutation;
    auto v = check_safety(simulate(s).trace);
    EXPECT_TRUE(flags(v, c.property)) << to_string(c.mutation) << "\n" << properties(v);
  }
}

TEST(Liveness, MissingTailDecisionFails) {
  auto t = run("basic_3node");
  auto d = decides_at(t, "p3");
  ASSERT_FALSE(d.empty());
  std::erase_if(t.records, [](const TraceRecord& r) {
    return r.kind == "decide" && r.from == "p3" && r.t > 0;
  });
  auto v = check_liveness(t);
  EXPECT_EQ(v.status, LivenessStatus::fail);
  EXPECT_FALSE(v.violations.empty());
  EXPECT_EQ(v.violations[0].property, property::kSC4);
}

TEST(Liveness, FaultInTailIsNotApplicable) {
  auto t = run("leader_crash");
  auto v = check_liveness(t, Time{40});
  EXPECT_EQ(v.status, LivenessStatus::not_applicable);
  EXPECT_NE(v.reason.find("crash"), std::string::npos) << v.reason;
}

TEST(Liveness, NoStableTimeIsNotApplicable) {
  auto s = testing::bundled("basic_3node");
  s.stable_from.reset();
  auto v = check_liveness(simulate(s).trace);
  EXPECT_EQ(v.status, LivenessStatus::not_applicable);
}

TEST(Liveness, EmptyTailPassesVacuously) {
  auto t = run("basic_3node");
  auto v = check_liveness(t, Time{590});
  EXPECT_EQ(v.status, LivenessStatus::pass);
  EXPECT_EQ(v.checked_commands, 0u);
}

TEST(Liveness, TailCommandsAreCounted) {
  auto v = check_liveness(run("basic_3node"));
  EXPECT_EQ(v.status, LivenessStatus::pass);
  EXPECT_EQ(v.checked_commands, 10u);
}

}  // namespace
}  // namespace seqpaxos
