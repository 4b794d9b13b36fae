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

#include "testing.hpp"
#include "seqpaxos/scenario.hpp"

namespace seqpaxos {
namespace {

using testing::P;

std::size_t error_line(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ScenarioError& e) {
    return e.line();
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return 0;
}

TEST(Scenario, ParsesHeadersAndDirectives) {
  auto s = parse_scenario(
      "# comment\n"
      "name = demo\n"
      "processes = 4\n"
      "members = p1,p2,p3\n"
      "latency = 2\n"
      "jitter = 1\n"
      "append = duplicates\n"
      "storage = file\n"
      "retry_rate = 0.25\n"
      "stable_from = 100\n"
      "mutation = skip-promise-persist\n"
      "end = 500\n"
      "\n"
      "@10 crash leader\n"
      "@20 partition p1,p2 | p3,p4\n"
      "@30 propose k2 put x 5   # trailing comment\n"
      "@40 workload clients=3 commands=12 keys=2\n"
      "@50 reconfigure p1,p2,p4\n"
      "@60 recover all\n"
      "@500 end\n");
  EXPECT_EQ(s.name, "demo");
  EXPECT_EQ(s.processes, (std::vector<ProcessId>{P(1), P(2), P(3), P(4)}));
  EXPECT_EQ(s.members, (std::vector<ProcessId>{P(1), P(2), P(3)}));
  EXPECT_EQ(s.latency, 2u);
  EXPECT_EQ(s.jitter, 1u);
  EXPECT_EQ(s.append_mode, AppendMode::duplicates);
  EXPECT_EQ(s.storage, StorageBackend::file);
  EXPECT_DOUBLE_EQ(s.retry_rate, 0.25);
  EXPECT_EQ(s.stable_from, Time{100});
  EXPECT_EQ(s.mutation, Mutation::skip_promise_persist);
  EXPECT_EQ(s.end, 500u);
  ASSERT_EQ(s.directives.size(), 7u);
  EXPECT_TRUE(s.directives[0].target_leader);
  EXPECT_EQ(s.directives[1].groups.size(), 2u);
  EXPECT_EQ(s.directives[2].client, 2u);
  EXPECT_EQ(s.directives[2].key, "x");
  EXPECT_EQ(s.directives[2].value, "5");
  EXPECT_EQ(s.directives[3].commands, 12u);
  EXPECT_EQ(s.directives[4].procs, (std::vector<ProcessId>{P(1), P(2), P(4)}));
  EXPECT_TRUE(s.directives[5].target_all);
  EXPECT_EQ(s.directives[2].line, 16u);
}

TEST(Scenario, MembersDefaultToAllProcesses) {
  auto s = parse_scenario("processes = 3\n@10 end\n");
  EXPECT_EQ(s.members, s.processes);
}

TEST(Scenario, ErrorsCarryTheirLine) {
  EXPECT_EQ(error_line("processes = 3\n@20 heal\n@10 heal\n"), 3u);
  EXPECT_EQ(error_line("processes = 3\nbogus = 1\n"), 2u);
  EXPECT_EQ(error_line("processes = 3\n@5 crash p9\n"), 2u);
  EXPECT_EQ(error_line("processes = 3\n@5 crash 2\n"), 2u);
  EXPECT_EQ(error_line("processes = 3\n@5 heal\nlatency = 1\n"), 3u);
  EXPECT_EQ(error_line("processes = 3\n@5 fly p1\n"), 2u);
  EXPECT_EQ(error_line("processes = 3\n@5 partition p1,p2 | p2,p3\n"), 2u);
  EXPECT_EQ(error_line("processes = 3\n@5 drop p1 p1\n"), 2u);
  EXPECT_EQ(error_line("processes = 3\n@5 workload clients=0 commands=1 keys=1\n"), 2u);
  EXPECT_EQ(error_line("processes = 3\nretry_rate = 1.5\n"), 2u);
  EXPECT_EQ(error_line("processes = 3\nmutation = everything\n"), 2u);
  EXPECT_EQ(error_line("processes = 3\n@5 end\n@6 heal\n"), 3u);
  EXPECT_EQ(error_line("processes = 3\nend = 10\n@20 heal\n"), 3u);
}

TEST(Scenario, MissingProcessesIsAnError) {
  EXPECT_THROW(parse_scenario("@1 end\n"), ScenarioError);
}

TEST(Scenario, RenderRoundTripsEveryBundledScenario) {
  for (const auto& entry : std::filesystem::directory_iterator(testing::source_dir() / "scenarios")) {
    if (entry.path().extension() != ".scn") continue;
    auto s = load_scenario(entry.path());
    auto text = render_scenario(s);
    auto again = parse_scenario(text);
    EXPECT_EQ(render_scenario(again), text) << entry.path();
    std::vector<std::string> before;
    std::vector<std::string> after;
    for (const auto& d : s.directives) {
      if (d.kind != DirectiveKind::end) before.push_back(render_directive(d));
    }
    for (const auto& d : again.directives) after.push_back(render_directive(d));
    EXPECT_EQ(after, before) << entry.path();
    EXPECT_EQ(again.end, s.end);
  }
}

TEST(Scenario, RenderedDirectivesParseBack) {
  const char* lines[] = {
      "@1 crash p2",  "@2 crash leader", "@3 recover p2",          "@4 recover all",
      "@5 drop p1 p3", "@6 heal",        "@7 propose k1 get key",  "@8 burst p3 50",
      "@9 cleanup p1 c0",
  };
  for (const char* l : lines) {
    auto s = parse_scenario(std::string("processes = 3\n") + l + "\n");
    ASSERT_EQ(s.directives.size(), 1u);
    EXPECT_EQ(render_directive(s.directives[0]), l);
  }
}

TEST(Scenario, LoadReportsMissingFile) {
  EXPECT_THROW(load_scenario("/nonexistent/x.scn"), ScenarioError);
}

}  // namespace
}  // namespace seqpaxos
