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

#include <benchmark/benchmark.h>

#include <filesystem>
#include <string>
#include <unistd.h>

#include "seqpaxos/checker.hpp"
#include "seqpaxos/explorer.hpp"
#include "seqpaxos/kv.hpp"
#include "seqpaxos/scenario.hpp"
#include "seqpaxos/simnet.hpp"
#include "seqpaxos/storage.hpp"

namespace seqpaxos {
namespace {

namespace fs = std::filesystem;

Scenario bundled(const std::string& name) {
  return load_scenario(fs::path(SEQPAXOS_SOURCE_DIR) / "scenarios" / (name + ".scn"));
}

PersistentState three_members() {
  PersistentState s;
  s.members = {ProcessId{1}, ProcessId{2}, ProcessId{3}};
  return s;
}

LogEntry command(std::uint64_t seq) {
  return LogEntry{make_put(1, seq, "k" + std::to_string(seq % 16), "value")};
}

void BM_VolatileAppend(benchmark::State& state) {
  VolatileStorage st;
  st.persist(InitRecord{three_members()});
  std::uint64_t seq = 0;
  for (auto _ : state) st.persist_append(command(++seq));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_VolatileAppend);

void BM_FileAppend(benchmark::State& state) {
  auto dir = fs::temp_directory_path() / ("seqpaxos-bench-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  {
    FileStorage st(dir, static_cast<std::size_t>(state.range(0)));
    st.persist(InitRecord{three_members()});
    std::uint64_t seq = 0;
    for (auto _ : state) st.persist_append(command(++seq));
  }
  fs::remove_all(dir);
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_FileAppend)->Arg(64)->Arg(1024);

void BM_KvApply(benchmark::State& state) {
  KvStore kv;
  std::uint64_t g = 0;
  for (auto _ : state) {
    kv.apply(command(g + 1), g);
    ++g;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_KvApply);

void BM_Simulate(benchmark::State& state, const char* name) {
  auto s = bundled(name);
  std::size_t records = 0;
  for (auto _ : state) {
    auto res = simulate(s);
    records = res.trace.records.size();
    benchmark::DoNotOptimize(res.final_state);
  }
  state.counters["trace_records"] = static_cast<double>(records);
}
BENCHMARK_CAPTURE(BM_Simulate, basic_3node, "basic_3node")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Simulate, chaos_5node, "chaos_5node")->Unit(benchmark::kMillisecond);

void BM_CheckTrace(benchmark::State& state) {
  auto trace = simulate(bundled("chaos_5node")).trace;
  for (auto _ : state) benchmark::DoNotOptimize(check_trace(trace));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(trace.records.size()));
}
BENCHMARK(BM_CheckTrace)->Unit(benchmark::kMillisecond);

void BM_Explore(benchmark::State& state) {
  ExploreParams p;
  p.depth = static_cast<std::size_t>(state.range(0));
  std::size_t states = 0;
  for (auto _ : state) states = explore(p).states;
  state.counters["states"] = static_cast<double>(states);
}
BENCHMARK(BM_Explore)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace seqpaxos

BENCHMARK_MAIN();
