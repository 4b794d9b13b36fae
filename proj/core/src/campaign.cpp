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

#include "seqpaxos/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

namespace seqpaxos {
namespace {

Directive at(Time t, DirectiveKind kind) {
  Directive d;
  d.at = t;
  d.kind = kind;
  return d;
}

}  // namespace

Scenario make_fuzz_variant(const Scenario& base, std::uint64_t seed, Duration tail) {
  Scenario s = base;
  // Crashes and recoveries come from the fuzzer only; scripted ones could
  // target a process the fuzzer already took down or brought back.
  std::erase_if(s.directives, [](const Directive& d) {
    return d.kind == DirectiveKind::crash || d.kind == DirectiveKind::recover;
  });
  s.seed = seed;
  s.name = base.name + "-fuzz" + std::to_string(seed);
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + 17);
  auto pick = [&](std::uint64_t lo, std::uint64_t hi) { return lo + rng() % (hi - lo + 1); };

  Time stable = s.end > tail ? s.end - tail : 0;
  Time lo = 40;
  Time quiet = stable > 20 ? stable - 20 : 0;  // everything is back up by then
  std::vector<Directive> faults;
  if (quiet > lo + 40) {
    Time last = quiet - 10;
    auto crashes = pick(1, 2);
    for (std::uint64_t i = 0; i < crashes; ++i) {
      auto t = pick(lo, last - 20);
      auto crash = at(t, DirectiveKind::crash);
      crash.target_leader = true;
      faults.push_back(crash);
      auto rec = at(std::min<Time>(t + pick(10, 80), last), DirectiveKind::recover);
      rec.target_all = true;
      faults.push_back(rec);
    }
    auto drops = pick(1, 3);
    for (std::uint64_t i = 0; i < drops; ++i) {
      auto d = at(pick(lo, last), DirectiveKind::drop);
      auto a = rng() % s.processes.size();
      auto b = (a + 1 + rng() % (s.processes.size() - 1)) % s.processes.size();
      d.procs = {s.processes[a], s.processes[b]};
      faults.push_back(d);
    }
    auto t = pick(lo, last - 20);
    auto part = at(t, DirectiveKind::partition);
    std::vector<ProcessId> shuffled = s.processes;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    auto minority = pick(1, (shuffled.size() - 1) / 2 == 0 ? 1 : (shuffled.size() - 1) / 2);
    std::vector<ProcessId> g1(shuffled.begin(), shuffled.begin() + static_cast<long>(minority));
    std::vector<ProcessId> g2(shuffled.begin() + static_cast<long>(minority), shuffled.end());
    std::sort(g1.begin(), g1.end());
    std::sort(g2.begin(), g2.end());
    part.groups = {g1, g2};
    faults.push_back(part);
    faults.push_back(at(std::min<Time>(t + pick(20, 120), last), DirectiveKind::heal));
    auto final_recover = at(last, DirectiveKind::recover);
    final_recover.target_all = true;
    faults.push_back(final_recover);
    faults.push_back(at(last, DirectiveKind::heal));
  }
  for (auto& d : faults) s.directives.push_back(d);
  // Fresh client traffic inside the quiet tail, so liveness has something
  // to check. Sized to finish well before the end.
  if (stable + 10 < s.end) {
    auto load = at(stable + 5, DirectiveKind::workload);
    auto rounds = std::clamp<Duration>(tail / (4 * (s.think_time + s.client_retry)), 1, 3);
    load.clients = 2;
    load.commands = 2 * rounds;
    load.keys = 4;
    s.directives.push_back(load);
  }
  std::stable_sort(s.directives.begin(), s.directives.end(),
                   [](const Directive& a, const Directive& b) { return a.at < b.at; });
  s.stable_from = stable;
  return s;
}

RunOutcome run_checked(const Scenario& scenario, const SimOptions& options) {
  RunOutcome out;
  out.seed = scenario.seed;
  auto result = simulate(scenario, options);
  auto report = check_trace(result.trace);
  out.safety_pass = report.safety.pass();
  out.liveness = report.liveness.status;
  out.records = result.trace.records.size();
  for (const auto& [p, hist] : result.history) out.decided = std::max(out.decided, hist.size());
  if (!report.safety.violations.empty()) {
    const auto& v = report.safety.violations.front();
    out.first_violation = v.property + ": " + v.detail;
  } else if (!report.liveness.violations.empty()) {
    const auto& v = report.liveness.violations.front();
    out.first_violation = v.property + ": " + v.detail;
  }
  return out;
}

FuzzSummary run_fuzz(const Scenario& base, const FuzzOptions& options) {
  std::vector<RunOutcome> outcomes(options.runs);
  std::atomic<std::size_t> next{0};
  auto worker = [&](std::size_t w) {
    SimOptions sim;
    sim.output_root = options.output_root / ("fuzz-worker" + std::to_string(w));
    for (std::size_t i = next++; i < options.runs; i = next++) {
      auto variant = make_fuzz_variant(base, options.seed0 + i, options.tail);
      outcomes[i] = run_checked(variant, sim);
    }
  };
  auto threads = std::max<std::size_t>(1, std::min(options.threads, options.runs));
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(worker, w);
    for (auto& t : pool) t.join();
  }

  FuzzSummary summary;
  summary.runs = options.runs;
  for (const auto& o : outcomes) {
    if (!o.safety_pass) ++summary.safety_failures;
    switch (o.liveness) {
      case LivenessStatus::pass: ++summary.liveness_pass; break;
      case LivenessStatus::fail: ++summary.liveness_failures; break;
      case LivenessStatus::not_applicable: ++summary.liveness_not_applicable; break;
    }
    if (!o.safety_pass || o.liveness == LivenessStatus::fail) summary.failures.push_back(o);
  }
  return summary;
}

std::string render_summary(const FuzzSummary& s) {
  std::ostringstream out;
  out << "runs " << s.runs << "\n";
  out << "safety_failures " << s.safety_failures << "\n";
  out << "liveness pass=" << s.liveness_pass << " fail=" << s.liveness_failures
      << " not-applicable=" << s.liveness_not_applicable << "\n";
  for (const auto& f : s.failures) {
    out << "failing seed " << f.seed << ": " << f.first_violation << "\n";
  }
  out << (s.pass() ? "PASS" : "FAIL") << "\n";
  return out.str();
}

}  // namespace seqpaxos
