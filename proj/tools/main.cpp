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

// Scenario runner: run, fuzz, explore and check.
// Exit codes: 0 pass, 1 check failure, 2 invalid input.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "seqpaxos/campaign.hpp"
#include "seqpaxos/checker.hpp"
#include "seqpaxos/explorer.hpp"
#include "seqpaxos/scenario.hpp"
#include "seqpaxos/simnet.hpp"

namespace fs = std::filesystem;
using namespace seqpaxos;

namespace {

constexpr int kPass = 0;
constexpr int kCheckFailed = 1;
constexpr int kInvalid = 2;

fs::path output_root() {
  const char* env = std::getenv("SEQPAXOS_OUT");
  return env && *env ? fs::path(env) : fs::path("out");
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::optional<Scenario> load(const std::string& file) {
  try {
    return load_scenario(file);
  } catch (const ScenarioError& e) {
    std::cerr << file << ":" << e.what() << "\n";
    return std::nullopt;
  }
}

int cmd_run(const std::string& file, std::optional<std::uint64_t> seed,
            const std::string& trace_path, bool no_check,
            std::optional<std::uint64_t> crash_at_persist) {
  auto scenario = load(file);
  if (!scenario) return kInvalid;
  if (seed) scenario->seed = *seed;
  auto root = output_root();
  SimOptions options;
  options.output_root = root;
  options.crash_at_persist = crash_at_persist;
  auto result = simulate(*scenario, options);

  fs::path trace_file = trace_path.empty() ? root / "trace.log" : fs::path(trace_path);
  write_file(trace_file, render(result.trace));
  for (auto p : scenario->processes) {
    write_file(root / "replicas" / (to_string(p) + ".state"), render_replica_state(result, p));
  }

  std::ostringstream report;
  report << "scenario " << scenario->name << " seed " << scenario->seed << "\n";
  report << "records " << result.trace.records.size() << " persists " << result.persist_count
         << " crashes " << result.crashes << "\n";
  int status = kPass;
  if (no_check) {
    report << "checks skipped\n";
  } else {
    auto check = check_trace(result.trace);
    report << render_report(result.trace, check);
    if (!check.pass()) status = kCheckFailed;
  }
  write_file(root / "report.txt", report.str());
  std::cout << report.str();
  std::cout << "trace " << trace_file.string() << "\n";
  return status;
}

int cmd_fuzz(const std::string& file, std::size_t runs, std::uint64_t seed0,
             std::size_t threads) {
  auto scenario = load(file);
  if (!scenario) return kInvalid;
  FuzzOptions options;
  options.runs = runs;
  options.seed0 = seed0;
  options.threads = threads;
  options.output_root = output_root();
  auto summary = run_fuzz(*scenario, options);
  for (const auto& f : summary.failures) {
    auto variant = make_fuzz_variant(*scenario, f.seed, options.tail);
    auto path = output_root() / "fuzz" / ("seed-" + std::to_string(f.seed) + ".scn");
    write_file(path, render_scenario(variant));
    std::cout << "replay: seqpaxos run " << path.string() << "\n";
  }
  std::cout << render_summary(summary);
  return summary.pass() ? kPass : kCheckFailed;
}

int cmd_explore(const ExploreParams& params) {
  auto result = explore(params);
  std::cout << render_result(params, result);
  return result.status == ExploreStatus::pass ? kPass : kCheckFailed;
}

int cmd_check(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    std::cerr << "cannot read " << file << "\n";
    return kInvalid;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  Trace trace;
  try {
    trace = parse_trace(buf.str());
  } catch (const TraceParseError& e) {
    std::cerr << file << ": " << e.what() << "\n";
    return kInvalid;
  }
  auto report = check_trace(trace);
  std::cout << render_report(trace, report);
  return report.pass() ? kPass : kCheckFailed;
}

Mutation parse_mutation(const std::string& s) {
  for (auto m : {Mutation::none, Mutation::skip_promise_persist, Mutation::accept_lower_round,
                 Mutation::skip_stale_guard, Mutation::extend_past_stop}) {
    if (s == to_string(m)) return m;
  }
  throw CLI::ValidationError("--mutation", "unknown mutation " + s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"seqpaxos: deterministic simulation and checking of sequence consensus"};
  app.require_subcommand(1);

  std::string run_file;
  std::uint64_t run_seed = 0;
  std::string trace_path;
  bool no_check = false;
  std::uint64_t crash_at = 0;
  auto* run = app.add_subcommand("run", "Run one scenario and check its trace");
  run->add_option("file", run_file, "Scenario file")->required();
  auto* seed_opt = run->add_option("--seed", run_seed, "Override the scenario seed");
  run->add_option("--trace", trace_path, "Trace output path (default: $SEQPAXOS_OUT/trace.log)");
  run->add_flag("--no-check", no_check, "Skip the trace checker");
  auto* crash_opt =
      run->add_option("--crash-at-persist", crash_at, "Crash the process doing the k-th persist");

  std::string fuzz_file;
  std::size_t runs = 0;
  std::uint64_t seed0 = 1;
  std::size_t threads = 1;
  auto* fuzz = app.add_subcommand("fuzz", "Run seeded fault-injection variants of a scenario");
  fuzz->add_option("file", fuzz_file, "Base scenario file")->required();
  fuzz->add_option("--runs", runs, "Number of runs")->required();
  fuzz->add_option("--seed0", seed0, "First seed");
  fuzz->add_option("--threads", threads, "Worker threads");

  ExploreParams params;
  std::string mutation = "none";
  std::size_t stop_at = 0;
  auto* exp = app.add_subcommand("explore", "Exhaustively explore a small model");
  exp->add_option("--procs", params.procs, "Processes")->check(CLI::Range(1, 5));
  exp->add_option("--cmds", params.cmds, "Client commands");
  exp->add_option("--crashes", params.crashes, "Crash budget");
  exp->add_option("--drops", params.drops, "Session drop budget");
  exp->add_option("--elections", params.elections, "Leader elections");
  exp->add_option("--depth", params.depth, "Events per schedule");
  exp->add_option("--max-states", params.max_states, "State budget");
  auto* stop_opt = exp->add_option("--stop-at", stop_at, "Propose a stop-sign at this position");
  exp->add_option("--mutation", mutation, "Protocol mutation to inject");

  std::string check_file;
  auto* chk = app.add_subcommand("check", "Check an existing trace file");
  chk->add_option("file", check_file, "Trace file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kPass : kInvalid;
  }

  try {
    if (run->parsed()) {
      return cmd_run(run_file, *seed_opt ? std::optional(run_seed) : std::nullopt, trace_path,
                     no_check, *crash_opt ? std::optional(crash_at) : std::nullopt);
    }
    if (fuzz->parsed()) return cmd_fuzz(fuzz_file, runs, seed0, threads);
    if (exp->parsed()) {
      params.mutation = parse_mutation(mutation);
      if (*stop_opt) params.stop_at = stop_at;
      return cmd_explore(params);
    }
    if (chk->parsed()) return cmd_check(check_file);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCheckFailed;
  }
  return kInvalid;
}
