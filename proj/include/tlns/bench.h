// Copyright 2026 The TLNS Authors
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

// Benchmark harness: primal gap, primal integral, result tables and plots.
//
// A run is measured on one of two clocks. Wall mode uses seconds since the
// run started over the horizon [0, time_limit]. Iteration mode counts
// either finished exact solves or their simplex iterations over
// [0, iteration_budget]; it is machine-independent, so its CSV omits the
// phase-time columns and reruns produce identical files.

#ifndef TLNS_BENCH_H_
#define TLNS_BENCH_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tlns/lns.h"

namespace tlns {

// kSteps counts finished exact solves, kWork their simplex iterations.
enum class TimeAxis : std::int8_t { kSeconds, kSteps, kWork };

// Normalized gap in [0, 1]: 0 when both are 0, 1 on a sign mismatch.
double PrimalGap(double pb, double bks);

// Integral of the primal gap of the incumbent events over [0, horizon]; the
// gap is 1 before the first incumbent. Events past the horizon are ignored.
// Throws ContractError for a non-finite bks or horizon <= 0.
double PrimalIntegral(const RunLog& log, double bks, double horizon,
                      TimeAxis axis = TimeAxis::kSeconds);

// Objective of the last incumbent at or before `at`, if any.
std::optional<double> PrimalBoundAt(const RunLog& log, double at,
                                    TimeAxis axis = TimeAxis::kSeconds);

enum class EngineKind : std::int8_t { kLns, kTlns, kExact };
enum class PolicyKind : std::int8_t { kRandom, kLearned };
enum class BudgetUnit : std::int8_t { kSubsolves, kLpIterations };

struct MethodSpec {
  std::string name;
  EngineKind engine = EngineKind::kLns;
  PolicyKind policy = PolicyKind::kRandom;
  LnsParams outer;  // the single layer for lns
  LnsParams inner;  // tlns only
  std::string weights;
};

struct BenchConfig {
  std::vector<std::string> instances;
  std::vector<MethodSpec> methods;
  double time_limit = 60.0;
  std::int64_t iteration_budget = 0;  // > 0 selects iteration mode
  BudgetUnit budget_unit = BudgetUnit::kSubsolves;
  std::vector<std::uint64_t> seeds = {0};
  bool computed_bks = true;
  std::map<std::string, double> bks;  // by instance path, when provided
  // Budget multiple of the BKS pre-pass; 0 skips it. Computed BKS is the
  // best final value of the pre-pass and the main runs.
  double bks_factor = 2.0;
  // "solver": exact solve with a solution limit of 1, else bound points.
  std::string start = "solver";
  double init_time_limit = 10.0;
  int threads = 0;  // 0: hardware concurrency; TLNS_THREADS caps it
};

// Throws ContractError for duplicate method names, a non-positive horizon,
// no seeds, a learned method without weights, or an exact method under a
// simplex-iteration budget.
void ValidateBenchConfig(const BenchConfig& config);

// Schema documented in the README; throws ParseError naming the field.
BenchConfig ReadBenchConfig(const std::string& path);

struct BenchRow {
  std::string instance;
  std::string method;
  std::uint64_t seed = 0;
  std::optional<double> pb_at_t;
  double pi = 0.0;
  std::int64_t iterations = 0;
  std::array<double, kNumPhases> phase_times{};
};

struct BenchResults {
  std::vector<BenchRow> rows;  // instance-major, then method, then seed
  std::map<std::string, double> bks;
  std::map<std::string, RunLog> logs;  // key: instance|method|seed
  std::vector<std::string> errors;
};

inline constexpr const char* kCsvHeader =
    "instance,method,seed,PB_at_T,PI,iterations,t_presolve,t_subsolve,t_policy,"
    "t_postsolve,t_overhead";
inline constexpr const char* kCsvSchema = "tlns-bench-1";

// Runs every (instance, method, seed) cell. Instances that fail to load are
// reported in `errors` and skipped. With a non-empty `out_dir` it writes
// results.csv, manifest.json, runs/*.jsonl and plots/*.svg.
BenchResults RunBenchmark(const BenchConfig& config, const std::string& out_dir = "");

std::string ResultsCsv(const BenchResults& results, bool iteration_mode);

struct PlotCurve {
  std::string method;
  RunLog log;
};

// Step curves of the primal bound, one per curve, with a legend and a
// horizontal line at `bks`. Throws ContractError for no curves.
std::string RenderPlot(const std::vector<PlotCurve>& curves, double bks, double horizon,
                       TimeAxis axis = TimeAxis::kSeconds);
void EmitPlot(const std::vector<PlotCurve>& curves, double bks, double horizon,
              const std::string& path, TimeAxis axis = TimeAxis::kSeconds);

}  // namespace tlns

#endif  // TLNS_BENCH_H_
