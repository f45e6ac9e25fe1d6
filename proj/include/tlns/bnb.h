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

// LP-based branch-and-bound for binary MILPs.
//
// The model is presolved first (fixed-variable substitution, redundant and
// singleton rows) and the search runs on the reduced model. Node selection
// is best-bound with depth-first plunging: after branching the search
// continues with the floor child while the ceiling child is queued. The
// branching variable is the most fractional one, ties to the smallest index.
// Children restart the simplex from the parent basis.
//
// At the root the LP point is rounded and repaired greedily, once, to seed
// the incumbent. Every improving solution is appended to the pool with its
// elapsed time. The search is single-threaded and, for limits other than
// time, deterministic.

#ifndef TLNS_BNB_H_
#define TLNS_BNB_H_

#include <atomic>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "tlns/milp.h"

namespace tlns {

enum class SolveStatus : std::int8_t {
  kOptimal,
  // Interrupted through the stop flag after finding a solution.
  kFeasible,
  kInfeasible,
  kTimeLimit,
  kSolutionLimit,
  kNodeLimit,
};

const char* SolveStatusName(SolveStatus status);

struct SolveOptions {
  double time_limit = std::numeric_limits<double>::infinity();  // seconds
  int solution_limit = 0;  // 0: unlimited
  double gap_tol = 0.0;
  std::int64_t node_limit = 0;  // 0: unlimited
  std::uint64_t seed = 0;
  bool presolve = true;
  // Known feasible point. It bounds the search and opens the pool but does
  // not count toward the solution limit.
  const std::vector<double>* start = nullptr;
  const std::atomic<bool>* stop = nullptr;
};

// Throws ContractError unless time_limit > 0, gap_tol >= 0 and the limits
// are nonnegative.
void ValidateSolveOptions(const SolveOptions& options);

struct PoolEntry {
  double elapsed;  // seconds since the solve started
  Solution solution;
};

struct SolverResult {
  SolveStatus status = SolveStatus::kTimeLimit;
  std::optional<Solution> best;
  double dual_bound = -std::numeric_limits<double>::infinity();
  std::vector<PoolEntry> pool;  // strictly decreasing objectives
  std::int64_t nodes = 0;
  std::int64_t lp_iterations = 0;
  double elapsed = 0.0;
};

// Throws UnsupportedModelError when an integer variable is not binary.
SolverResult SolveMilp(const MilpInstance& model, const SolveOptions& options = {});

// Writes `model` in LP format: Minimize, Subject To, Bounds, Binaries and
// General sections, coefficients in shortest round-trip decimal form.
// Variables are named x<i> and rows c<j>.
std::string WriteLpFormat(const MilpInstance& model);

// Reads the subset of LP format produced by WriteLpFormat.
MilpInstance ReadLpFormat(const std::string& text);

// Runs `solver_cmd <model.lp> <solution.sol> <time_limit>` in a temporary
// directory. The solution file holds "name value" lines; lines starting with
// '#' are comments, and a comment containing "infeasible" marks the model
// infeasible. Missing variables read as 0. The pool holds only the final
// solution.
//
// Throws AdapterUnavailableError when the executable cannot be found and
// AdapterError on a nonzero exit status or an unreadable solution.
SolverResult ExternalSolve(const MilpInstance& model, const SolveOptions& options,
                           const std::string& solver_cmd);

}  // namespace tlns

#endif  // TLNS_BNB_H_
