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

// Large neighborhood search, single layer and two layer.
//
// LNS repeats: pick a fixing set with the fixer, solve the auxiliary model
// exactly (time- or node-limited), keep the result if it strictly improves
// the incumbent, otherwise grow the neighborhood to ceil(eta * r) (capped at
// the number of integer variables) and count the failure. It stops after
// `count_limit` failures or when the budget runs out.
//
// TLNS wraps this: each outer iteration fixes with the outer size, presolves
// the auxiliary model once, runs an inner LNS on the reduced model and maps
// the result back. The inner size keeps its growth from one outer iteration
// to the next; the inner failure count starts at zero each time. A failed
// outer iteration grows the outer size only. The outer loop runs until the
// budget runs out.
//
// Budgets are wall-clock (time_limit, sub_time_limit) or, for reproducible
// runs, counted: sub_node_limit caps every exact solve and max_subsolves caps
// the number of exact solves of the whole run (shared by both layers). Every
// event carries the number of exact solves finished so far as a
// deterministic clock. The first event is an incumbent event for the start
// point.

#ifndef TLNS_LNS_H_
#define TLNS_LNS_H_

#include <array>
#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "tlns/milp.h"
#include "tlns/neighborhoods.h"
#include "tlns/rng.h"

namespace tlns {

struct LnsParams {
  int r = 100;  // unfixed integer variables
  double eta = 1.05;
  int count_limit = 4;
  double sub_time_limit = 5.0;
  double time_limit = 60.0;
  std::int64_t sub_node_limit = 0;  // 0: unlimited
  std::int64_t max_subsolves = 0;   // 0: unlimited
  std::int64_t max_lp_iterations = 0;  // simplex iterations over all exact solves; 0: unlimited
};

// Throws ContractError unless r >= 1, eta >= 1, count_limit >= 1, the time
// limits are > 0 and the counted limits are >= 0.
void ValidateLnsParams(const LnsParams& params);

// ceil(eta * r) capped at n_int; never below r.
int GrowNeighborhood(int r, double eta, int n_int);

enum class EventKind : std::int8_t { kIncumbent, kNeighborhoodGrown, kIterationEnd };
const char* EventKindName(EventKind kind);

enum class Phase : std::int8_t { kPresolve, kSubSolve, kPolicy, kPostsolve, kOverhead };
inline constexpr int kNumPhases = 5;
const char* PhaseName(Phase phase);

struct LnsEvent {
  double elapsed = 0.0;    // seconds since the run started
  std::int64_t step = 0;   // exact solves finished
  EventKind kind = EventKind::kIterationEnd;
  double objective = 0.0;  // incumbent objective in the original model
  int r = 0;               // neighborhood size of the event's layer
  int layer = 0;           // 0: single or outer layer, 1: inner layer
  std::int64_t work = 0;   // simplex iterations of the finished exact solves
};

struct RunLog {
  std::vector<LnsEvent> events;
  std::array<double, kNumPhases> phase_times{};
  std::int64_t iterations = 0;        // single-layer or outer iterations
  std::int64_t inner_iterations = 0;
  std::int64_t subsolves = 0;
  std::int64_t presolve_calls = 0;
  std::int64_t lp_iterations = 0;
  double elapsed = 0.0;

  double phase(Phase p) const { return phase_times[static_cast<int>(p)]; }
};

struct LnsResult {
  Solution best;
  RunLog log;
};

// Events equal in every field except wall time.
bool SameTrajectory(const RunLog& a, const RunLog& b);

// The initial incumbent: the exact solver with a solution limit of 1 under
// `time_limit`, then the all-lower and all-upper bound points.
// Throws InfeasibleInputError when none of them is feasible.
Solution InitialIncumbent(const MilpInstance& model, double time_limit);
// Only the all-lower and all-upper bound points.
Solution TrivialIncumbent(const MilpInstance& model);

struct RunControl {
  const std::atomic<bool>* stop = nullptr;
};

LnsResult RunLns(const MilpInstance& model, const Solution& start, const Fixer& fixer,
                 const LnsParams& params, Rng& rng, const RunControl& control = {});

// `outer` supplies r, eta and the run budget (time_limit, max_subsolves);
// `inner` supplies r, eta, count_limit and the exact-solve limits.
LnsResult RunTlns(const MilpInstance& model, const Solution& start, const Fixer& fixer,
                  const LnsParams& outer, const LnsParams& inner, Rng& rng,
                  const RunControl& control = {});

// One JSON object per event, then a summary line with phase times.
void WriteRunLog(const RunLog& log, std::ostream& out);
void WriteRunLog(const RunLog& log, const std::string& path);
RunLog ReadRunLog(const std::string& path);

}  // namespace tlns

#endif  // TLNS_LNS_H_
