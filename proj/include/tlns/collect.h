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

// Training data from a local-branching expert.
//
// Starting from a first feasible point, each step solves the local branching
// model around the incumbent x̄. When it improves to x*, the step records the
// expert action a* (the variables that changed), positives harvested from the
// solve's solution pool, and negatives made by perturbing a*. An action is
// the sorted list of variable indices it flips; the models are pure binary,
// so variable and integer-variable indices coincide.
//
// Dataset file: JSON lines, one record per line,
//   {"instance":..,"incumbent":[..],"lb_k":..,"positives":[[..],..],
//    "negatives":[[..],..]}
// with the expert action first among the positives.

#ifndef TLNS_COLLECT_H_
#define TLNS_COLLECT_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tlns/bnb.h"
#include "tlns/errors.h"
#include "tlns/milp.h"
#include "tlns/rng.h"

namespace tlns {

// No starting point could be found for an instance.
class CollectionError : public Error {
 public:
  using Error::Error;
};

using Action = std::vector<int>;

struct SampleRecord {
  std::string instance;
  std::vector<double> incumbent;
  int lb_k = 0;
  std::vector<Action> positives;
  std::vector<Action> negatives;

  friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

struct CollectParams {
  int lb_k = 100;
  double lb_time_limit = 60.0;
  double kappa_p = 0.6;
  double kappa_n = 0.1;
  int negatives = 9;
  // Candidates tried per record before giving up on the remaining negatives.
  int negative_attempts = 30;
  double negative_time_limit = 10.0;
  double init_time_limit = 60.0;
  int max_steps = 0;  // 0: until no improvement
};

// Throws ContractError unless lb_k >= 1, 0 < kappa_n <= kappa_p < 1, the
// counts are nonnegative and the time limits positive.
void ValidateCollectParams(const CollectParams& params);

// Support of |a - b| over the variables.
Action ActionBetween(std::span<const double> a, std::span<const double> b);

// Actions of pool entries whose improvement over `incumbent` is at least
// kappa_p times that of `best`; the action of `best` comes first and is
// always included. Duplicates are dropped.
std::vector<Action> HarvestPositives(const std::vector<PoolEntry>& pool,
                                     const Solution& incumbent, const Solution& best,
                                     double kappa_p);

// Number of swaps for an expert action of the given weight.
int NegativeSwaps(int weight);

struct NegativeSample {
  Action action;
  Solution completion;  // best point with only `action` unfixed
};

struct NegativeOutcome {
  std::vector<NegativeSample> accepted;
  int attempts = 0;
};

// Perturbs `expert` by swapping NegativeSwaps(|expert|) of its indices with
// as many outside it, solves the auxiliary model with everything else fixed,
// and keeps candidates whose certified optimum improves on the incumbent by
// at most kappa_n times the expert's improvement.
NegativeOutcome GenerateNegatives(const MilpInstance& model, const Solution& incumbent,
                                  const Solution& best, const Action& expert,
                                  const CollectParams& params, Rng& rng);

struct Trajectory {
  std::vector<SampleRecord> records;
  std::vector<double> objectives;  // incumbent objective before each step, then the last
  std::vector<std::string> warnings;
};

// Throws UnsupportedModelError unless the model is pure binary and
// CollectionError when no starting point is found. `start` overrides the
// first-solution search.
Trajectory CollectLbTrajectory(const MilpInstance& model, const std::string& instance,
                               const CollectParams& params, Rng& rng,
                               const Solution* start = nullptr);

void WriteDataset(const std::vector<SampleRecord>& records, const std::string& path);
// Throws ParseError naming the record (0-based) that breaks the schema.
std::vector<SampleRecord> ReadDataset(const std::string& path);

}  // namespace tlns

#endif  // TLNS_COLLECT_H_
