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

// Bounded-variable primal revised simplex for the LP relaxation of a
// MilpInstance (integrality ignored).
//
// Each row j gets a logical variable s_j with A x - s = 0 and bounds
//   LE: (-inf, b_j],  GE: [b_j, +inf),  EQ: [b_j, b_j].
// The cold start basis is all logicals with structurals at their lower
// bound; logicals that violate their bounds play the role of artificial
// variables and phase 1 minimizes their total infeasibility. Phase 2 then
// minimizes c'x. A basis from a previous solve may be supplied instead
// (bounds-only restart).
//
// The basis matrix is factorized densely (LU with partial pivoting) and
// updated in product form; it is refactorized every `refactor_interval`
// pivots. Pricing is Dantzig's rule, switching to Bland's rule after
// `degenerate_limit` consecutive degenerate pivots.

#ifndef TLNS_LP_SIMPLEX_H_
#define TLNS_LP_SIMPLEX_H_

#include <atomic>
#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tlns/milp.h"

namespace tlns {

enum class LpStatus : std::int8_t {
  kOptimal,
  kInfeasible,
  kUnbounded,
  kIterationLimit,
  // Deadline passed or stop flag raised (checked every 512 iterations).
  kStopped,
};

const char* LpStatusName(LpStatus status);

struct BoundOverride {
  int index;
  double lower;
  double upper;
};

// Basis snapshot for restarts: basic variable per row plus, for every one of
// the n + m variables, whether it is basic or at its lower/upper bound.
struct LpBasis {
  enum class State : std::int8_t { kBasic, kAtLower, kAtUpper };
  std::vector<int> head;
  std::vector<State> state;
};

struct LpOptions {
  int iteration_limit = 1'000'000;
  double feasibility_tol = 1e-6;
  double optimality_tol = 1e-7;
  double pivot_tol = 1e-9;
  int refactor_interval = 100;
  int degenerate_limit = 200;
  std::optional<std::chrono::steady_clock::time_point> deadline;
  const std::atomic<bool>* stop = nullptr;
  const LpBasis* warm_start = nullptr;
};

struct LpResult {
  LpStatus status = LpStatus::kIterationLimit;
  double objective = 0.0;
  std::vector<double> x;   // structural values, length n
  std::vector<int> basis;  // basic variable indices (>= n means logical)
  LpBasis final_basis;
  int iterations = 0;
};

// Solves min c'x over the rows of `model` with bounds `lower`/`upper`
// (length n each; they replace the model bounds).
LpResult SolveLp(const MilpInstance& model, std::span<const double> lower,
                 std::span<const double> upper, const LpOptions& options = {});

// Model bounds with the given overrides applied. Throws ContractError if an
// override has lower > upper or an index out of range.
LpResult SolveLp(const MilpInstance& model,
                 std::span<const BoundOverride> overrides,
                 const LpOptions& options = {});

}  // namespace tlns

#endif  // TLNS_LP_SIMPLEX_H_
