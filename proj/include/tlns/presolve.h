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

// Reversible reduction of a model whose bounds fix some variables.
//
// Reductions, repeated until nothing changes:
//   * substitute every fixed variable (l_i == u_i) into the rows and the
//     objective, accumulating a constant offset;
//   * drop rows without remaining variables (after checking them);
//   * drop rows that hold for every point in the bound box;
//   * turn singleton rows into variable bounds, fixing variables whose
//     bounds meet.
// The reduced model keeps the surviving variables and rows in their
// original relative order. Postsolve re-inserts the fixed values.

#ifndef TLNS_PRESOLVE_H_
#define TLNS_PRESOLVE_H_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "tlns/milp.h"
#include "tlns/neighborhoods.h"

namespace tlns {

enum class DropReason : std::int8_t {
  kAllFixed,
  kRedundantByActivity,
  kSingletonToBound,
};

struct PresolveMap {
  int original_n = 0;
  int original_m = 0;
  std::vector<int> kept_vars;  // original index of each reduced variable
  std::vector<int> kept_rows;  // original index of each reduced row
  std::vector<std::pair<int, double>> fixed_values;  // sorted by index
  std::vector<std::pair<int, DropReason>> dropped_rows;
  double objective_offset = 0.0;
};

struct PresolveOutcome {
  bool infeasible = false;
  int infeasible_row = -1;  // row proven unsatisfiable, or -1 for bounds
  MilpInstance reduced;
  PresolveMap map;
};

// Reduces `model` using only its own bounds. Never throws for an
// infeasible model; reports it in the outcome instead.
PresolveOutcome PresolveModel(const MilpInstance& model);

struct FixingPresolve {
  MilpInstance reduced;
  Solution reduced_incumbent;  // incumbent restricted to kept_vars
  PresolveMap map;
};

// Presolves the auxiliary model obtained by fixing `fixed` at `incumbent`.
// Throws InfeasibleInputError when the incumbent is infeasible for `model`
// or the reduction proves the auxiliary model infeasible.
FixingPresolve PresolveFixing(const MilpInstance& model,
                              const Solution& incumbent,
                              const FixingSet& fixed);

// Maps a reduced-space point back to the original space. The returned
// objective is evaluated on `original`.
Solution Postsolve(const MilpInstance& original, std::span<const double> reduced_x,
                   const PresolveMap& map);

}  // namespace tlns

#endif  // TLNS_PRESOLVE_H_
