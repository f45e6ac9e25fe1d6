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

// Fixing neighborhoods and the models built from them.
//
// A neighborhood of size r leaves r integer variables free and fixes every
// other integer variable to its incumbent value. Continuous variables are
// never fixed.

#ifndef TLNS_NEIGHBORHOODS_H_
#define TLNS_NEIGHBORHOODS_H_

#include <functional>
#include <span>
#include <vector>

#include "tlns/milp.h"
#include "tlns/rng.h"

namespace tlns {

// Sorted, duplicate-free set of integer variable indices to fix.
class FixingSet {
 public:
  FixingSet() = default;
  // Sorts and deduplicates; throws ContractError for an index that is out of
  // range or not an integer variable of `model`.
  static FixingSet Of(const MilpInstance& model, std::vector<int> indices);
  // Every integer variable except those in `unfixed`.
  static FixingSet Complement(const MilpInstance& model,
                              std::span<const int> unfixed);

  const std::vector<int>& indices() const { return indices_; }
  int size() const { return static_cast<int>(indices_.size()); }
  bool empty() const { return indices_.empty(); }

  friend bool operator==(const FixingSet&, const FixingSet&) = default;

 private:
  std::vector<int> indices_;
};

// Copy of `model` with l_i = u_i = incumbent_i for i in `fixed`.
MilpInstance BuildAuxiliary(const MilpInstance& model,
                            std::span<const double> incumbent,
                            const FixingSet& fixed);

// `model` plus the local branching row
//   sum_{x̄_i = 0} x_i - sum_{x̄_i = 1} x_i <= k - |{i : x̄_i = 1}|
// over the integer variables, i.e. Hamming distance to the incumbent <= k.
MilpInstance BuildLocalBranching(const MilpInstance& model,
                                 std::span<const double> incumbent, int k);

// Unfixes r integer variables drawn uniformly without replacement.
FixingSet RandomUnfix(const MilpInstance& model, int r, Rng& rng);

// Unfixes r integer variables drawn one at a time without replacement with
// probability proportional to their remaining scores (length n; entries of
// continuous variables are ignored). Once no positive score remains, the
// rest are drawn uniformly among the zero-score variables.
FixingSet ScoreUnfix(const MilpInstance& model, std::span<const double> scores,
                     int r, Rng& rng);

// Heuristic that picks the fixing set for a neighborhood of size r.
using Fixer = std::function<FixingSet(const MilpInstance& model,
                                      const Solution& incumbent, int r,
                                      Rng& rng)>;

Fixer RandomFixer();

}  // namespace tlns

#endif  // TLNS_NEIGHBORHOODS_H_
