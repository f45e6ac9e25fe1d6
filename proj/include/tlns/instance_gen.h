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

// Seeded generators for the four benchmark families. All are minimization
// problems over binary variables:
//
//   SC   min sum x_s          s.t. sum_{s ni i} x_s >= 1 for every item i
//   CA   min -sum p_b x_b     s.t. sum_{b ni i} x_b <= 1 for every bid item i
//   MIS  min -sum x_v         s.t. x_u + x_v <= 1 for every edge uv
//   MVC  min  sum x_v         s.t. x_u + x_v >= 1 for every edge uv
//
// Generators are pure functions of GenSpec (including the seed).

#ifndef TLNS_INSTANCE_GEN_H_
#define TLNS_INSTANCE_GEN_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tlns/milp.h"
#include "tlns/rng.h"

namespace tlns {

enum class Family { kSetCover, kCombAuction, kIndependentSet, kVertexCover };

const char* FamilyName(Family family);  // "sc", "ca", "mis", "mvc"
Family ParseFamily(const std::string& name);

struct GenSpec {
  Family family = Family::kSetCover;
  // Set cover.
  int n_items = 0;
  int n_subsets = 0;
  double density = 0.05;
  // Combinatorial auction (also uses n_items). Price of a bundle B is
  // |B| * (1 + price_spread * U[0,1]).
  int n_bids = 0;
  int max_bundle = 10;
  double price_spread = 1.0;
  // Graph families.
  int n_nodes = 0;
  double avg_degree = 0.0;
  std::uint64_t seed = 0;
};

// Throws ContractError when a GenSpec invariant fails.
void ValidateGenSpec(const GenSpec& spec);

MilpInstance GenerateSetCover(const GenSpec& spec);
MilpInstance GenerateCombAuction(const GenSpec& spec);
MilpInstance GenerateIndependentSet(const GenSpec& spec);
MilpInstance GenerateVertexCover(const GenSpec& spec);
MilpInstance Generate(const GenSpec& spec);

using Edge = std::pair<int, int>;

// Erdos-Renyi G(n, p) with p = avg_degree / (n - 1); edges (u, v) with u < v
// in lexicographic order.
std::vector<Edge> ErdosRenyiEdges(int n, double avg_degree, Rng& rng);

// Builders from explicit structure.
MilpInstance BuildSetCover(int n_subsets,
                           const std::vector<std::vector<int>>& item_subsets,
                           std::string name);
MilpInstance BuildCombAuction(int n_items,
                              const std::vector<std::vector<int>>& bundles,
                              const std::vector<double>& prices,
                              std::string name);
MilpInstance BuildIndependentSet(int n, const std::vector<Edge>& edges,
                                 std::string name);
MilpInstance BuildVertexCover(int n, const std::vector<Edge>& edges,
                              std::string name);

}  // namespace tlns

#endif  // TLNS_INSTANCE_GEN_H_
