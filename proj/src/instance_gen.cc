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

#include "tlns/instance_gen.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tlns/errors.h"

namespace tlns {
namespace {

// Stream ids, so each family draws from its own sequence for a given seed.
constexpr std::uint64_t kStreamSetCover = 1;
constexpr std::uint64_t kStreamAuction = 2;
constexpr std::uint64_t kStreamGraph = 3;

// Draw attempts per item when repairing set-cover coverage.
constexpr int kRepairBudget = 1000;

// Visits the positions in [0, count) selected independently with
// probability p, in increasing order (geometric skipping).
template <typename Visit>
void BernoulliPositions(int count, double p, Rng& rng, Visit visit) {
  if (p <= 0.0 || count <= 0) return;
  if (p >= 1.0) {
    for (int i = 0; i < count; ++i) visit(i);
    return;
  }
  const double log_q = std::log1p(-p);
  long long pos = -1;
  for (;;) {
    const double u = 1.0 - rng.Uniform();  // (0, 1]
    pos += 1 + static_cast<long long>(std::floor(std::log(u) / log_q));
    if (pos >= count) return;
    visit(static_cast<int>(pos));
  }
}

std::string Fmt(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

MilpData BinaryData(int n, std::string name) {
  MilpData d;
  d.name = std::move(name);
  d.num_vars = n;
  d.obj.assign(n, 0.0);
  d.lower.assign(n, 0.0);
  d.upper.assign(n, 1.0);
  d.is_integer.assign(n, true);
  return d;
}

}  // namespace

const char* FamilyName(Family family) {
  switch (family) {
    case Family::kSetCover:
      return "sc";
    case Family::kCombAuction:
      return "ca";
    case Family::kIndependentSet:
      return "mis";
    case Family::kVertexCover:
      return "mvc";
  }
  return "?";
}

Family ParseFamily(const std::string& name) {
  if (name == "sc") return Family::kSetCover;
  if (name == "ca") return Family::kCombAuction;
  if (name == "mis") return Family::kIndependentSet;
  if (name == "mvc") return Family::kVertexCover;
  throw ContractError("unknown family \"" + name + "\" (sc, ca, mis, mvc)");
}

void ValidateGenSpec(const GenSpec& spec) {
  switch (spec.family) {
    case Family::kSetCover:
      if (spec.n_items < 1 || spec.n_subsets < 1) {
        throw ContractError("set cover: item and subset counts must be >= 1");
      }
      if (!(spec.density > 0.0 && spec.density <= 1.0)) {
        throw ContractError("set cover: density must lie in (0, 1]");
      }
      break;
    case Family::kCombAuction:
      if (spec.n_items < 1 || spec.n_bids < 1) {
        throw ContractError("auction: item and bid counts must be >= 1");
      }
      if (spec.max_bundle < 2) throw ContractError("auction: max_bundle must be >= 2");
      if (!(spec.price_spread >= 0.0)) {
        throw ContractError("auction: price_spread must be nonnegative");
      }
      break;
    case Family::kIndependentSet:
    case Family::kVertexCover:
      if (spec.n_nodes < 1) throw ContractError("graph: n_nodes must be >= 1");
      if (!(spec.avg_degree >= 0.0 && spec.avg_degree < spec.n_nodes)) {
        throw ContractError("graph: avg_degree must lie in [0, n_nodes)");
      }
      if (spec.n_nodes == 1 && spec.avg_degree > 0.0) {
        throw ContractError("graph: a single node has degree 0");
      }
      break;
  }
}

MilpInstance BuildSetCover(int n_subsets,
                           const std::vector<std::vector<int>>& item_subsets,
                           std::string name) {
  MilpData d = BinaryData(n_subsets, std::move(name));
  std::fill(d.obj.begin(), d.obj.end(), 1.0);
  for (const auto& subsets : item_subsets) {
    SparseRow row;
    row.cols = subsets;
    std::sort(row.cols.begin(), row.cols.end());
    row.vals.assign(row.cols.size(), 1.0);
    d.rows.push_back(std::move(row));
    d.sense.push_back(Sense::kGe);
    d.rhs.push_back(1.0);
  }
  return MilpInstance(std::move(d));
}

MilpInstance GenerateSetCover(const GenSpec& spec) {
  if (spec.family != Family::kSetCover) throw ContractError("spec is not SC");
  ValidateGenSpec(spec);
  if (spec.n_subsets < 2) {
    throw ContractError("set cover: density too low to repair coverage (need >= 2 subsets)");
  }
  Rng rng(spec.seed, kStreamSetCover);
  std::vector<std::vector<int>> items(spec.n_items);
  std::vector<char> member(spec.n_subsets, 0);
  for (auto& subsets : items) {
    BernoulliPositions(spec.n_subsets, spec.density, rng,
                       [&](int s) { subsets.push_back(s); });
    for (int s : subsets) member[s] = 1;
    int budget = kRepairBudget;
    while (subsets.size() < 2) {
      if (budget-- == 0) {
        throw ContractError("set cover: density too low to repair within retry budget");
      }
      const int s = static_cast<int>(rng.Below(spec.n_subsets));
      if (!member[s]) {
        member[s] = 1;
        subsets.push_back(s);
      }
    }
    for (int s : subsets) member[s] = 0;
  }
  return BuildSetCover(spec.n_subsets, items,
                       "sc-i" + std::to_string(spec.n_items) + "-s" +
                           std::to_string(spec.n_subsets) + "-d" +
                           Fmt(spec.density) + "-seed" + std::to_string(spec.seed));
}

MilpInstance BuildCombAuction(int n_items,
                              const std::vector<std::vector<int>>& bundles,
                              const std::vector<double>& prices,
                              std::string name) {
  if (bundles.size() != prices.size()) {
    throw ContractError("auction: bundles and prices differ in length");
  }
  const int n = static_cast<int>(bundles.size());
  MilpData d = BinaryData(n, std::move(name));
  std::vector<std::vector<int>> bidders(n_items);
  for (int b = 0; b < n; ++b) {
    d.obj[b] = -prices[b];
    for (int item : bundles[b]) {
      if (item < 0 || item >= n_items) throw ContractError("auction: item out of range");
      bidders[item].push_back(b);
    }
  }
  for (auto& bids : bidders) {
    if (bids.empty()) continue;
    SparseRow row;
    row.cols = std::move(bids);
    row.vals.assign(row.cols.size(), 1.0);
    d.rows.push_back(std::move(row));
    d.sense.push_back(Sense::kLe);
    d.rhs.push_back(1.0);
  }
  return MilpInstance(std::move(d));
}

MilpInstance GenerateCombAuction(const GenSpec& spec) {
  if (spec.family != Family::kCombAuction) throw ContractError("spec is not CA");
  ValidateGenSpec(spec);
  Rng rng(spec.seed, kStreamAuction);
  std::vector<std::vector<int>> bundles(spec.n_bids);
  std::vector<double> prices(spec.n_bids);
  const int max_size = std::min(spec.max_bundle, spec.n_items);
  for (int b = 0; b < spec.n_bids; ++b) {
    const int size = max_size < 2 ? max_size : rng.UniformInt(2, max_size);
    bundles[b] = SampleWithoutReplacement(spec.n_items, size, rng);
    std::sort(bundles[b].begin(), bundles[b].end());
    prices[b] = size * (1.0 + spec.price_spread * rng.Uniform());
  }
  return BuildCombAuction(spec.n_items, bundles, prices,
                          "ca-b" + std::to_string(spec.n_bids) + "-i" +
                              std::to_string(spec.n_items) + "-k" +
                              std::to_string(spec.max_bundle) + "-seed" +
                              std::to_string(spec.seed));
}

std::vector<Edge> ErdosRenyiEdges(int n, double avg_degree, Rng& rng) {
  std::vector<Edge> edges;
  if (n < 2) return edges;
  const double p = avg_degree / (n - 1);
  for (int u = 0; u + 1 < n; ++u) {
    BernoulliPositions(n - u - 1, p, rng,
                       [&](int k) { edges.emplace_back(u, u + 1 + k); });
  }
  return edges;
}

namespace {

MilpInstance BuildEdgeModel(int n, const std::vector<Edge>& edges,
                            std::string name, double obj, Sense sense) {
  MilpData d = BinaryData(n, std::move(name));
  std::fill(d.obj.begin(), d.obj.end(), obj);
  d.rows.reserve(edges.size());
  for (const auto& [u, v] : edges) {
    if (u == v) throw ContractError("graph: self loop");
    d.rows.push_back(SparseRow{{u, v}, {1.0, 1.0}});
    d.sense.push_back(sense);
    d.rhs.push_back(1.0);
  }
  return MilpInstance(std::move(d));
}

std::string GraphName(const char* prefix, const GenSpec& spec) {
  return std::string(prefix) + "-n" + std::to_string(spec.n_nodes) + "-deg" +
         Fmt(spec.avg_degree) + "-seed" + std::to_string(spec.seed);
}

}  // namespace

MilpInstance BuildIndependentSet(int n, const std::vector<Edge>& edges,
                                 std::string name) {
  return BuildEdgeModel(n, edges, std::move(name), -1.0, Sense::kLe);
}

MilpInstance BuildVertexCover(int n, const std::vector<Edge>& edges,
                              std::string name) {
  return BuildEdgeModel(n, edges, std::move(name), 1.0, Sense::kGe);
}

MilpInstance GenerateIndependentSet(const GenSpec& spec) {
  if (spec.family != Family::kIndependentSet) throw ContractError("spec is not MIS");
  ValidateGenSpec(spec);
  Rng rng(spec.seed, kStreamGraph);
  return BuildIndependentSet(spec.n_nodes,
                             ErdosRenyiEdges(spec.n_nodes, spec.avg_degree, rng),
                             GraphName("mis", spec));
}

MilpInstance GenerateVertexCover(const GenSpec& spec) {
  if (spec.family != Family::kVertexCover) throw ContractError("spec is not MVC");
  ValidateGenSpec(spec);
  // Same stream as MIS: identical (n, avg_degree, seed) yield the same graph.
  Rng rng(spec.seed, kStreamGraph);
  return BuildVertexCover(spec.n_nodes,
                          ErdosRenyiEdges(spec.n_nodes, spec.avg_degree, rng),
                          GraphName("mvc", spec));
}

MilpInstance Generate(const GenSpec& spec) {
  switch (spec.family) {
    case Family::kSetCover:
      return GenerateSetCover(spec);
    case Family::kCombAuction:
      return GenerateCombAuction(spec);
    case Family::kIndependentSet:
      return GenerateIndependentSet(spec);
    case Family::kVertexCover:
      return GenerateVertexCover(spec);
  }
  throw ContractError("unknown family");
}

}  // namespace tlns
