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

#include "tlns/collect.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "json.hpp"
#include "tlns/neighborhoods.h"

namespace tlns {
namespace {

using Json = nlohmann::json;

constexpr double kImproveTol = 1e-9;

Action SampleFrom(const std::vector<int>& pool, int k, Rng& rng) {
  Action out;
  for (int idx : SampleWithoutReplacement(static_cast<int>(pool.size()), k, rng)) {
    out.push_back(pool[idx]);
  }
  return out;
}

void CheckAction(const Json& a, std::size_t n, const std::string& where) {
  if (!a.is_array()) throw ParseError(where + " is not an index list");
  long long prev = -1;
  for (const Json& v : a) {
    if (!v.is_number_integer()) throw ParseError(where + " holds a non-integer index");
    const long long i = v.get<long long>();
    if (i < 0 || static_cast<std::size_t>(i) >= n) {
      throw ParseError(where + " index " + std::to_string(i) + " is outside the " +
                       std::to_string(n) + " variables");
    }
    if (i <= prev) throw ParseError(where + " is not strictly increasing");
    prev = i;
  }
}

}  // namespace

void ValidateCollectParams(const CollectParams& p) {
  if (p.lb_k < 1) throw ContractError("lb_k must be >= 1");
  if (!(p.kappa_n > 0.0 && p.kappa_n <= p.kappa_p && p.kappa_p < 1.0)) {
    throw ContractError("thresholds must satisfy 0 < kappa_n <= kappa_p < 1");
  }
  if (p.negatives < 0 || p.negative_attempts < 0 || p.max_steps < 0) {
    throw ContractError("counts must be >= 0");
  }
  if (!(p.lb_time_limit > 0.0 && p.negative_time_limit > 0.0 && p.init_time_limit > 0.0)) {
    throw ContractError("time limits must be > 0");
  }
}

Action ActionBetween(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ContractError("action endpoints differ in length");
  Action out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > 0.5) out.push_back(static_cast<int>(i));
  }
  return out;
}

std::vector<Action> HarvestPositives(const std::vector<PoolEntry>& pool,
                                     const Solution& incumbent, const Solution& best,
                                     double kappa_p) {
  const double gain = incumbent.objective - best.objective;
  std::vector<Action> out = {ActionBetween(incumbent.x, best.x)};
  std::set<Action> seen(out.begin(), out.end());
  for (const PoolEntry& e : pool) {
    if (incumbent.objective - e.solution.objective < kappa_p * gain - kImproveTol) continue;
    Action a = ActionBetween(incumbent.x, e.solution.x);
    if (seen.insert(a).second) out.push_back(std::move(a));
  }
  return out;
}

int NegativeSwaps(int weight) {
  return std::max(1, static_cast<int>(std::lround(0.1 * weight)));
}

NegativeOutcome GenerateNegatives(const MilpInstance& model, const Solution& incumbent,
                                  const Solution& best, const Action& expert,
                                  const CollectParams& params, Rng& rng) {
  if (expert.empty()) throw ContractError("expert action is empty");
  const double gain = incumbent.objective - best.objective;
  std::vector<char> in_expert(model.n(), 0);
  for (int i : expert) in_expert[i] = 1;
  std::vector<int> outside;
  for (int i : model.IntegerIndices()) {
    if (!in_expert[i]) outside.push_back(i);
  }
  const int swaps =
      std::min({NegativeSwaps(static_cast<int>(expert.size())), static_cast<int>(expert.size()),
                static_cast<int>(outside.size())});
  NegativeOutcome out;
  if (swaps == 0) return out;
  std::set<Action> tried;
  while (static_cast<int>(out.accepted.size()) < params.negatives &&
         out.attempts < params.negative_attempts) {
    ++out.attempts;
    const Action drop = SampleFrom(expert, swaps, rng);
    const Action add = SampleFrom(outside, swaps, rng);
    std::set<int> support(expert.begin(), expert.end());
    for (int i : drop) support.erase(i);
    support.insert(add.begin(), add.end());
    Action cand(support.begin(), support.end());
    if (!tried.insert(cand).second) continue;

    const FixingSet fixed = FixingSet::Complement(model, cand);
    SolveOptions so;
    so.time_limit = params.negative_time_limit;
    so.start = &incumbent.x;
    const SolverResult res = SolveMilp(BuildAuxiliary(model, incumbent.x, fixed), so);
    if (res.status != SolveStatus::kOptimal) continue;
    if (incumbent.objective - res.best->objective <= params.kappa_n * gain + kImproveTol) {
      out.accepted.push_back({std::move(cand), *res.best});
    }
  }
  return out;
}

Trajectory CollectLbTrajectory(const MilpInstance& model, const std::string& instance,
                               const CollectParams& params, Rng& rng, const Solution* start) {
  ValidateCollectParams(params);
  if (model.num_integer() != model.n() || !model.IsBinaryProgram()) {
    throw UnsupportedModelError("local branching collection needs a pure binary model");
  }
  Solution x;
  if (start != nullptr) {
    if (!IsFeasible(model, start->x)) throw InfeasibleInputError("start point is infeasible");
    x = Solution::Of(model, start->x);
  } else {
    SolveOptions so;
    so.solution_limit = 1;
    so.time_limit = params.init_time_limit;
    SolverResult first = SolveMilp(model, so);
    if (!first.best) throw CollectionError("no feasible point found for " + instance);
    x = *first.best;
  }

  Trajectory t;
  t.objectives.push_back(x.objective);
  while (params.max_steps == 0 || static_cast<int>(t.records.size()) < params.max_steps) {
    SolveOptions so;
    so.time_limit = params.lb_time_limit;
    so.start = &x.x;
    const SolverResult res = SolveMilp(BuildLocalBranching(model, x.x, params.lb_k), so);
    if (!(res.best->objective < x.objective - kImproveTol)) break;
    const Solution& next = *res.best;

    SampleRecord rec;
    rec.instance = instance;
    rec.incumbent = x.x;
    rec.lb_k = params.lb_k;
    rec.positives = HarvestPositives(res.pool, x, next, params.kappa_p);
    NegativeOutcome neg = GenerateNegatives(model, x, next, rec.positives.front(), params, rng);
    for (NegativeSample& s : neg.accepted) rec.negatives.push_back(std::move(s.action));
    if (static_cast<int>(rec.negatives.size()) < params.negatives) {
      t.warnings.push_back(instance + " step " + std::to_string(t.records.size()) + ": " +
                           std::to_string(rec.negatives.size()) + " of " +
                           std::to_string(params.negatives) + " negatives after " +
                           std::to_string(neg.attempts) + " attempts");
    }
    t.records.push_back(std::move(rec));
    x = next;
    t.objectives.push_back(x.objective);
  }
  return t;
}

void WriteDataset(const std::vector<SampleRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  for (const SampleRecord& r : records) {
    const Json j = {{"instance", r.instance},   {"incumbent", r.incumbent},
                    {"lb_k", r.lb_k},           {"positives", r.positives},
                    {"negatives", r.negatives}};
    out << j.dump() << '\n';
  }
  if (!out) throw Error("failed writing " + path);
}

std::vector<SampleRecord> ReadDataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open dataset " + path);
  std::vector<SampleRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::string where = path + ": record " + std::to_string(out.size());
    try {
      const Json j = Json::parse(line);
      SampleRecord r;
      r.instance = j.at("instance").get<std::string>();
      r.incumbent = j.at("incumbent").get<std::vector<double>>();
      r.lb_k = j.at("lb_k").get<int>();
      const std::size_t n = r.incumbent.size();
      const Json& pos = j.at("positives");
      const Json& neg = j.at("negatives");
      if (!pos.is_array() || pos.empty()) throw ParseError(where + ": no positives");
      if (!neg.is_array()) throw ParseError(where + ": negatives is not a list");
      for (std::size_t k = 0; k < pos.size(); ++k) {
        CheckAction(pos[k], n, where + " positive " + std::to_string(k));
        r.positives.push_back(pos[k].get<Action>());
        if (static_cast<int>(r.positives.back().size()) > r.lb_k) {
          throw ParseError(where + " positive " + std::to_string(k) + " exceeds lb_k");
        }
      }
      for (std::size_t k = 0; k < neg.size(); ++k) {
        CheckAction(neg[k], n, where + " negative " + std::to_string(k));
        r.negatives.push_back(neg[k].get<Action>());
        if (r.negatives.back().size() != r.positives.front().size()) {
          throw ParseError(where + " negative " + std::to_string(k) +
                           " differs in weight from the expert action");
        }
      }
      out.push_back(std::move(r));
    } catch (const Json::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  return out;
}

}  // namespace tlns
