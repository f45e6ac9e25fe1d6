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

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.h"
#include "tiny.h"
#include "tlns/collect.h"
#include "tlns/neighborhoods.h"

namespace tlns {
namespace {

CollectParams Quick(int lb_k) {
  CollectParams p;
  p.lb_k = lb_k;
  p.lb_time_limit = 10.0;
  p.negative_time_limit = 10.0;
  p.init_time_limit = 10.0;
  return p;
}

std::vector<double> Flip(const std::vector<double>& x, const Action& a) {
  std::vector<double> y = x;
  for (int i : a) y[i] = 1.0 - y[i];
  return y;
}

TEST_CASE("swap count is a tenth of the expert weight") {
  CHECK(NegativeSwaps(100) == 10);
  CHECK(NegativeSwaps(1) == 1);
  CHECK(NegativeSwaps(4) == 1);
  CHECK(NegativeSwaps(15) == 2);
  CHECK(NegativeSwaps(24) == 2);
  CHECK(NegativeSwaps(26) == 3);
}

TEST_CASE("positive threshold arithmetic") {
  const Solution inc{{0, 0, 0, 0}, 10.0};
  const Solution best{{1, 1, 1, 1}, 0.0};
  std::vector<PoolEntry> pool = {{0.0, inc},
                                 {0.1, Solution{{1, 0, 0, 0}, 5.0}},
                                 {0.2, Solution{{1, 1, 0, 0}, 4.0}},
                                 {0.3, best}};
  std::vector<Action> pos = HarvestPositives(pool, inc, best, 0.6);
  REQUIRE(pos.size() == 2);
  CHECK(pos[0] == Action{0, 1, 2, 3});
  CHECK(pos[1] == Action{0, 1});
  // The expert action is present even when the pool lacks it.
  pos = HarvestPositives({}, inc, best, 0.6);
  CHECK(pos == std::vector<Action>{{0, 1, 2, 3}});
}

TEST_CASE("parameter validation") {
  CHECK_NOTHROW(ValidateCollectParams(CollectParams{}));
  CollectParams p;
  p.kappa_n = 0.7;
  CHECK_THROWS_AS(ValidateCollectParams(p), ContractError);
  p = {};
  p.kappa_p = 1.0;
  CHECK_THROWS_AS(ValidateCollectParams(p), ContractError);
  p = {};
  p.lb_k = 0;
  CHECK_THROWS_AS(ValidateCollectParams(p), ContractError);
}

TEST_CASE("trajectories on tiny instances") {
  int records = 0;
  int negatives = 0;
  for (Family f : tiny::kFamilies) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      MilpInstance m = tiny::OfFamily(f, 14, seed);
      Rng rng(seed);
      const int k = 3;
      CollectParams p = Quick(k);
      const Solution start = Solution::Of(m, tiny::TrivialPoint(m, f));
      Trajectory t = CollectLbTrajectory(m, "tiny", p, rng, &start);
      REQUIRE(t.objectives.size() == t.records.size() + 1);
      for (std::size_t s = 0; s < t.records.size(); ++s) {
        const SampleRecord& r = t.records[s];
        ++records;
        negatives += static_cast<int>(r.negatives.size());
        CHECK(t.objectives[s + 1] < t.objectives[s]);
        const Solution inc = Solution::Of(m, r.incumbent);
        CHECK(inc.objective == t.objectives[s]);
        const double gain = t.objectives[s] - t.objectives[s + 1];
        REQUIRE(!r.positives.empty());
        CHECK(static_cast<int>(r.positives.front().size()) <= k);
        CHECK(Solution::Of(m, Flip(r.incumbent, r.positives.front())).objective ==
              t.objectives[s + 1]);
        for (const Action& a : r.positives) {
          CHECK(static_cast<int>(a.size()) <= k);
          const std::vector<double> y = Flip(r.incumbent, a);
          CHECK(IsFeasible(m, y));
          CHECK(EvaluateObjective(m, y) <= inc.objective - p.kappa_p * gain + 1e-6);
        }
        for (const Action& a : r.negatives) {
          CHECK(a.size() == r.positives.front().size());
          // Best completion with only `a` unfixed, by enumeration.
          MilpInstance aux = BuildAuxiliary(m, r.incumbent, FixingSet::Complement(m, a));
          auto best = oracle::BruteForce(aux);
          REQUIRE(best);
          CHECK(inc.objective - best->objective <= p.kappa_n * gain + 1e-6);
        }
      }
    }
  }
  CHECK(records >= 16);
  CHECK(negatives > 0);
  MESSAGE(records << " records, " << negatives << " negatives");
}

TEST_CASE("full-radius expert reaches the optimum in one step") {
  for (Family f : tiny::kFamilies) {
    MilpInstance m = tiny::OfFamily(f, 12, 7);
    auto want = oracle::BruteForce(m);
    REQUIRE(want);
    Rng rng(1);
    const Solution start = Solution::Of(m, tiny::TrivialPoint(m, f));
    Trajectory t = CollectLbTrajectory(m, "tiny", Quick(m.n()), rng, &start);
    CHECK(t.objectives.back() == want->objective);
    CHECK(t.records.size() <= 1);

    // Starting at the optimum yields nothing.
    const Solution opt = Solution::Of(m, want->x);
    Trajectory none = CollectLbTrajectory(m, "tiny", Quick(m.n()), rng, &opt);
    CHECK(none.records.empty());
  }
}

TEST_CASE("negatives keep the expert weight and the threshold") {
  MilpInstance m = tiny::OfFamily(Family::kSetCover, 16, 11);
  auto want = oracle::BruteForce(m);
  REQUIRE(want);
  const Solution inc = Solution::Of(m, std::vector<double>(m.n(), 1.0));
  const Solution best = Solution::Of(m, want->x);
  const Action expert = ActionBetween(inc.x, best.x);
  REQUIRE(!expert.empty());
  CollectParams p = Quick(16);
  p.negatives = 5;
  p.negative_attempts = 40;
  Rng rng(3);
  NegativeOutcome out = GenerateNegatives(m, inc, best, expert, p, rng);
  CHECK(out.attempts <= p.negative_attempts);
  const double gain = inc.objective - best.objective;
  for (const NegativeSample& s : out.accepted) {
    CHECK(s.action.size() == expert.size());
    CHECK(IsFeasible(m, s.completion.x));
    MilpInstance aux = BuildAuxiliary(m, inc.x, FixingSet::Complement(m, s.action));
    auto oracle = oracle::BruteForce(aux);
    REQUIRE(oracle);
    CHECK(s.completion.objective == oracle->objective);
    CHECK(inc.objective - oracle->objective <= p.kappa_n * gain + 1e-9);
  }
  CHECK_THROWS_AS(GenerateNegatives(m, inc, best, {}, p, rng), ContractError);
}

TEST_CASE("collection rejects non-binary models") {
  MilpData d;
  d.name = "general";
  d.num_vars = 1;
  d.rows = {{{0}, {1.0}}};
  d.sense = {Sense::kLe};
  d.rhs = {3.0};
  d.obj = {-1.0};
  d.lower = {0};
  d.upper = {3};
  d.is_integer = {true};
  Rng rng(0);
  CHECK_THROWS_AS(CollectLbTrajectory(MilpInstance(d), "g", Quick(1), rng), UnsupportedModelError);
}

TEST_CASE("dataset roundtrip and schema errors") {
  std::vector<SampleRecord> recs = {
      {"a.json", {1, 0, 1}, 2, {{0, 2}, {2}}, {{0, 1}, {1, 2}}},
      {"b.json", {0, 0}, 1, {{1}}, {}},
  };
  const std::string path = "/tmp/tlns_collect_test.jsonl";
  WriteDataset(recs, path);
  CHECK(ReadDataset(path) == recs);

  auto expect_error = [&](const std::string& text, const std::string& needle) {
    std::ofstream(path) << text;
    try {
      ReadDataset(path);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  const std::string ok =
      R"({"instance":"a","incumbent":[1,0],"lb_k":2,"positives":[[0]],"negatives":[[1]]})";
  expect_error(ok + "\n" +
                   R"({"instance":"a","incumbent":[1,0],"lb_k":2,"positives":[[0,5]],"negatives":[]})",
               "record 1");
  expect_error(R"({"instance":"a","incumbent":[1,0],"lb_k":2,"positives":[[1,0]],"negatives":[]})",
               "record 0");
  expect_error(R"({"instance":"a","incumbent":[1,0],"lb_k":2,"positives":[[0]],"negatives":[[0,1]]})",
               "weight");
  expect_error(R"({"instance":"a","incumbent":[1,0],"positives":[[0]],"negatives":[]})", "lb_k");
  std::remove(path.c_str());
}

}  // namespace
}  // namespace tlns
