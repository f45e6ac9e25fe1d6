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
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "oracles.h"
#include "tlns/errors.h"
#include "tlns/instance_gen.h"
#include "tlns/instance_io.h"
#include "tlns/milp.h"
#include "tlns/rng.h"

namespace tlns {
namespace {

MilpInstance TwoVarOneRow() {
  MilpData d;
  d.name = "tiny";
  d.num_vars = 2;
  d.rows = {SparseRow{{0, 1}, {1.0, 1.0}}};
  d.sense = {Sense::kLe};
  d.rhs = {1.0};
  d.obj = {-1.0, -2.0};
  d.lower = {0.0, 0.0};
  d.upper = {1.0, 1.0};
  d.is_integer = {true, false};
  return MilpInstance(std::move(d));
}

std::string TempPath(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

TEST_CASE("objective is the index-order dot product") {
  MilpData d;
  d.num_vars = 3;
  d.obj = {1, 2, 3};
  d.lower = {0, 0, 0};
  d.upper = {1, 1, 1};
  d.is_integer = {true, true, true};
  MilpInstance m(std::move(d));
  CHECK(EvaluateObjective(m, std::vector<double>{1, 0, 1}) == 4.0);
  CHECK(EvaluateObjective(m, std::vector<double>{0, 0, 0}) == 0.0);
  CHECK_THROWS_AS(EvaluateObjective(m, std::vector<double>{1, 0}), ContractError);

  Rng rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    MilpData r;
    r.num_vars = 5;
    std::vector<double> x(5);
    for (int i = 0; i < 5; ++i) {
      r.obj.push_back(rng.Uniform() * 20 - 10);
      x[i] = rng.Uniform() * 4 - 2;
    }
    r.lower.assign(5, -2);
    r.upper.assign(5, 2);
    r.is_integer.assign(5, false);
    MilpInstance mi(r);
    CHECK(EvaluateObjective(mi, x) == oracle::Dot(r.obj, x));
  }
}

TEST_CASE("feasibility report") {
  MilpInstance m = TwoVarOneRow();
  FeasibilityReport rep = CheckFeasibility(m, std::vector<double>{1, 1}, 1e-6);
  CHECK_FALSE(rep.feasible);
  CHECK(rep.max_violation == 1.0);
  REQUIRE(rep.violations.size() == 1);
  CHECK(rep.violations[0].kind == Violation::Kind::kRow);
  CHECK(rep.violations[0].index == 0);

  CHECK(IsFeasible(m, m.lower()));
  CHECK_FALSE(IsFeasible(m, std::vector<double>{0.5, 0.0}));  // integrality
  CHECK(IsFeasible(m, std::vector<double>{0.0, 0.5}));        // continuous
  CHECK_FALSE(IsFeasible(m, std::vector<double>{-0.1, 0.0}));
  CHECK_THROWS_AS(CheckFeasibility(m, std::vector<double>{0.0}), ContractError);

  GenSpec spec{.family = Family::kSetCover, .n_items = 20, .n_subsets = 12,
               .density = 0.2, .seed = 5};
  MilpInstance sc = GenerateSetCover(spec);
  std::vector<double> ones(sc.n(), 1.0);
  CHECK(IsFeasible(sc, ones));
  // Row-activity oracle: every item has at least one subset.
  const auto dense = oracle::Dense(sc.ToData());
  for (const auto& row : dense) CHECK(oracle::Dot(row, ones) >= 1.0);
}

TEST_CASE("feasibility is monotone in the tolerance") {
  Rng rng(3);
  MilpInstance m = TwoVarOneRow();
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> x = {std::round(rng.Uniform()), rng.Uniform()};
    if (IsFeasible(m, x, 0.0)) {
      CHECK(IsFeasible(m, x, 1e-9));
      CHECK(IsFeasible(m, x, 1e-3));
    }
  }
}

TEST_CASE("construction rejects broken invariants") {
  MilpData d = TwoVarOneRow().ToData();
  SUBCASE("duplicate column") {
    d.rows[0] = SparseRow{{1, 1}, {1.0, 2.0}};
    CHECK_THROWS_AS(MilpInstance{d}, ContractError);
  }
  SUBCASE("column out of range") {
    d.rows[0] = SparseRow{{0, 2}, {1.0, 2.0}};
    CHECK_THROWS_AS(MilpInstance{d}, ContractError);
  }
  SUBCASE("crossed bounds") {
    d.lower[1] = 2.0;
    CHECK_THROWS_AS(MilpInstance{d}, ContractError);
  }
  SUBCASE("fractional integer bound") {
    d.upper[0] = 0.5;
    CHECK_THROWS_AS(MilpInstance{d}, ContractError);
  }
  SUBCASE("non-finite value") {
    d.obj[0] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(MilpInstance{d}, ContractError);
  }
}

TEST_CASE("bipartite graph mirrors the nonzero pattern") {
  MilpData one;
  one.num_vars = 1;
  one.rows = {SparseRow{{0}, {2.0}}};
  one.sense = {Sense::kLe};
  one.rhs = {1.0};
  one.obj = {0.0};
  one.lower = {0.0};
  one.upper = {1.0};
  one.is_integer = {true};
  BipartiteGraph g1 = ToBipartiteGraph(MilpInstance(one));
  REQUIRE(g1.edges.size() == 1);
  CHECK(g1.edges[0] == BipartiteEdge{0, 0, 2.0});

  MilpData dense;
  dense.num_vars = 3;
  dense.rows = {SparseRow{{0, 1, 2}, {1, 2, 3}}, SparseRow{{0, 1, 2}, {4, 5, 6}}};
  dense.sense = {Sense::kLe, Sense::kGe};
  dense.rhs = {1, 1};
  dense.obj = {0, 0, 0};
  dense.lower = {0, 0, 0};
  dense.upper = {1, 1, 1};
  dense.is_integer = {false, false, false};
  CHECK(ToBipartiteGraph(MilpInstance(dense)).edges.size() == 6);

  Rng rng(17);
  for (int rep = 0; rep < 20; ++rep) {
    MilpData r;
    r.num_vars = 15;
    int nonzeros = 0;
    for (int j = 0; j < 10; ++j) {
      SparseRow row;
      for (int i = 0; i < 15; ++i) {
        if (rng.Bernoulli(0.3)) {
          row.cols.push_back(i);
          const double v = rng.Bernoulli(0.1) ? 0.0 : rng.Uniform() + 0.5;
          row.vals.push_back(v);
          nonzeros += v != 0.0;
        }
      }
      r.rows.push_back(row);
      r.sense.push_back(Sense::kLe);
      r.rhs.push_back(1.0);
    }
    r.obj.assign(15, 0.0);
    r.lower.assign(15, 0.0);
    r.upper.assign(15, 1.0);
    r.is_integer.assign(15, true);
    MilpInstance mi(r);
    BipartiteGraph g = ToBipartiteGraph(mi);
    CHECK(static_cast<int>(g.edges.size()) == nonzeros);
    CHECK(mi.nnz() == nonzeros);
    int deg_sum = 0;
    for (int v : g.var_degree) deg_sum += v;
    CHECK(deg_sum == nonzeros);
  }
}

TEST_CASE("instance files round-trip exactly") {
  MilpInstance m = TwoVarOneRow();
  const std::string path = TempPath("tlns_roundtrip_tiny.json");
  WriteInstance(m, path);
  CHECK(ReadInstance(path) == m);

  GenSpec spec{.family = Family::kIndependentSet, .n_nodes = 200,
               .avg_degree = 4.0, .seed = 9};
  MilpInstance mis = GenerateIndependentSet(spec);
  WriteInstance(mis, path);
  MilpInstance back = ReadInstance(path);
  CHECK(back == mis);
  CHECK(back.nnz() == mis.nnz());
  CHECK(std::vector<double>(back.obj().begin(), back.obj().end()) ==
        std::vector<double>(mis.obj().begin(), mis.obj().end()));

  // Awkward doubles survive the decimal encoding bit for bit.
  Rng rng(1);
  MilpData d;
  d.num_vars = 30;
  for (int i = 0; i < 30; ++i) {
    d.obj.push_back((rng.Uniform() - 0.5) * 1e7 / 3.0);
    d.lower.push_back(-rng.Uniform() * 1e-3);
    d.upper.push_back(rng.Uniform() * 1e12);
    d.is_integer.push_back(false);
  }
  MilpInstance weird(d);
  CHECK(InstanceFromJson(InstanceToJson(weird)) == weird);
  std::remove(path.c_str());
}

TEST_CASE("instance parse errors name the field") {
  std::string text = InstanceToJson(TwoVarOneRow());
  SUBCASE("missing sense") {
    const auto pos = text.find("\"sense\"");
    std::string broken = text;
    broken.replace(pos, 7, "\"sensX\"");
    try {
      InstanceFromJson(broken);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("sense") != std::string::npos);
    }
  }
  SUBCASE("version mismatch") {
    const auto pos = text.find("tlns-1");
    text.replace(pos, 6, "tlns-9");
    CHECK_THROWS_AS(InstanceFromJson(text), ParseError);
  }
  SUBCASE("length mismatch") {
    const auto pos = text.find("\"c\":[");
    text.insert(pos + 5, "0.0,");
    CHECK_THROWS_AS(InstanceFromJson(text), ParseError);
  }
  SUBCASE("non-finite string") {
    const auto pos = text.find("\"c\":[");
    const auto end = text.find(']', pos);
    text.replace(pos, end - pos + 1, "\"c\":[\"inf\",-2.0]");
    CHECK_THROWS_AS(InstanceFromJson(text), ParseError);
  }
  SUBCASE("malformed JSON") {
    CHECK_THROWS_AS(InstanceFromJson("{\"format_version\":"), ParseError);
  }
}

}  // namespace
}  // namespace tlns
