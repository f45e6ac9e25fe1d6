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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "tlns/bench.h"
#include "tlns/errors.h"
#include "tlns/instance_gen.h"
#include "tlns/instance_io.h"

namespace tlns {
namespace {

namespace fs = std::filesystem;

RunLog Steps(const std::vector<std::pair<double, double>>& incumbents) {
  RunLog log;
  for (const auto& [t, obj] : incumbents) {
    log.events.push_back({t, static_cast<std::int64_t>(t), EventKind::kIncumbent, obj, 1, 0});
  }
  return log;
}

int Count(const std::string& text, const std::string& needle) {
  int n = 0;
  for (std::size_t p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) {
    ++n;
  }
  return n;
}

std::string ReadAll(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Three small set-cover instances written to a scratch directory.
std::vector<std::string> WriteInstances(const fs::path& dir) {
  fs::create_directories(dir);
  std::vector<std::string> paths;
  for (int k = 0; k < 3; ++k) {
    GenSpec s;
    s.family = Family::kSetCover;
    s.n_items = 60;
    s.n_subsets = 40;
    s.density = 0.1;
    s.seed = 100 + k;
    const std::string path = (dir / ("sc" + std::to_string(k) + ".json")).string();
    WriteInstance(Generate(s), path);
    paths.push_back(path);
  }
  return paths;
}

BenchConfig TwoMethods(const std::vector<std::string>& instances) {
  BenchConfig c;
  c.instances = instances;
  MethodSpec lns;
  lns.name = "lns";
  lns.outer.r = 10;
  lns.outer.sub_node_limit = 200;
  lns.outer.sub_time_limit = 1e6;
  MethodSpec tlns;
  tlns.name = "tlns";
  tlns.engine = EngineKind::kTlns;
  tlns.outer.r = 30;
  tlns.inner.r = 8;
  tlns.inner.eta = 1.15;
  tlns.inner.sub_node_limit = 200;
  tlns.inner.sub_time_limit = 1e6;
  c.methods = {lns, tlns};
  c.iteration_budget = 25;
  c.seeds = {1, 2};
  c.start = "bounds";
  c.threads = 2;
  return c;
}

TEST_CASE("primal gap conventions") {
  CHECK(PrimalGap(0.0, 0.0) == 0.0);
  CHECK(PrimalGap(-1.0, 2.0) == 1.0);
  CHECK(PrimalGap(200.0, 100.0) == 0.5);
  CHECK(PrimalGap(-50.0, -100.0) == 0.5);
  CHECK(PrimalGap(0.0, 5.0) == 1.0);
}

TEST_CASE("primal integral worked examples") {
  CHECK(PrimalIntegral(Steps({{0.0, 100.0}}), 100.0, 10.0) == 0.0);
  CHECK(PrimalIntegral(RunLog{}, 100.0, 10.0) == 10.0);
  const double step = PrimalIntegral(Steps({{2.0, 200.0}, {6.0, 100.0}}), 100.0, 10.0);
  CHECK(std::abs(step - 4.0) <= 1e-12);
  // Events past the horizon do not count.
  CHECK(PrimalIntegral(Steps({{12.0, 100.0}}), 100.0, 10.0) == 10.0);
  CHECK_THROWS_AS(PrimalIntegral(RunLog{}, std::nan(""), 1.0), ContractError);
  CHECK_THROWS_AS(PrimalIntegral(RunLog{}, std::numeric_limits<double>::infinity(), 1.0),
                  ContractError);
  CHECK_THROWS_AS(PrimalIntegral(RunLog{}, 1.0, 0.0), ContractError);
}

TEST_CASE("primal integral is bounded and monotone under domination") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const double bks = 10.0 + 10.0 * rng.Uniform();
    const double horizon = 50.0;
    std::vector<std::pair<double, double>> a;
    std::vector<std::pair<double, double>> b;
    double t = 0.0;
    double va = bks + 40.0;
    while (true) {
      t += 5.0 * rng.Uniform();
      if (t > horizon) break;
      va = std::max(bks, va - 10.0 * rng.Uniform());
      a.push_back({t, va});
      b.push_back({t, va + 5.0 * rng.Uniform()});
    }
    // b dominated pointwise by a; keep b strictly decreasing.
    for (std::size_t k = 1; k < b.size(); ++k) b[k].second = std::min(b[k].second, b[k - 1].second);
    const double pa = PrimalIntegral(Steps(a), bks, horizon);
    const double pb = PrimalIntegral(Steps(b), bks, horizon);
    CHECK(pa >= 0.0);
    CHECK(pb <= horizon);
    CHECK(pa <= pb + 1e-12);
  }
  CHECK(PrimalIntegral(Steps({{0.0, 3.0}}), 3.0, 7.0) == 0.0);
  CHECK(PrimalIntegral(Steps({{0.5, 3.0}}), 3.0, 7.0) > 0.0);
}

TEST_CASE("primal bound lookup") {
  const RunLog log = Steps({{1.0, 9.0}, {4.0, 5.0}});
  CHECK(!PrimalBoundAt(log, 0.5));
  CHECK(*PrimalBoundAt(log, 1.0) == 9.0);
  CHECK(*PrimalBoundAt(log, 10.0) == 5.0);
}

TEST_CASE("plot rendering") {
  CHECK_THROWS_AS(RenderPlot({}, 1.0, 1.0), ContractError);
  const std::string one = RenderPlot({{"only", Steps({{0.0, 5.0}})}}, 4.0, 10.0);
  CHECK(Count(one, "class=\"incumbent\"") == 1);
  CHECK(Count(one, "class=\"bks\"") == 1);
  CHECK(Count(one, ">only<") == 1);

  const RunLog a = Steps({{0.0, 9.0}, {2.0, 7.0}, {5.0, 6.0}});
  const RunLog b = Steps({{1.0, 8.0}, {3.0, 5.0}});
  const std::string svg = RenderPlot({{"a<1>", a}, {"b", b}}, 5.0, 10.0);
  CHECK(Count(svg, "class=\"incumbent\" data-method=\"a&lt;1&gt;\"") == 3);
  CHECK(Count(svg, "class=\"incumbent\" data-method=\"b\"") == 2);
  CHECK(Count(svg, "class=\"curve\"") == 2);
  // Step paths alternate horizontal and vertical moves; vertical moves go
  // down the page only when the value falls, so every V target must have a
  // y no smaller than the previous point on screen.
  const std::size_t p = svg.find("d=\"M");
  REQUIRE(p != std::string::npos);
  std::istringstream path(svg.substr(p + 4, svg.find('"', p + 4) - p - 4));
  double x = 0.0;
  double y = 0.0;
  char sep = 0;
  path >> x >> sep >> y;
  std::string tok;
  while (path >> tok) {
    if (tok[0] == 'V') {
      const double ny = std::stod(tok.substr(1));
      CHECK(ny >= y);
      y = ny;
    }
  }
}

TEST_CASE("benchmark cells, bks and reproducible csv") {
  const fs::path dir = fs::temp_directory_path() / "tlns_bench_test";
  fs::remove_all(dir);
  const std::vector<std::string> paths = WriteInstances(dir / "inst");
  BenchConfig c = TwoMethods(paths);

  const BenchResults r1 = RunBenchmark(c, (dir / "out1").string());
  CHECK(r1.errors.empty());
  REQUIRE(r1.rows.size() == 12);
  for (const BenchRow& row : r1.rows) {
    REQUIRE(row.pb_at_t);
    CHECK(r1.bks.at(row.instance) <= *row.pb_at_t);
    CHECK(row.pi >= 0.0);
    CHECK(row.pi <= 25.0);
  }
  const BenchResults r2 = RunBenchmark(c, (dir / "out2").string());
  const std::string csv1 = ReadAll(dir / "out1" / "results.csv");
  CHECK(csv1 == ReadAll(dir / "out2" / "results.csv"));
  CHECK(csv1.substr(0, csv1.find('\n')) == kCsvHeader);
  // Phase columns are blank in iteration mode.
  const std::string row = csv1.substr(csv1.find('\n') + 1, csv1.find('\n', csv1.find('\n') + 1) -
                                                               csv1.find('\n') - 1);
  CHECK(row.substr(row.size() - 5) == ",,,,,");

  CHECK(fs::exists(dir / "out1" / "manifest.json"));
  int runs = 0;
  for (const auto& e : fs::directory_iterator(dir / "out1" / "runs")) runs += e.is_regular_file();
  CHECK(runs == 12);
  int plots = 0;
  for (const auto& e : fs::directory_iterator(dir / "out1" / "plots")) {
    ++plots;
    const std::string svg = ReadAll(e.path());
    CHECK(Count(svg, "class=\"curve\"") == 2);
  }
  CHECK(plots == 3);

  // A missing instance is reported and the rest still run.
  c.instances.push_back((dir / "missing.json").string());
  c.seeds = {1};
  const BenchResults r3 = RunBenchmark(c);
  CHECK(r3.rows.size() == 6);
  REQUIRE(r3.errors.size() == 1);
  CHECK(r3.errors[0].find("missing.json") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("provided bks and wall mode") {
  const fs::path dir = fs::temp_directory_path() / "tlns_bench_wall";
  fs::remove_all(dir);
  const std::vector<std::string> paths = WriteInstances(dir);
  BenchConfig c = TwoMethods({paths[0]});
  c.iteration_budget = 0;
  c.time_limit = 0.5;
  c.seeds = {3};
  c.computed_bks = false;
  c.bks[paths[0]] = -1.0;  // sign mismatch: gap 1 throughout
  const BenchResults r = RunBenchmark(c);
  REQUIRE(r.rows.size() == 2);
  for (const BenchRow& row : r.rows) CHECK(row.pi == doctest::Approx(0.5));
  const std::string csv = ResultsCsv(r, false);
  CHECK(csv.find(",,") == std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("simplex iteration budgets") {
  const fs::path dir = fs::temp_directory_path() / "tlns_bench_work";
  fs::remove_all(dir);
  const std::vector<std::string> paths = WriteInstances(dir / "inst");
  BenchConfig c = TwoMethods({paths[0], paths[1]});
  c.budget_unit = BudgetUnit::kLpIterations;
  c.iteration_budget = 2000;
  const BenchResults r1 = RunBenchmark(c, (dir / "out1").string());
  const BenchResults r2 = RunBenchmark(c, (dir / "out2").string());
  CHECK(r1.errors.empty());
  REQUIRE(r1.rows.size() == 8);
  for (const auto& [key, log] : r1.logs) {
    CHECK(log.lp_iterations >= 0);
    double pb = std::numeric_limits<double>::infinity();
    for (const LnsEvent& e : log.events) {
      if (e.kind == EventKind::kIncumbent && e.work <= c.iteration_budget) pb = e.objective;
    }
    const BenchRow& row = *std::find_if(r1.rows.begin(), r1.rows.end(), [&](const BenchRow& b) {
      return key == b.instance + "|" + b.method + "|" + std::to_string(b.seed);
    });
    REQUIRE(row.pb_at_t);
    CHECK(*row.pb_at_t == pb);
  }
  CHECK(ReadAll(dir / "out1" / "results.csv") == ReadAll(dir / "out2" / "results.csv"));
  CHECK(ReadAll(dir / "out1" / "manifest.json").find("\"lp_iterations\"") != std::string::npos);

  c.methods[0].engine = EngineKind::kExact;
  CHECK_THROWS_AS(ValidateBenchConfig(c), ContractError);
  fs::remove_all(dir);
}

TEST_CASE("config validation and parsing") {
  BenchConfig c = TwoMethods({});
  c.methods[1].name = "lns";
  CHECK_THROWS_AS(ValidateBenchConfig(c), ContractError);
  c = TwoMethods({});
  c.methods[0].policy = PolicyKind::kLearned;
  CHECK_THROWS_AS(ValidateBenchConfig(c), ContractError);
  c = TwoMethods({});
  c.seeds.clear();
  CHECK_THROWS_AS(ValidateBenchConfig(c), ContractError);

  const fs::path dir = fs::temp_directory_path() / "tlns_bench_cfg";
  fs::create_directories(dir);
  const fs::path cfg = dir / "bench.json";
  std::ofstream(cfg) << R"({"instances":["a.json"],"iteration_budget":7,"seeds":[4,5],
    "bks_policy":"provided","bks":{"a.json":3},
    "methods":[{"name":"R-LNS","engine":"lns","r":12,"count_limit":6},
               {"name":"R-TLNS","engine":"tlns","r1":40,"r2":9,"eta2":1.25,
                "sub_node_limit":50}]})";
  const BenchConfig p = ReadBenchConfig(cfg.string());
  CHECK(p.instances == std::vector<std::string>{(dir / "a.json").string()});
  CHECK(p.iteration_budget == 7);
  CHECK(p.seeds == std::vector<std::uint64_t>{4, 5});
  CHECK(!p.computed_bks);
  CHECK(p.bks.at((dir / "a.json").string()) == 3.0);
  REQUIRE(p.methods.size() == 2);
  CHECK(p.methods[0].outer.r == 12);
  CHECK(p.methods[0].outer.count_limit == 6);
  CHECK(p.methods[1].engine == EngineKind::kTlns);
  CHECK(p.methods[1].outer.r == 40);
  CHECK(p.methods[1].outer.eta == 1.05);
  CHECK(p.methods[1].inner.r == 9);
  CHECK(p.methods[1].inner.eta == 1.25);
  CHECK(p.methods[1].inner.sub_node_limit == 50);

  std::ofstream(cfg) << R"({"instances":[],"iteration_budget":7,"budget_unit":"lp_iterations",
    "methods":[{"name":"x"}]})";
  CHECK(ReadBenchConfig(cfg.string()).budget_unit == BudgetUnit::kLpIterations);
  std::ofstream(cfg) << R"({"budget_unit":"pivots","methods":[{"name":"x"}]})";
  CHECK_THROWS_AS(ReadBenchConfig(cfg.string()), ParseError);
  std::ofstream(cfg) << R"({"methods":[{"name":"x","engine":"warp"}]})";
  CHECK_THROWS_AS(ReadBenchConfig(cfg.string()), ParseError);
  std::ofstream(cfg) << R"({"methods":[{"name":"x","r":"big"}]})";
  try {
    ReadBenchConfig(cfg.string());
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find(".r") != std::string::npos);
  }
  fs::remove_all(dir);
}

}  // namespace
}  // namespace tlns
