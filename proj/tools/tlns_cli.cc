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

// tlns: instance generation, exact solves, LNS/TLNS runs, data collection
// and benchmarks from the command line.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tlns/bench.h"
#include "tlns/bnb.h"
#include "tlns/collect.h"
#include "tlns/errors.h"
#include "tlns/instance_gen.h"
#include "tlns/instance_io.h"
#include "tlns/lns.h"
#include "tlns/policy.h"

namespace {

using tlns::Solution;

struct GenArgs {
  std::string family = "sc";
  tlns::GenSpec spec;
  std::string out;
};

struct SolveArgs {
  std::string instance;
  double time_limit = 60.0;
  std::int64_t node_limit = 0;
  double gap = 0.0;
  int solution_limit = 0;
  std::string external;
  std::string out;
};

struct RunArgs {
  std::string instance;
  std::string policy = "random";
  std::string weights;
  int r = 100;
  int r1 = 100;
  int r2 = 20;
  double eta1 = 1.05;
  double eta2 = 1.15;
  int count_limit = 4;
  double sub_time_limit = 5.0;
  double time_limit = 60.0;
  std::int64_t sub_node_limit = 0;
  std::int64_t max_subsolves = 0;
  std::int64_t max_lp_iterations = 0;
  std::string start = "solver";
  double init_time_limit = 10.0;
  std::uint64_t seed = 0;
  std::string log;
  std::string out;
};

struct CollectArgs {
  std::vector<std::string> instances;
  std::string out;
  tlns::CollectParams params;
  std::uint64_t seed = 0;
};

struct BenchArgs {
  std::string config;
  std::string out = "bench_out";
};

void WriteSolution(const Solution& s, const std::string& path) {
  const nlohmann::json j = {{"objective", s.objective}, {"x", s.x}};
  std::ofstream out(path);
  if (!out) throw tlns::Error("cannot open " + path + " for writing");
  out << j.dump() << '\n';
}

int RunGen(GenArgs& a) {
  a.spec.family = tlns::ParseFamily(a.family);
  const tlns::MilpInstance m = tlns::Generate(a.spec);
  tlns::WriteInstance(m, a.out);
  std::printf("%s: n=%d m=%d nnz=%lld\n", a.out.c_str(), m.n(), m.m(),
              static_cast<long long>(m.nnz()));
  return 0;
}

int RunSolve(const SolveArgs& a) {
  const tlns::MilpInstance m = tlns::ReadInstance(a.instance);
  tlns::SolveOptions so;
  so.time_limit = a.time_limit;
  so.node_limit = a.node_limit;
  so.gap_tol = a.gap;
  so.solution_limit = a.solution_limit;
  const tlns::SolverResult r =
      a.external.empty() ? tlns::SolveMilp(m, so) : tlns::ExternalSolve(m, so, a.external);
  std::printf("status %s\n", tlns::SolveStatusName(r.status));
  if (r.best) std::printf("objective %.17g\n", r.best->objective);
  std::printf("dual_bound %.17g\nnodes %lld\nelapsed %.3f\n", r.dual_bound,
              static_cast<long long>(r.nodes), r.elapsed);
  if (r.best && !a.out.empty()) WriteSolution(*r.best, a.out);
  return r.best ? 0 : 3;
}

int RunSearch(const RunArgs& a, bool two_layer) {
  const tlns::MilpInstance m = tlns::ReadInstance(a.instance);
  tlns::Fixer fixer;
  if (a.policy == "learned") {
    if (a.weights.empty()) throw tlns::ContractError("--policy learned needs --weights");
    fixer = tlns::LearnedFixer(tlns::LoadWeights(a.weights));
  } else {
    fixer = tlns::RandomFixer();
  }
  const Solution start = a.start == "solver" ? tlns::InitialIncumbent(m, a.init_time_limit)
                                             : tlns::TrivialIncumbent(m);
  tlns::LnsParams outer;
  outer.r = two_layer ? a.r1 : a.r;
  outer.eta = a.eta1;
  outer.count_limit = a.count_limit;
  outer.sub_time_limit = a.sub_time_limit;
  outer.time_limit = a.time_limit;
  outer.sub_node_limit = a.sub_node_limit;
  outer.max_subsolves = a.max_subsolves;
  outer.max_lp_iterations = a.max_lp_iterations;
  tlns::LnsParams inner = outer;
  inner.r = a.r2;
  inner.eta = a.eta2;
  tlns::Rng rng(a.seed);
  const tlns::LnsResult res = two_layer ? tlns::RunTlns(m, start, fixer, outer, inner, rng)
                                        : tlns::RunLns(m, start, fixer, outer, rng);
  if (!a.log.empty()) tlns::WriteRunLog(res.log, a.log);
  if (!a.out.empty()) WriteSolution(res.best, a.out);
  std::printf("start %.17g\nbest %.17g\niterations %lld\nsubsolves %lld\nelapsed %.3f\n",
              start.objective, res.best.objective, static_cast<long long>(res.log.iterations),
              static_cast<long long>(res.log.subsolves), res.log.elapsed);
  for (int p = 0; p < tlns::kNumPhases; ++p) {
    std::printf("t_%s %.3f\n", tlns::PhaseName(static_cast<tlns::Phase>(p)),
                res.log.phase_times[p]);
  }
  return 0;
}

int RunCollect(const CollectArgs& a) {
  std::vector<tlns::SampleRecord> all;
  const tlns::Rng root(a.seed);
  int failed = 0;
  for (std::size_t i = 0; i < a.instances.size(); ++i) {
    try {
      const tlns::MilpInstance m = tlns::ReadInstance(a.instances[i]);
      tlns::Rng rng = root.Split(i);
      tlns::Trajectory t = tlns::CollectLbTrajectory(m, a.instances[i], a.params, rng);
      for (const std::string& w : t.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
      std::printf("%s: %zu records, objective %.17g -> %.17g\n", a.instances[i].c_str(),
                  t.records.size(), t.objectives.front(), t.objectives.back());
      all.insert(all.end(), t.records.begin(), t.records.end());
    } catch (const tlns::CollectionError& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      ++failed;
    }
  }
  tlns::WriteDataset(all, a.out);
  std::printf("%zu records written to %s\n", all.size(), a.out.c_str());
  return failed == 0 ? 0 : 4;
}

int RunBenchCmd(const BenchArgs& a) {
  const tlns::BenchConfig c = tlns::ReadBenchConfig(a.config);
  const tlns::BenchResults r = tlns::RunBenchmark(c, a.out);
  for (const std::string& e : r.errors) std::fprintf(stderr, "error: %s\n", e.c_str());
  std::printf("%zu runs, results in %s\n", r.rows.size(), a.out.c_str());
  return r.errors.empty() ? 0 : 4;
}

void AddRunFlags(CLI::App* cmd, RunArgs& a, bool two_layer) {
  cmd->add_option("--instance", a.instance, "Instance file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--policy", a.policy, "Fixing policy")
      ->check(CLI::IsMember({"random", "learned"}))
      ->capture_default_str();
  cmd->add_option("--weights", a.weights, "sgtw-1 weights for the learned policy");
  if (two_layer) {
    cmd->add_option("--r1", a.r1, "Outer neighborhood size")->capture_default_str();
    cmd->add_option("--r2", a.r2, "Inner neighborhood size")->capture_default_str();
    cmd->add_option("--eta1", a.eta1, "Outer growth rate")->capture_default_str();
    cmd->add_option("--eta2", a.eta2, "Inner growth rate")->capture_default_str();
  } else {
    cmd->add_option("-r,--r", a.r, "Neighborhood size")->capture_default_str();
    cmd->add_option("--eta1,--eta", a.eta1, "Growth rate")->capture_default_str();
  }
  cmd->add_option("--count-limit", a.count_limit, "Failures before a layer stops")
      ->capture_default_str();
  cmd->add_option("--sub-time-limit", a.sub_time_limit, "Seconds per exact solve")
      ->capture_default_str();
  cmd->add_option("--time-limit", a.time_limit, "Seconds for the run")->capture_default_str();
  cmd->add_option("--sub-node-limit", a.sub_node_limit, "Nodes per exact solve (0: none)");
  cmd->add_option("--max-subsolves", a.max_subsolves, "Exact solves for the run (0: none)");
  cmd->add_option("--max-lp-iterations", a.max_lp_iterations,
                  "Simplex iterations over all exact solves (0: none)");
  cmd->add_option("--start", a.start, "Initial incumbent source")
      ->check(CLI::IsMember({"solver", "bounds"}))
      ->capture_default_str();
  cmd->add_option("--init-time-limit", a.init_time_limit, "Seconds for the first solution")
      ->capture_default_str();
  cmd->add_option("--seed", a.seed, "Random seed")->capture_default_str();
  cmd->add_option("--log", a.log, "Write the run log (JSON lines)");
  cmd->add_option("--out", a.out, "Write the best solution (JSON)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Large neighborhood search for mixed-integer programs"};
  app.require_subcommand(1);

  GenArgs gen;
  CLI::App* g = app.add_subcommand("gen", "Generate a benchmark instance");
  g->add_option("--family", gen.family, "sc, ca, mis or mvc")
      ->check(CLI::IsMember({"sc", "ca", "mis", "mvc"}))
      ->capture_default_str();
  g->add_option("--items", gen.spec.n_items, "Items (sc, ca)");
  g->add_option("--subsets", gen.spec.n_subsets, "Subsets (sc)");
  g->add_option("--density", gen.spec.density, "Coverage density (sc)")->capture_default_str();
  g->add_option("--bids", gen.spec.n_bids, "Bids (ca)");
  g->add_option("--max-bundle", gen.spec.max_bundle, "Largest bundle (ca)")->capture_default_str();
  g->add_option("--price-spread", gen.spec.price_spread, "Price spread (ca)")
      ->capture_default_str();
  g->add_option("--nodes", gen.spec.n_nodes, "Graph nodes (mis, mvc)");
  g->add_option("--avg-degree", gen.spec.avg_degree, "Average degree (mis, mvc)");
  g->add_option("--seed", gen.spec.seed, "Random seed")->capture_default_str();
  g->add_option("--out", gen.out, "Output instance file")->required();

  SolveArgs solve;
  CLI::App* s = app.add_subcommand("solve", "Solve an instance with branch and bound");
  s->add_option("--instance", solve.instance, "Instance file")->required()->check(CLI::ExistingFile);
  s->add_option("--time-limit", solve.time_limit, "Seconds")->capture_default_str();
  s->add_option("--node-limit", solve.node_limit, "Nodes (0: none)");
  s->add_option("--gap", solve.gap, "Relative gap tolerance");
  s->add_option("--solution-limit", solve.solution_limit, "Stop after this many incumbents");
  s->add_option("--external", solve.external, "External solver command (LP-format adapter)");
  s->add_option("--out", solve.out, "Write the best solution (JSON)");

  RunArgs lns;
  AddRunFlags(app.add_subcommand("lns", "Single-layer large neighborhood search"), lns, false);
  RunArgs tlns_args;
  AddRunFlags(app.add_subcommand("tlns", "Two-layer large neighborhood search"), tlns_args,
              true);

  CollectArgs collect;
  CLI::App* c = app.add_subcommand("collect", "Collect local-branching training data");
  c->add_option("--instance", collect.instances, "Instance files")
      ->required()
      ->check(CLI::ExistingFile);
  c->add_option("--out", collect.out, "Dataset file (JSON lines)")->required();
  c->add_option("--lb-k", collect.params.lb_k, "Local branching radius")->capture_default_str();
  c->add_option("--lb-time-limit", collect.params.lb_time_limit, "Seconds per expert solve")
      ->capture_default_str();
  c->add_option("--kappa-p", collect.params.kappa_p, "Positive threshold")->capture_default_str();
  c->add_option("--kappa-n", collect.params.kappa_n, "Negative threshold")->capture_default_str();
  c->add_option("--negatives", collect.params.negatives, "Negatives per record")
      ->capture_default_str();
  c->add_option("--negative-attempts", collect.params.negative_attempts,
                "Candidates tried per record")
      ->capture_default_str();
  c->add_option("--negative-time-limit", collect.params.negative_time_limit,
                "Seconds per negative solve")
      ->capture_default_str();
  c->add_option("--init-time-limit", collect.params.init_time_limit,
                "Seconds for the first solution")
      ->capture_default_str();
  c->add_option("--max-steps", collect.params.max_steps, "Records per instance (0: all)");
  c->add_option("--seed", collect.seed, "Random seed")->capture_default_str();

  BenchArgs bench;
  CLI::App* b = app.add_subcommand("bench", "Run a benchmark configuration");
  b->add_option("--config", bench.config, "bench.json")->required()->check(CLI::ExistingFile);
  b->add_option("--out", bench.out, "Output directory")->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  try {
    if (g->parsed()) return RunGen(gen);
    if (s->parsed()) return RunSolve(solve);
    if (app.got_subcommand("lns")) return RunSearch(lns, false);
    if (app.got_subcommand("tlns")) return RunSearch(tlns_args, true);
    if (c->parsed()) return RunCollect(collect);
    if (b->parsed()) return RunBenchCmd(bench);
  } catch (const tlns::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
