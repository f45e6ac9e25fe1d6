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

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "tlns/bench.h"
#include "tlns/bnb.h"
#include "tlns/collect.h"
#include "tlns/errors.h"
#include "tlns/instance_gen.h"
#include "tlns/instance_io.h"
#include "tlns/lns.h"
#include "tlns/policy.h"

namespace py = pybind11;

namespace tlns {
namespace {

py::dict EventDict(const LnsEvent& e) {
  py::dict d;
  d["kind"] = EventKindName(e.kind);
  d["t"] = e.elapsed;
  d["step"] = e.step;
  d["objective"] = e.objective;
  d["r"] = e.r;
  d["layer"] = e.layer;
  d["work"] = e.work;
  return d;
}

py::dict LogDict(const RunLog& log) {
  py::list events;
  for (const LnsEvent& e : log.events) events.append(EventDict(e));
  py::dict phases;
  for (int p = 0; p < kNumPhases; ++p) phases[PhaseName(static_cast<Phase>(p))] = log.phase_times[p];
  py::dict d;
  d["events"] = events;
  d["phase_times"] = phases;
  d["iterations"] = log.iterations;
  d["inner_iterations"] = log.inner_iterations;
  d["subsolves"] = log.subsolves;
  d["presolve_calls"] = log.presolve_calls;
  d["lp_iterations"] = log.lp_iterations;
  d["elapsed"] = log.elapsed;
  return d;
}

RunLog LogFromIncumbents(const std::vector<std::pair<double, double>>& incumbents) {
  RunLog log;
  for (const auto& [t, obj] : incumbents) {
    log.events.push_back({t, static_cast<std::int64_t>(t), EventKind::kIncumbent, obj, 0, 0});
  }
  return log;
}

LnsParams Params(int r, double eta, int count_limit, double sub_time_limit, double time_limit,
                 std::int64_t sub_node_limit, std::int64_t max_subsolves,
                 std::int64_t max_lp_iterations) {
  LnsParams p;
  p.r = r;
  p.eta = eta;
  p.count_limit = count_limit;
  p.sub_time_limit = sub_time_limit;
  p.time_limit = time_limit;
  p.sub_node_limit = sub_node_limit;
  p.max_subsolves = max_subsolves;
  p.max_lp_iterations = max_lp_iterations;
  return p;
}

Fixer MakeFixer(const std::optional<SgtWeights>& weights) {
  return weights ? LearnedFixer(*weights) : RandomFixer();
}

Solution StartPoint(const MilpInstance& m, const std::optional<std::vector<double>>& start,
                    const std::string& how, double init_time_limit) {
  if (start) return Solution::Of(m, *start);
  return how == "solver" ? InitialIncumbent(m, init_time_limit) : TrivialIncumbent(m);
}

py::dict ResultDict(const LnsResult& r) {
  py::dict d;
  d["objective"] = r.best.objective;
  d["x"] = r.best.x;
  d["log"] = LogDict(r.log);
  return d;
}

py::dict RecordDict(const SampleRecord& r) {
  py::dict d;
  d["instance"] = r.instance;
  d["incumbent"] = r.incumbent;
  d["lb_k"] = r.lb_k;
  d["positives"] = r.positives;
  d["negatives"] = r.negatives;
  return d;
}

SampleRecord RecordFromDict(const py::dict& d) {
  SampleRecord r;
  r.instance = d["instance"].cast<std::string>();
  r.incumbent = d["incumbent"].cast<std::vector<double>>();
  r.lb_k = d["lb_k"].cast<int>();
  r.positives = d["positives"].cast<std::vector<Action>>();
  r.negatives = d["negatives"].cast<std::vector<Action>>();
  return r;
}

}  // namespace
}  // namespace tlns

PYBIND11_MODULE(_tlns, mod) {
  using namespace tlns;
  mod.doc() = "Large neighborhood search for mixed-integer programs";

  auto base = py::register_exception<Error>(mod, "Error", PyExc_RuntimeError);
  py::register_exception<ContractError>(mod, "ContractError", base.ptr());
  py::register_exception<ParseError>(mod, "ParseError", base.ptr());
  py::register_exception<NumericalError>(mod, "NumericalError", base.ptr());
  py::register_exception<UnsupportedModelError>(mod, "UnsupportedModelError", base.ptr());
  py::register_exception<InfeasibleInputError>(mod, "InfeasibleInputError", base.ptr());

  py::class_<MilpInstance>(mod, "Instance")
      .def_property_readonly("name", &MilpInstance::name)
      .def_property_readonly("n", &MilpInstance::n)
      .def_property_readonly("m", &MilpInstance::m)
      .def_property_readonly("nnz", &MilpInstance::nnz)
      .def_property_readonly("num_integer", &MilpInstance::num_integer)
      .def_property_readonly("c", [](const MilpInstance& m) {
        return std::vector<double>(m.obj().begin(), m.obj().end());
      })
      .def("objective", [](const MilpInstance& m, const std::vector<double>& x) {
        return EvaluateObjective(m, x);
      })
      .def("is_feasible", [](const MilpInstance& m, const std::vector<double>& x) {
        return IsFeasible(m, x);
      })
      .def("to_json", &InstanceToJson)
      .def_static("from_json", [](const std::string& s) { return InstanceFromJson(s); })
      .def("__eq__", [](const MilpInstance& a, const MilpInstance& b) { return a == b; })
      .def("__repr__", [](const MilpInstance& m) {
        return "<Instance " + m.name() + " n=" + std::to_string(m.n()) +
               " m=" + std::to_string(m.m()) + ">";
      });

  mod.def("read_instance", &ReadInstance, py::arg("path"));
  mod.def("write_instance", &WriteInstance, py::arg("instance"), py::arg("path"));
  mod.def(
      "generate",
      [](const std::string& family, int items, int subsets, double density, int bids,
         int max_bundle, double price_spread, int nodes, double avg_degree, std::uint64_t seed) {
        GenSpec s;
        s.family = ParseFamily(family);
        s.n_items = items;
        s.n_subsets = subsets;
        s.density = density;
        s.n_bids = bids;
        s.max_bundle = max_bundle;
        s.price_spread = price_spread;
        s.n_nodes = nodes;
        s.avg_degree = avg_degree;
        s.seed = seed;
        return Generate(s);
      },
      py::arg("family"), py::kw_only(), py::arg("items") = 0, py::arg("subsets") = 0,
      py::arg("density") = 0.05, py::arg("bids") = 0, py::arg("max_bundle") = 10,
      py::arg("price_spread") = 1.0, py::arg("nodes") = 0, py::arg("avg_degree") = 0.0,
      py::arg("seed") = 0);

  mod.def(
      "solve",
      [](const MilpInstance& m, double time_limit, std::int64_t node_limit, int solution_limit) {
        SolveOptions so;
        so.time_limit = time_limit;
        so.node_limit = node_limit;
        so.solution_limit = solution_limit;
        SolverResult r;
        {
          py::gil_scoped_release release;
          r = SolveMilp(m, so);
        }
        py::dict d;
        d["status"] = SolveStatusName(r.status);
        d["objective"] = r.best ? py::cast(r.best->objective) : py::none();
        d["x"] = r.best ? py::cast(r.best->x) : py::none();
        d["dual_bound"] = r.dual_bound;
        d["nodes"] = r.nodes;
        d["elapsed"] = r.elapsed;
        return d;
      },
      py::arg("instance"), py::kw_only(),
      py::arg("time_limit") = std::numeric_limits<double>::infinity(), py::arg("node_limit") = 0,
      py::arg("solution_limit") = 0);

  py::class_<SgtWeights>(mod, "SgtWeights")
      .def_readonly("d", &SgtWeights::d)
      .def_readwrite("alpha", &SgtWeights::alpha)
      .def_readwrite("beta", &SgtWeights::beta)
      .def_static("zeros", &SgtWeights::Zeros, py::arg("d") = 32, py::arg("alpha") = 0.5,
                  py::arg("beta") = 0.5)
      .def_static(
          "random",
          [](std::uint64_t seed, int d, double scale, double alpha, double beta) {
            Rng rng(seed);
            return SgtWeights::Random(rng, d, scale, alpha, beta);
          },
          py::arg("seed"), py::arg("d") = 32, py::arg("scale") = 0.3, py::arg("alpha") = 0.5,
          py::arg("beta") = 0.5)
      .def("__eq__", [](const SgtWeights& a, const SgtWeights& b) { return a == b; });
  mod.def("load_weights", &LoadWeights, py::arg("path"));
  mod.def("save_weights", &SaveWeights, py::arg("weights"), py::arg("path"));

  mod.def(
      "extract_features",
      [](const MilpInstance& m, const std::vector<double>& incumbent) {
        const PolicyState s = ExtractFeatures(m, incumbent);
        std::vector<int> ev;
        std::vector<int> ec;
        for (const BipartiteEdge& e : s.graph.edges) {
          ev.push_back(e.var);
          ec.push_back(e.con);
        }
        py::dict d;
        d["var_feats"] = s.var_feats;
        d["con_feats"] = s.con_feats;
        d["edge_var"] = ev;
        d["edge_con"] = ec;
        d["edge_feats"] = s.edge_feats;
        return d;
      },
      py::arg("instance"), py::arg("incumbent"));
  mod.def(
      "sgt_forward",
      [](const MilpInstance& m, const std::vector<double>& incumbent, const SgtWeights& w) {
        const std::vector<double> scores = SgtForward(ExtractFeatures(m, incumbent), w);
        return py::array_t<double>(static_cast<py::ssize_t>(scores.size()), scores.data());
      },
      py::arg("instance"), py::arg("incumbent"), py::arg("weights"));

  mod.def(
      "run_lns",
      [](const MilpInstance& m, int r, double eta, int count_limit, double sub_time_limit,
         double time_limit, std::int64_t sub_node_limit, std::int64_t max_subsolves,
         std::int64_t max_lp_iterations, std::uint64_t seed, std::optional<SgtWeights> weights,
         std::optional<std::vector<double>> start, const std::string& start_from,
         double init_time_limit) {
        const Solution x0 = StartPoint(m, start, start_from, init_time_limit);
        const LnsParams p =
            Params(r, eta, count_limit, sub_time_limit, time_limit, sub_node_limit, max_subsolves,
                   max_lp_iterations);
        Rng rng(seed);
        LnsResult res;
        {
          py::gil_scoped_release release;
          res = RunLns(m, x0, MakeFixer(weights), p, rng);
        }
        return ResultDict(res);
      },
      py::arg("instance"), py::kw_only(), py::arg("r") = 100, py::arg("eta") = 1.05,
      py::arg("count_limit") = 4, py::arg("sub_time_limit") = 5.0, py::arg("time_limit") = 60.0,
      py::arg("sub_node_limit") = 0, py::arg("max_subsolves") = 0,
      py::arg("max_lp_iterations") = 0, py::arg("seed") = 0,
      py::arg("weights") = py::none(), py::arg("start") = py::none(),
      py::arg("start_from") = "solver", py::arg("init_time_limit") = 10.0);

  mod.def(
      "run_tlns",
      [](const MilpInstance& m, int r1, int r2, double eta1, double eta2, int count_limit,
         double sub_time_limit, double time_limit, std::int64_t sub_node_limit,
         std::int64_t max_subsolves, std::int64_t max_lp_iterations, std::uint64_t seed,
         std::optional<SgtWeights> weights,
         std::optional<std::vector<double>> start, const std::string& start_from,
         double init_time_limit) {
        const Solution x0 = StartPoint(m, start, start_from, init_time_limit);
        const LnsParams outer =
            Params(r1, eta1, count_limit, sub_time_limit, time_limit, sub_node_limit, max_subsolves,
                   max_lp_iterations);
        const LnsParams inner =
            Params(r2, eta2, count_limit, sub_time_limit, time_limit, sub_node_limit, 0, 0);
        Rng rng(seed);
        LnsResult res;
        {
          py::gil_scoped_release release;
          res = RunTlns(m, x0, MakeFixer(weights), outer, inner, rng);
        }
        return ResultDict(res);
      },
      py::arg("instance"), py::kw_only(), py::arg("r1") = 100, py::arg("r2") = 20,
      py::arg("eta1") = 1.05, py::arg("eta2") = 1.15, py::arg("count_limit") = 4,
      py::arg("sub_time_limit") = 5.0, py::arg("time_limit") = 60.0,
      py::arg("sub_node_limit") = 0, py::arg("max_subsolves") = 0,
      py::arg("max_lp_iterations") = 0, py::arg("seed") = 0,
      py::arg("weights") = py::none(), py::arg("start") = py::none(),
      py::arg("start_from") = "solver", py::arg("init_time_limit") = 10.0);

  mod.def("primal_gap", &PrimalGap, py::arg("pb"), py::arg("bks"));
  mod.def(
      "primal_integral",
      [](const std::vector<std::pair<double, double>>& incumbents, double bks, double horizon) {
        return PrimalIntegral(LogFromIncumbents(incumbents), bks, horizon);
      },
      py::arg("incumbents"), py::arg("bks"), py::arg("horizon"),
      "Primal integral of (time, objective) incumbent pairs over [0, horizon].");

  mod.def(
      "read_dataset",
      [](const std::string& path) {
        py::list out;
        for (const SampleRecord& r : ReadDataset(path)) out.append(RecordDict(r));
        return out;
      },
      py::arg("path"));
  mod.def(
      "write_dataset",
      [](const py::list& records, const std::string& path) {
        std::vector<SampleRecord> recs;
        for (const py::handle& h : records) recs.push_back(RecordFromDict(h.cast<py::dict>()));
        WriteDataset(recs, path);
      },
      py::arg("records"), py::arg("path"));
}
