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

#include "tlns/lns.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>
#include <utility>

#include "json.hpp"
#include "tlns/bnb.h"
#include "tlns/errors.h"
#include "tlns/presolve.h"

namespace tlns {
namespace {

using Clock = std::chrono::steady_clock;
using Json = nlohmann::json;

constexpr double kImproveTol = 1e-9;

class Engine {
 public:
  Engine(const MilpInstance& model, const Solution& start, const RunControl& control,
         double time_limit, std::int64_t max_subsolves, std::int64_t max_lp_iterations)
      : model_(model),
        control_(control),
        time_limit_(time_limit),
        max_subsolves_(max_subsolves),
        max_lp_iterations_(max_lp_iterations),
        start_time_(Clock::now()),
        best_(start) {}

  double Elapsed() const {
    return std::chrono::duration<double>(Clock::now() - start_time_).count();
  }
  double Remaining() const { return time_limit_ - Elapsed(); }

  bool OutOfBudget() const {
    if (control_.stop != nullptr && control_.stop->load(std::memory_order_relaxed)) return true;
    if (max_subsolves_ > 0 && log_.subsolves >= max_subsolves_) return true;
    if (max_lp_iterations_ > 0 && log_.lp_iterations >= max_lp_iterations_) return true;
    return Remaining() <= 0.0;
  }

  template <typename F>
  auto Timed(Phase phase, F&& f) {
    const auto t0 = Clock::now();
    auto out = f();
    log_.phase_times[static_cast<int>(phase)] +=
        std::chrono::duration<double>(Clock::now() - t0).count();
    return out;
  }

  // Records `x` (original space) when it strictly improves the best point.
  void Offer(const Solution& x, int r, int layer) {
    if (!(x.objective < best_.objective - kImproveTol)) return;
    const FeasibilityReport rep = CheckFeasibility(model_, x.x);
    if (!rep.feasible) {
      throw NumericalError("improving solution violates the model by " +
                           std::to_string(rep.max_violation));
    }
    best_ = x;
    Event(EventKind::kIncumbent, r, layer);
  }

  void Event(EventKind kind, int r, int layer) {
    log_.events.push_back(
        {Elapsed(), log_.subsolves, kind, best_.objective, r, layer, log_.lp_iterations});
  }

  SolveOptions SubSolveOptions(const LnsParams& p) const {
    SolveOptions so;
    so.time_limit = std::min(p.sub_time_limit, std::max(Remaining(), 1e-3));
    so.node_limit = p.sub_node_limit;
    so.stop = control_.stop;
    return so;
  }

  RunLog& log() { return log_; }
  const Solution& best() const { return best_; }

  LnsResult Finish() {
    log_.elapsed = Elapsed();
    return {best_, std::move(log_)};
  }

 private:
  const MilpInstance& model_;
  const RunControl& control_;
  const double time_limit_;
  const std::int64_t max_subsolves_;
  const std::int64_t max_lp_iterations_;
  const Clock::time_point start_time_;
  Solution best_;
  RunLog log_;
};

// The LNS loop on `model` (the original model for layer 0, a reduced model
// for layer 1). `lift` maps a solution of `model` to the original model.
// With `presolve_each`, every auxiliary model is presolved by the engine
// before the exact solve. `size` is the neighborhood size, carried in and
// out; it grows up to `size_cap` and is used capped at the model's integers.
Solution LnsLayer(Engine& eng, const MilpInstance& model, Solution x, const Fixer& fixer,
                  const LnsParams& p, Rng& rng, int layer, bool presolve_each,
                  const std::function<Solution(const Solution&)>& lift, int& size,
                  int size_cap) {
  const int n_int = model.num_integer();
  int failures = 0;
  while (failures < p.count_limit && !eng.OutOfBudget()) {
    const int r = std::min(size, n_int);
    const int r_used = r;
    FixingSet fixed = eng.Timed(Phase::kPolicy, [&] { return fixer(model, x, r, rng); });
    SolveOptions so = eng.SubSolveOptions(p);
    Solution cand;
    SolveStatus status;
    if (presolve_each) {
      FixingPresolve fp =
          eng.Timed(Phase::kPresolve, [&] { return PresolveFixing(model, x, fixed); });
      ++eng.log().presolve_calls;
      so.presolve = false;
      so.start = &fp.reduced_incumbent.x;
      SolverResult res = eng.Timed(Phase::kSubSolve, [&] { return SolveMilp(fp.reduced, so); });
      status = res.status;
      eng.log().lp_iterations += res.lp_iterations;
      cand = eng.Timed(Phase::kPostsolve, [&] { return Postsolve(model, res.best->x, fp.map); });
    } else {
      MilpInstance aux =
          eng.Timed(Phase::kOverhead, [&] { return BuildAuxiliary(model, x.x, fixed); });
      so.start = &x.x;
      SolverResult res = eng.Timed(Phase::kSubSolve, [&] { return SolveMilp(aux, so); });
      status = res.status;
      eng.log().lp_iterations += res.lp_iterations;
      cand = std::move(*res.best);
    }
    ++eng.log().subsolves;
    ++(layer == 0 ? eng.log().iterations : eng.log().inner_iterations);

    if (cand.objective < x.objective - kImproveTol) {
      x = std::move(cand);
      eng.Offer(lift(x), r, layer);
    } else {
      size = GrowNeighborhood(size, p.eta, size_cap);
      ++failures;
      eng.Event(EventKind::kNeighborhoodGrown, std::min(size, n_int), layer);
    }
    eng.Event(EventKind::kIterationEnd, std::min(size, n_int), layer);
    // Nothing was fixed and the solve was exact: x is optimal for `model`.
    if (r_used == n_int && status == SolveStatus::kOptimal) break;
  }
  return x;
}

Solution CheckedStart(const MilpInstance& model, const Solution& start) {
  if (static_cast<int>(start.x.size()) != model.n()) {
    throw ContractError("start solution length does not match the model");
  }
  const FeasibilityReport rep = CheckFeasibility(model, start.x);
  if (!rep.feasible) {
    throw InfeasibleInputError("start solution is infeasible (max violation " +
                               std::to_string(rep.max_violation) + ")");
  }
  return Solution::Of(model, start.x);
}

}  // namespace

void ValidateLnsParams(const LnsParams& p) {
  if (p.r < 1) throw ContractError("neighborhood size r must be >= 1");
  if (!(p.eta >= 1.0)) throw ContractError("eta must be >= 1");
  if (p.count_limit < 1) throw ContractError("count_limit must be >= 1");
  if (!(p.sub_time_limit > 0.0)) throw ContractError("sub_time_limit must be > 0");
  if (!(p.time_limit > 0.0)) throw ContractError("time_limit must be > 0");
  if (p.sub_node_limit < 0 || p.max_subsolves < 0 || p.max_lp_iterations < 0) {
    throw ContractError("node and solve budgets must be >= 0");
  }
}

int GrowNeighborhood(int r, double eta, int n_int) {
  const double grown = std::ceil(eta * r - 1e-9);
  const int next = grown >= n_int ? n_int : std::max(r, static_cast<int>(grown));
  return std::min(next, n_int);
}

const char* EventKindName(EventKind kind) {
  switch (kind) {
    case EventKind::kIncumbent:
      return "incumbent";
    case EventKind::kNeighborhoodGrown:
      return "neighborhood_grown";
    case EventKind::kIterationEnd:
      return "iteration_end";
  }
  return "?";
}

const char* PhaseName(Phase phase) {
  switch (phase) {
    case Phase::kPresolve:
      return "presolve";
    case Phase::kSubSolve:
      return "subsolve";
    case Phase::kPolicy:
      return "policy";
    case Phase::kPostsolve:
      return "postsolve";
    case Phase::kOverhead:
      return "overhead";
  }
  return "?";
}

bool SameTrajectory(const RunLog& a, const RunLog& b) {
  if (a.events.size() != b.events.size()) return false;
  for (std::size_t k = 0; k < a.events.size(); ++k) {
    const LnsEvent& x = a.events[k];
    const LnsEvent& y = b.events[k];
    if (x.step != y.step || x.kind != y.kind || x.objective != y.objective || x.r != y.r ||
        x.layer != y.layer || x.work != y.work) {
      return false;
    }
  }
  return a.iterations == b.iterations && a.inner_iterations == b.inner_iterations &&
         a.subsolves == b.subsolves && a.presolve_calls == b.presolve_calls &&
         a.lp_iterations == b.lp_iterations;
}

Solution TrivialIncumbent(const MilpInstance& model) {
  for (auto bounds : {model.lower(), model.upper()}) {
    std::vector<double> x(bounds.begin(), bounds.end());
    if (IsFeasible(model, x)) return Solution::Of(model, std::move(x));
  }
  throw InfeasibleInputError("neither bound point is feasible");
}

Solution InitialIncumbent(const MilpInstance& model, double time_limit) {
  SolveOptions so;
  so.solution_limit = 1;
  so.time_limit = time_limit;
  try {
    SolverResult r = SolveMilp(model, so);
    if (r.best) return *r.best;
  } catch (const UnsupportedModelError&) {
  }
  return TrivialIncumbent(model);
}

LnsResult RunLns(const MilpInstance& model, const Solution& start, const Fixer& fixer,
                 const LnsParams& params, Rng& rng, const RunControl& control) {
  ValidateLnsParams(params);
  Solution x = CheckedStart(model, start);
  Engine eng(model, x, control, params.time_limit, params.max_subsolves,
             params.max_lp_iterations);
  eng.Event(EventKind::kIncumbent, std::min(params.r, model.num_integer()), 0);
  int r = std::min(params.r, model.num_integer());
  LnsLayer(eng, model, std::move(x), fixer, params, rng, 0, true,
           [](const Solution& s) { return s; }, r, model.num_integer());
  return eng.Finish();
}

LnsResult RunTlns(const MilpInstance& model, const Solution& start, const Fixer& fixer,
                  const LnsParams& outer, const LnsParams& inner, Rng& rng,
                  const RunControl& control) {
  ValidateLnsParams(outer);
  ValidateLnsParams(inner);
  Solution x = CheckedStart(model, start);
  Engine eng(model, x, control, outer.time_limit, outer.max_subsolves,
             outer.max_lp_iterations);
  const int n_int = model.num_integer();
  eng.Event(EventKind::kIncumbent, std::min(outer.r, n_int), 0);
  if (n_int == 0) {
    int r = 0;
    LnsLayer(eng, model, std::move(x), fixer, inner, rng, 0, true,
             [](const Solution& s) { return s; }, r, 0);
    return eng.Finish();
  }
  int r = std::min(outer.r, n_int);
  // The inner size is not reset between outer iterations.
  int r2 = std::min(inner.r, n_int);
  while (!eng.OutOfBudget()) {
    FixingSet fixed = eng.Timed(Phase::kPolicy, [&] { return fixer(model, x, r, rng); });
    FixingPresolve fp =
        eng.Timed(Phase::kPresolve, [&] { return PresolveFixing(model, x, fixed); });
    ++eng.log().presolve_calls;
    auto lift = [&](const Solution& y) {
      return eng.Timed(Phase::kPostsolve, [&] { return Postsolve(model, y.x, fp.map); });
    };
    Solution y = fp.reduced_incumbent;
    if (fp.reduced.num_integer() > 0) {
      y = LnsLayer(eng, fp.reduced, std::move(y), fixer, inner, rng, 1, false, lift, r2, n_int);
    }
    Solution cand = lift(y);
    ++eng.log().iterations;
    if (cand.objective < x.objective - kImproveTol) {
      x = std::move(cand);
      eng.Offer(x, r, 0);
    } else {
      r = GrowNeighborhood(r, outer.eta, n_int);
      eng.Event(EventKind::kNeighborhoodGrown, r, 0);
    }
    eng.Event(EventKind::kIterationEnd, r, 0);
  }
  return eng.Finish();
}

void WriteRunLog(const RunLog& log, std::ostream& out) {
  for (const LnsEvent& e : log.events) {
    Json j = {{"kind", EventKindName(e.kind)}, {"t", e.elapsed},   {"step", e.step},
              {"objective", e.objective},      {"r", e.r},         {"layer", e.layer},
              {"work", e.work}};
    out << j.dump() << "\n";
  }
  Json phases = Json::object();
  for (int p = 0; p < kNumPhases; ++p) {
    phases[PhaseName(static_cast<Phase>(p))] = log.phase_times[p];
  }
  Json summary = {{"kind", "summary"},
                  {"iterations", log.iterations},
                  {"inner_iterations", log.inner_iterations},
                  {"subsolves", log.subsolves},
                  {"presolve_calls", log.presolve_calls},
                  {"lp_iterations", log.lp_iterations},
                  {"elapsed", log.elapsed},
                  {"phase_times", phases}};
  out << summary.dump() << "\n";
}

void WriteRunLog(const RunLog& log, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open " + path + " for writing");
  WriteRunLog(log, f);
  if (!f) throw Error("failed writing " + path);
}

RunLog ReadRunLog(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open " + path);
  RunLog log;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const Json j = Json::parse(line);
      const std::string kind = j.at("kind").get<std::string>();
      if (kind == "summary") {
        log.iterations = j.at("iterations").get<std::int64_t>();
        log.inner_iterations = j.at("inner_iterations").get<std::int64_t>();
        log.subsolves = j.at("subsolves").get<std::int64_t>();
        log.presolve_calls = j.at("presolve_calls").get<std::int64_t>();
        log.lp_iterations = j.value("lp_iterations", std::int64_t{0});
        log.elapsed = j.at("elapsed").get<double>();
        for (int p = 0; p < kNumPhases; ++p) {
          log.phase_times[p] = j.at("phase_times").at(PhaseName(static_cast<Phase>(p))).get<double>();
        }
        continue;
      }
      LnsEvent e;
      if (kind == "incumbent") {
        e.kind = EventKind::kIncumbent;
      } else if (kind == "neighborhood_grown") {
        e.kind = EventKind::kNeighborhoodGrown;
      } else if (kind == "iteration_end") {
        e.kind = EventKind::kIterationEnd;
      } else {
        throw ParseError("unknown event kind '" + kind + "'");
      }
      e.elapsed = j.at("t").get<double>();
      e.step = j.at("step").get<std::int64_t>();
      e.objective = j.at("objective").get<double>();
      e.r = j.at("r").get<int>();
      e.layer = j.at("layer").get<int>();
      e.work = j.value("work", std::int64_t{0});
      log.events.push_back(e);
    } catch (const Json::exception& ex) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": " + ex.what());
    } catch (const ParseError& ex) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return log;
}

}  // namespace tlns
