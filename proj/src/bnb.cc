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

#include "tlns/bnb.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <string>
#include <utility>

#include "tlns/errors.h"
#include "tlns/lp_simplex.h"
#include "tlns/presolve.h"

namespace tlns {
namespace {

using Clock = std::chrono::steady_clock;

constexpr double kIntegralityTol = 1e-6;
constexpr double kImproveTol = 1e-9;

struct Node {
  double bound = -std::numeric_limits<double>::infinity();
  std::int64_t seq = 0;
  std::vector<std::pair<int, double>> fixes;  // branching decisions
  std::shared_ptr<const LpBasis> basis;
};

// Heap order: smallest bound on top, older nodes first among equal bounds.
bool HeapLess(const Node& a, const Node& b) {
  if (a.bound != b.bound) return a.bound > b.bound;
  return a.seq > b.seq;
}

double Violation(Sense sense, double act, double rhs) {
  switch (sense) {
    case Sense::kLe:
      return std::max(0.0, act - rhs);
    case Sense::kGe:
      return std::max(0.0, rhs - act);
    case Sense::kEq:
      return std::abs(act - rhs);
  }
  return 0.0;
}

class Search {
 public:
  Search(const MilpInstance& model, const SolveOptions& options)
      : original_(model), options_(options), start_time_(Clock::now()) {
    if (std::isfinite(options.time_limit)) {
      deadline_ = start_time_ + std::chrono::duration_cast<Clock::duration>(
                                    std::chrono::duration<double>(options.time_limit));
    }
  }

  SolverResult Run();

 private:
  double Elapsed() const {
    return std::chrono::duration<double>(Clock::now() - start_time_).count();
  }
  bool StopRequested() const {
    return options_.stop != nullptr && options_.stop->load(std::memory_order_relaxed);
  }
  bool PastDeadline() const { return deadline_ && Clock::now() >= *deadline_; }

  // True when no point with objective `bound` (reduced space) can improve
  // on the incumbent.
  bool Prunable(double bound) const;
  // Rounds, lifts and records `x` (reduced space) if it improves.
  bool TryAccept(std::vector<double> x);
  bool RootHeuristic(const std::vector<double>& lp_x);
  bool SolutionLimitReached() const {
    return options_.solution_limit > 0 && found_ >= options_.solution_limit;
  }
  void Finish(SolveStatus status, double open_bound);

  const MilpInstance& original_;
  const SolveOptions& options_;
  const Clock::time_point start_time_;
  std::optional<Clock::time_point> deadline_;

  MilpInstance reduced_;
  PresolveMap map_;
  bool integral_objective_ = false;
  std::vector<double> base_lo_;
  std::vector<double> base_up_;

  double cutoff_ = std::numeric_limits<double>::infinity();  // reduced space
  int found_ = 0;
  SolverResult result_;
};

bool Search::Prunable(double bound) const {
  if (!std::isfinite(cutoff_)) return false;
  if (integral_objective_) {
    return std::ceil(bound - kIntegralityTol) > cutoff_ - 0.5;
  }
  const double scale = std::max(1.0, std::abs(cutoff_));
  return bound >= cutoff_ - std::max(kImproveTol, options_.gap_tol) * scale;
}

bool Search::TryAccept(std::vector<double> x) {
  std::vector<double> rounded = x;
  for (int i = 0; i < reduced_.n(); ++i) {
    if (reduced_.is_integer(i)) rounded[i] = std::round(rounded[i]);
  }
  Solution lifted = Postsolve(original_, rounded, map_);
  std::vector<double>* chosen = &rounded;
  if (!IsFeasible(original_, lifted.x)) {
    lifted = Postsolve(original_, x, map_);
    if (!IsFeasible(original_, lifted.x)) return false;
    chosen = &x;
  }
  if (result_.best && !(lifted.objective < result_.best->objective - kImproveTol)) {
    return false;
  }
  cutoff_ = EvaluateObjective(reduced_, *chosen);
  result_.best = lifted;
  result_.pool.push_back({Elapsed(), std::move(lifted)});
  ++found_;
  return true;
}

bool Search::RootHeuristic(const std::vector<double>& lp_x) {
  const int n = reduced_.n();
  std::vector<double> x = lp_x;
  for (int i = 0; i < n; ++i) {
    if (reduced_.is_integer(i)) x[i] = std::clamp(std::round(x[i]), base_lo_[i], base_up_[i]);
  }
  std::vector<double> act = RowActivities(reduced_, x);
  auto flip_target = [&](int i) { return x[i] == base_lo_[i] ? base_up_[i] : base_lo_[i]; };
  auto violation_change = [&](int i, double nv) {
    ColView col = reduced_.col(i);
    double delta = 0.0;
    for (int k = 0; k < col.size(); ++k) {
      const int j = col.rows[k];
      const double a = act[j] + col.vals[k] * (nv - x[i]);
      delta += Violation(reduced_.sense(j), a, reduced_.rhs()[j]) -
               Violation(reduced_.sense(j), act[j], reduced_.rhs()[j]);
    }
    return delta;
  };
  auto apply = [&](int i, double nv) {
    ColView col = reduced_.col(i);
    for (int k = 0; k < col.size(); ++k) act[col.rows[k]] += col.vals[k] * (nv - x[i]);
    x[i] = nv;
  };

  const int budget = 2 * n + 10;
  for (int step = 0;; ++step) {
    int row = -1;
    for (int j = 0; j < reduced_.m(); ++j) {
      if (Violation(reduced_.sense(j), act[j], reduced_.rhs()[j]) > kImproveTol) {
        row = j;
        break;
      }
    }
    if (row < 0) break;
    if (step >= budget) return false;
    RowView r = reduced_.row(row);
    int pick = -1;
    double pick_delta = -kImproveTol;
    double pick_cost = 0.0;
    for (int k = 0; k < r.size(); ++k) {
      const int i = r.cols[k];
      if (!reduced_.is_integer(i) || base_lo_[i] == base_up_[i]) continue;
      const double nv = flip_target(i);
      const double delta = violation_change(i, nv);
      const double cost = reduced_.obj()[i] * (nv - x[i]);
      if (delta < pick_delta - 1e-12 || (pick >= 0 && delta <= pick_delta + 1e-12 && cost < pick_cost)) {
        pick = i;
        pick_delta = delta;
        pick_cost = cost;
      }
    }
    if (pick < 0) return false;
    apply(pick, flip_target(pick));
  }

  // One pass of objective-improving flips that keep every row satisfied.
  for (int i = 0; i < n; ++i) {
    if (!reduced_.is_integer(i) || base_lo_[i] == base_up_[i]) continue;
    const double nv = flip_target(i);
    if (reduced_.obj()[i] * (nv - x[i]) >= 0.0) continue;
    ColView col = reduced_.col(i);
    bool ok = true;
    for (int k = 0; k < col.size() && ok; ++k) {
      const int j = col.rows[k];
      ok = Violation(reduced_.sense(j), act[j] + col.vals[k] * (nv - x[i]),
                     reduced_.rhs()[j]) <= kImproveTol;
    }
    if (ok) apply(i, nv);
  }

  if (reduced_.num_integer() < n) {
    std::vector<double> lo = base_lo_;
    std::vector<double> up = base_up_;
    for (int i = 0; i < n; ++i) {
      if (reduced_.is_integer(i)) lo[i] = up[i] = x[i];
    }
    LpOptions lp;
    lp.deadline = deadline_;
    lp.stop = options_.stop;
    LpResult res = SolveLp(reduced_, lo, up, lp);
    result_.lp_iterations += res.iterations;
    if (res.status != LpStatus::kOptimal) return false;
    x = std::move(res.x);
  }
  return TryAccept(std::move(x));
}

void Search::Finish(SolveStatus status, double open_bound) {
  result_.status = status;
  const double incumbent = cutoff_;
  const double bound = std::min(open_bound, incumbent);
  result_.dual_bound = bound + map_.objective_offset;
  if (status == SolveStatus::kOptimal && result_.best) {
    result_.dual_bound = std::min(result_.dual_bound, result_.best->objective);
  }
  result_.elapsed = Elapsed();
}

SolverResult Search::Run() {
  if (!original_.IsBinaryProgram()) {
    throw UnsupportedModelError("branch-and-bound supports binary integer variables only");
  }
  if (options_.start != nullptr) {
    if (static_cast<int>(options_.start->size()) != original_.n()) {
      throw ContractError("start point length does not match the model");
    }
    if (!IsFeasible(original_, *options_.start)) {
      throw InfeasibleInputError("start point is infeasible");
    }
    Solution s = Solution::Of(original_, *options_.start);
    result_.best = s;
    result_.pool.push_back({Elapsed(), std::move(s)});
  }

  bool reduced = false;
  if (options_.presolve) {
    PresolveOutcome out = PresolveModel(original_);
    if (out.infeasible && !result_.best) {
      result_.status = SolveStatus::kInfeasible;
      result_.dual_bound = std::numeric_limits<double>::infinity();
      result_.elapsed = Elapsed();
      return std::move(result_);
    }
    if (!out.infeasible) {
      reduced_ = std::move(out.reduced);
      map_ = std::move(out.map);
      reduced = true;
    }
  }
  if (!reduced) {
    reduced_ = original_;
    map_ = PresolveMap{};
    map_.original_n = original_.n();
    map_.original_m = original_.m();
    for (int i = 0; i < original_.n(); ++i) map_.kept_vars.push_back(i);
    for (int j = 0; j < original_.m(); ++j) map_.kept_rows.push_back(j);
  }
  if (result_.best) cutoff_ = result_.best->objective - map_.objective_offset;

  integral_objective_ = true;
  for (int i = 0; i < reduced_.n() && integral_objective_; ++i) {
    const double c = reduced_.obj()[i];
    integral_objective_ = c == 0.0 || (reduced_.is_integer(i) && c == std::round(c));
  }
  base_lo_.assign(reduced_.lower().begin(), reduced_.lower().end());
  base_up_.assign(reduced_.upper().begin(), reduced_.upper().end());

  std::vector<Node> heap;
  std::int64_t seq = 0;
  std::optional<Node> next = Node{};
  next->seq = seq++;
  auto open_bound = [&] {
    double b = std::numeric_limits<double>::infinity();
    for (const Node& nd : heap) b = std::min(b, nd.bound);
    if (next) b = std::min(b, next->bound);
    return b;
  };

  LpOptions lp;
  lp.deadline = deadline_;
  lp.stop = options_.stop;
  std::vector<double> lo;
  std::vector<double> up;

  for (;;) {
    if (!next) {
      if (heap.empty()) break;
      std::pop_heap(heap.begin(), heap.end(), HeapLess);
      Node nd = std::move(heap.back());
      heap.pop_back();
      if (Prunable(nd.bound)) continue;
      next = std::move(nd);
    }
    if (StopRequested()) {
      Finish(result_.best ? SolveStatus::kFeasible : SolveStatus::kTimeLimit, open_bound());
      return std::move(result_);
    }
    if (PastDeadline()) {
      Finish(SolveStatus::kTimeLimit, open_bound());
      return std::move(result_);
    }
    if (options_.node_limit > 0 && result_.nodes >= options_.node_limit) {
      Finish(SolveStatus::kNodeLimit, open_bound());
      return std::move(result_);
    }

    lo = base_lo_;
    up = base_up_;
    for (auto [i, v] : next->fixes) lo[i] = up[i] = v;
    lp.warm_start = next->basis.get();
    LpResult res = SolveLp(reduced_, lo, up, lp);
    ++result_.nodes;
    result_.lp_iterations += res.iterations;
    if (res.status == LpStatus::kStopped) {
      Finish(StopRequested() && result_.best ? SolveStatus::kFeasible : SolveStatus::kTimeLimit,
             open_bound());
      return std::move(result_);
    }
    if (res.status == LpStatus::kIterationLimit) {
      throw NumericalError("simplex iteration limit reached in node " +
                           std::to_string(result_.nodes));
    }
    if (res.status == LpStatus::kUnbounded) {
      throw UnsupportedModelError("LP relaxation is unbounded");
    }
    Node node = std::move(*next);
    next.reset();
    if (res.status == LpStatus::kInfeasible) continue;

    if (result_.nodes == 1 && RootHeuristic(res.x) && SolutionLimitReached()) {
      next = Node{res.objective, node.seq, {}, nullptr};
      Finish(SolveStatus::kSolutionLimit, open_bound());
      return std::move(result_);
    }
    if (Prunable(res.objective)) continue;

    int branch = -1;
    double best_frac = 0.0;
    for (int i = 0; i < reduced_.n(); ++i) {
      if (!reduced_.is_integer(i) || lo[i] == up[i]) continue;
      const double f = res.x[i] - std::floor(res.x[i]);
      const double score = std::min(f, 1.0 - f);
      if (score > kIntegralityTol && score > best_frac) {
        best_frac = score;
        branch = i;
      }
    }
    if (branch < 0) {
      if (TryAccept(res.x) && SolutionLimitReached()) {
        Finish(SolveStatus::kSolutionLimit, open_bound());
        return std::move(result_);
      }
      continue;
    }

    auto basis = std::make_shared<const LpBasis>(std::move(res.final_basis));
    Node ceil_child{res.objective, seq++, node.fixes, basis};
    ceil_child.fixes.emplace_back(branch, std::ceil(res.x[branch]));
    Node floor_child{res.objective, seq++, std::move(node.fixes), basis};
    floor_child.fixes.emplace_back(branch, std::floor(res.x[branch]));
    heap.push_back(std::move(ceil_child));
    std::push_heap(heap.begin(), heap.end(), HeapLess);
    next = std::move(floor_child);
  }

  if (!result_.best) {
    result_.status = SolveStatus::kInfeasible;
    result_.dual_bound = std::numeric_limits<double>::infinity();
    result_.elapsed = Elapsed();
    return std::move(result_);
  }
  Finish(SolveStatus::kOptimal, std::numeric_limits<double>::infinity());
  return std::move(result_);
}

}  // namespace

const char* SolveStatusName(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kFeasible:
      return "feasible";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kTimeLimit:
      return "time_limit";
    case SolveStatus::kSolutionLimit:
      return "solution_limit";
    case SolveStatus::kNodeLimit:
      return "node_limit";
  }
  return "?";
}

void ValidateSolveOptions(const SolveOptions& options) {
  if (!(options.time_limit > 0.0)) throw ContractError("time_limit must be > 0");
  if (!(options.gap_tol >= 0.0)) throw ContractError("gap_tol must be >= 0");
  if (options.solution_limit < 0) throw ContractError("solution_limit must be >= 0");
  if (options.node_limit < 0) throw ContractError("node_limit must be >= 0");
}

SolverResult SolveMilp(const MilpInstance& model, const SolveOptions& options) {
  ValidateSolveOptions(options);
  return Search(model, options).Run();
}

}  // namespace tlns
