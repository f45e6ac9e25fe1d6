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

#include "tlns/presolve.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "tlns/errors.h"

namespace tlns {
namespace {

// Violation accepted before a row is declared unsatisfiable.
constexpr double kInfeasTol = 1e-6;
// Slack under which a row counts as implied by the bound box.
constexpr double kRedundancyTol = 1e-9;

class Reducer {
 public:
  // `hint`, when nonempty, is a feasible point; continuous variables whose
  // bounds collapse take its value.
  Reducer(const MilpInstance& model, std::span<const double> hint)
      : model_(model),
        hint_(hint),
        lo_(model.lower().begin(), model.lower().end()),
        up_(model.upper().begin(), model.upper().end()),
        row_alive_(model.m(), 1) {}

  PresolveOutcome Run();

 private:
  bool IsFixed(int i) const { return lo_[i] == up_[i]; }
  // Returns false if the row proves infeasibility.
  bool ProcessRow(int j, bool& changed);
  bool TightenFromSingleton(int i, double coef, Sense sense, double rhs);

  const MilpInstance& model_;
  std::span<const double> hint_;
  std::vector<double> lo_;
  std::vector<double> up_;
  std::vector<char> row_alive_;
  std::vector<std::pair<int, DropReason>> dropped_;
};

bool Reducer::TightenFromSingleton(int i, double coef, Sense sense, double rhs) {
  const double bound = rhs / coef;
  const bool upper_side = (sense == Sense::kLe) == (coef > 0.0);
  double lo = lo_[i];
  double up = up_[i];
  if (sense == Sense::kEq) {
    lo = std::max(lo, bound);
    up = std::min(up, bound);
  } else if (upper_side) {
    up = std::min(up, bound);
  } else {
    lo = std::max(lo, bound);
  }
  if (model_.is_integer(i)) {
    lo = std::ceil(lo - kInfeasTol);
    up = std::floor(up + kInfeasTol);
    if (lo > up) return false;
  } else {
    if (lo > up + kInfeasTol) return false;
    if (lo >= up - 1e-12) {
      double v = std::clamp(0.5 * (lo + up), lo_[i], up_[i]);
      if (!hint_.empty() && std::abs(hint_[i] - v) <= kInfeasTol) v = hint_[i];
      lo = up = v;
    }
  }
  lo_[i] = lo;
  up_[i] = up;
  return true;
}

bool Reducer::ProcessRow(int j, bool& changed) {
  RowView row = model_.row(j);
  double fixed_part = 0.0;
  double min_act = 0.0;
  double max_act = 0.0;
  int free_count = 0;
  int last_free = -1;
  double last_coef = 0.0;
  for (int k = 0; k < row.size(); ++k) {
    const int i = row.cols[k];
    const double a = row.vals[k];
    if (IsFixed(i)) {
      fixed_part += a * lo_[i];
      continue;
    }
    ++free_count;
    last_free = i;
    last_coef = a;
    if (a > 0.0) {
      min_act += a * lo_[i];
      max_act += a * up_[i];
    } else {
      min_act += a * up_[i];
      max_act += a * lo_[i];
    }
  }
  const double rhs = model_.rhs()[j] - fixed_part;
  const Sense sense = model_.sense(j);
  const bool check_le = sense != Sense::kGe;
  const bool check_ge = sense != Sense::kLe;
  if (check_le && min_act > rhs + kInfeasTol) return false;
  if (check_ge && max_act < rhs - kInfeasTol) return false;
  if (free_count == 0) {
    row_alive_[j] = 0;
    dropped_.emplace_back(j, DropReason::kAllFixed);
    return true;
  }
  const bool le_implied = !check_le || max_act <= rhs + kRedundancyTol;
  const bool ge_implied = !check_ge || min_act >= rhs - kRedundancyTol;
  if (le_implied && ge_implied) {
    row_alive_[j] = 0;
    dropped_.emplace_back(j, DropReason::kRedundantByActivity);
    return true;
  }
  if (free_count == 1) {
    if (!TightenFromSingleton(last_free, last_coef, sense, rhs)) return false;
    row_alive_[j] = 0;
    dropped_.emplace_back(j, DropReason::kSingletonToBound);
    changed = true;
  }
  return true;
}

PresolveOutcome Reducer::Run() {
  PresolveOutcome out;
  const int n = model_.n();
  const int m = model_.m();
  for (bool changed = true; changed;) {
    changed = false;
    for (int j = 0; j < m; ++j) {
      if (!row_alive_[j]) continue;
      if (!ProcessRow(j, changed)) {
        out.infeasible = true;
        out.infeasible_row = j;
        return out;
      }
    }
  }

  PresolveMap& map = out.map;
  map.original_n = n;
  map.original_m = m;
  std::vector<int> new_index(n, -1);
  for (int i = 0; i < n; ++i) {
    if (IsFixed(i)) {
      const double v = model_.is_integer(i) ? std::round(lo_[i]) : lo_[i];
      map.fixed_values.emplace_back(i, v);
      map.objective_offset += model_.obj()[i] * v;
    } else {
      new_index[i] = static_cast<int>(map.kept_vars.size());
      map.kept_vars.push_back(i);
    }
  }
  std::sort(dropped_.begin(), dropped_.end());
  map.dropped_rows = std::move(dropped_);

  MilpData d;
  d.name = model_.name();
  d.num_vars = static_cast<int>(map.kept_vars.size());
  for (int i : map.kept_vars) {
    d.obj.push_back(model_.obj()[i]);
    d.lower.push_back(lo_[i]);
    d.upper.push_back(up_[i]);
    d.is_integer.push_back(model_.is_integer(i));
  }
  for (int j = 0; j < m; ++j) {
    if (!row_alive_[j]) continue;
    RowView row = model_.row(j);
    SparseRow r;
    double fixed_part = 0.0;
    for (int k = 0; k < row.size(); ++k) {
      const int i = row.cols[k];
      if (new_index[i] < 0) {
        fixed_part += row.vals[k] * lo_[i];
      } else {
        r.cols.push_back(new_index[i]);
        r.vals.push_back(row.vals[k]);
      }
    }
    d.rows.push_back(std::move(r));
    d.sense.push_back(model_.sense(j));
    d.rhs.push_back(model_.rhs()[j] - fixed_part);
    map.kept_rows.push_back(j);
  }
  out.reduced = MilpInstance(std::move(d));
  return out;
}

}  // namespace

PresolveOutcome PresolveModel(const MilpInstance& model) {
  return Reducer(model, {}).Run();
}

FixingPresolve PresolveFixing(const MilpInstance& model,
                              const Solution& incumbent,
                              const FixingSet& fixed) {
  if (static_cast<int>(incumbent.x.size()) != model.n()) {
    throw ContractError("incumbent length does not match the model");
  }
  const FeasibilityReport rep = CheckFeasibility(model, incumbent.x, kFeasibilityTol);
  if (!rep.feasible) {
    throw InfeasibleInputError("presolve: incumbent is infeasible (max violation " +
                               std::to_string(rep.max_violation) + ")");
  }
  const MilpInstance aux = BuildAuxiliary(model, incumbent.x, fixed);
  PresolveOutcome out = Reducer(aux, incumbent.x).Run();
  if (out.infeasible) {
    throw InfeasibleInputError("presolve: row " + std::to_string(out.infeasible_row) +
                               " cannot be satisfied by the fixed incumbent values");
  }
  std::vector<double> y;
  y.reserve(out.map.kept_vars.size());
  for (int i : out.map.kept_vars) y.push_back(incumbent.x[i]);
  FixingPresolve result{std::move(out.reduced), {}, std::move(out.map)};
  result.reduced_incumbent = Solution::Of(result.reduced, std::move(y));
  return result;
}

Solution Postsolve(const MilpInstance& original, std::span<const double> reduced_x,
                   const PresolveMap& map) {
  if (original.n() != map.original_n) {
    throw ContractError("postsolve: model does not match the presolve map");
  }
  if (reduced_x.size() != map.kept_vars.size()) {
    throw ContractError("postsolve: reduced solution has length " +
                        std::to_string(reduced_x.size()) + ", map expects " +
                        std::to_string(map.kept_vars.size()));
  }
  std::vector<double> x(map.original_n, 0.0);
  for (std::size_t k = 0; k < map.kept_vars.size(); ++k) x[map.kept_vars[k]] = reduced_x[k];
  for (const auto& [i, v] : map.fixed_values) x[i] = v;
  return Solution::Of(original, std::move(x));
}

}  // namespace tlns
