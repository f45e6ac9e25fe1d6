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

#include "tlns/milp.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "tlns/errors.h"

namespace tlns {
namespace {

void CheckLength(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw ContractError(std::string(what) + ": expected length " +
                        std::to_string(want) + ", got " + std::to_string(got));
  }
}

void CheckFinite(std::span<const double> v, const char* what) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      throw ContractError(std::string(what) + "[" + std::to_string(i) +
                          "] is not finite");
    }
  }
}

std::shared_ptr<const SparseMatrix> BuildMatrix(int n,
                                                std::vector<SparseRow>& rows) {
  auto mat = std::make_shared<SparseMatrix>();
  mat->num_rows = static_cast<int>(rows.size());
  mat->num_cols = n;
  mat->row_start.assign(1, 0);
  std::vector<int> col_count(n, 0);
  std::vector<int> order;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    SparseRow& r = rows[j];
    CheckLength(r.vals.size(), r.cols.size(), "row values");
    order.resize(r.cols.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return r.cols[a] < r.cols[b]; });
    int prev = -1;
    for (int k : order) {
      const int c = r.cols[k];
      const double v = r.vals[k];
      if (c < 0 || c >= n) {
        throw ContractError("row " + std::to_string(j) + ": column " +
                            std::to_string(c) + " out of range");
      }
      if (c == prev) {
        throw ContractError("row " + std::to_string(j) +
                            ": duplicate column " + std::to_string(c));
      }
      prev = c;
      if (!std::isfinite(v)) {
        throw ContractError("row " + std::to_string(j) +
                            ": non-finite coefficient");
      }
      if (v == 0.0) continue;
      mat->col_index.push_back(c);
      mat->row_value.push_back(v);
      ++col_count[c];
    }
    mat->row_start.push_back(static_cast<int>(mat->col_index.size()));
  }
  mat->col_start.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) mat->col_start[i + 1] = mat->col_start[i] + col_count[i];
  mat->row_index.resize(mat->col_index.size());
  mat->col_value.resize(mat->col_index.size());
  std::vector<int> fill(mat->col_start.begin(), mat->col_start.end() - 1);
  for (int j = 0; j < mat->num_rows; ++j) {
    for (int k = mat->row_start[j]; k < mat->row_start[j + 1]; ++k) {
      const int pos = fill[mat->col_index[k]]++;
      mat->row_index[pos] = j;
      mat->col_value[pos] = mat->row_value[k];
    }
  }
  return mat;
}

}  // namespace

const char* SenseName(Sense sense) {
  switch (sense) {
    case Sense::kLe:
      return "LE";
    case Sense::kGe:
      return "GE";
    case Sense::kEq:
      return "EQ";
  }
  return "?";
}

MilpInstance::MilpInstance()
    : matrix_(std::make_shared<SparseMatrix>(
          [] { SparseMatrix s; s.row_start = {0}; s.col_start = {0}; return s; }())) {}

MilpInstance::MilpInstance(MilpData data) : name_(std::move(data.name)) {
  const int n = data.num_vars;
  if (n < 0) throw ContractError("negative variable count");
  const std::size_t m = data.rows.size();
  CheckLength(data.sense.size(), m, "sense");
  CheckLength(data.rhs.size(), m, "rhs");
  CheckLength(data.obj.size(), n, "obj");
  CheckLength(data.lower.size(), n, "lower");
  CheckLength(data.upper.size(), n, "upper");
  CheckLength(data.is_integer.size(), n, "is_integer");
  CheckFinite(data.rhs, "rhs");
  CheckFinite(data.obj, "obj");
  matrix_ = BuildMatrix(n, data.rows);
  sense_ = std::move(data.sense);
  rhs_ = std::move(data.rhs);
  obj_ = std::move(data.obj);
  lower_ = std::move(data.lower);
  upper_ = std::move(data.upper);
  is_integer_.assign(data.is_integer.begin(), data.is_integer.end());
  num_integer_ = static_cast<int>(
      std::count(is_integer_.begin(), is_integer_.end(), std::uint8_t{1}));
  ValidateBounds();
}

void MilpInstance::ValidateBounds() const {
  CheckFinite(lower_, "lower");
  CheckFinite(upper_, "upper");
  for (int i = 0; i < n(); ++i) {
    if (lower_[i] > upper_[i]) {
      throw ContractError("variable " + std::to_string(i) +
                          ": lower bound exceeds upper bound");
    }
    if (is_integer_[i] && (lower_[i] != std::floor(lower_[i]) ||
                           upper_[i] != std::floor(upper_[i]))) {
      throw ContractError("integer variable " + std::to_string(i) +
                          " has fractional bounds");
    }
  }
}

RowView MilpInstance::row(int j) const {
  const SparseMatrix& a = *matrix_;
  const int b = a.row_start[j];
  const int e = a.row_start[j + 1];
  return {std::span<const int>(a.col_index.data() + b, e - b),
          std::span<const double>(a.row_value.data() + b, e - b)};
}

ColView MilpInstance::col(int i) const {
  const SparseMatrix& a = *matrix_;
  const int b = a.col_start[i];
  const int e = a.col_start[i + 1];
  return {std::span<const int>(a.row_index.data() + b, e - b),
          std::span<const double>(a.col_value.data() + b, e - b)};
}

std::vector<int> MilpInstance::IntegerIndices() const {
  std::vector<int> out;
  out.reserve(num_integer_);
  for (int i = 0; i < n(); ++i) {
    if (is_integer_[i]) out.push_back(i);
  }
  return out;
}

bool MilpInstance::IsBinaryProgram() const {
  for (int i = 0; i < n(); ++i) {
    if (!is_integer_[i] || lower_[i] == upper_[i]) continue;
    if (lower_[i] < 0.0 || upper_[i] > 1.0) return false;
  }
  return true;
}

MilpInstance MilpInstance::WithBounds(std::vector<double> lower,
                                      std::vector<double> upper) const {
  CheckLength(lower.size(), n(), "lower");
  CheckLength(upper.size(), n(), "upper");
  MilpInstance out = *this;
  out.lower_ = std::move(lower);
  out.upper_ = std::move(upper);
  out.ValidateBounds();
  return out;
}

MilpInstance MilpInstance::WithName(std::string name) const {
  MilpInstance out = *this;
  out.name_ = std::move(name);
  return out;
}

MilpData MilpInstance::ToData() const {
  MilpData d;
  d.name = name_;
  d.num_vars = n();
  d.rows.resize(m());
  for (int j = 0; j < m(); ++j) {
    RowView r = row(j);
    d.rows[j].cols.assign(r.cols.begin(), r.cols.end());
    d.rows[j].vals.assign(r.vals.begin(), r.vals.end());
  }
  d.sense = sense_;
  d.rhs = rhs_;
  d.obj = obj_;
  d.lower = lower_;
  d.upper = upper_;
  d.is_integer.assign(is_integer_.begin(), is_integer_.end());
  return d;
}

bool operator==(const MilpInstance& a, const MilpInstance& b) {
  if (a.name_ != b.name_ || a.sense_ != b.sense_ || a.rhs_ != b.rhs_ ||
      a.obj_ != b.obj_ || a.lower_ != b.lower_ || a.upper_ != b.upper_ ||
      a.is_integer_ != b.is_integer_) {
    return false;
  }
  if (a.matrix_ == b.matrix_) return true;
  const SparseMatrix& x = *a.matrix_;
  const SparseMatrix& y = *b.matrix_;
  return x.num_rows == y.num_rows && x.num_cols == y.num_cols &&
         x.row_start == y.row_start && x.col_index == y.col_index &&
         x.row_value == y.row_value;
}

Solution Solution::Of(const MilpInstance& model, std::vector<double> x) {
  const double obj = EvaluateObjective(model, x);
  return Solution{std::move(x), obj};
}

double EvaluateObjective(const MilpInstance& model, std::span<const double> x) {
  CheckLength(x.size(), model.n(), "solution");
  double sum = 0.0;
  std::span<const double> c = model.obj();
  for (std::size_t i = 0; i < x.size(); ++i) sum += c[i] * x[i];
  return sum;
}

std::vector<double> RowActivities(const MilpInstance& model,
                                  std::span<const double> x) {
  CheckLength(x.size(), model.n(), "solution");
  std::vector<double> act(model.m(), 0.0);
  for (int j = 0; j < model.m(); ++j) {
    RowView r = model.row(j);
    double s = 0.0;
    for (int k = 0; k < r.size(); ++k) s += r.vals[k] * x[r.cols[k]];
    act[j] = s;
  }
  return act;
}

FeasibilityReport CheckFeasibility(const MilpInstance& model,
                                   std::span<const double> x, double tol) {
  if (!(tol >= 0.0)) throw ContractError("tolerance must be nonnegative");
  const std::vector<double> act = RowActivities(model, x);
  FeasibilityReport rep;
  auto record = [&](Violation::Kind kind, int index, double amount) {
    rep.max_violation = std::max(rep.max_violation, amount);
    if (amount > tol) {
      rep.feasible = false;
      rep.violations.push_back({kind, index, amount});
    }
  };
  std::span<const double> b = model.rhs();
  for (int j = 0; j < model.m(); ++j) {
    double v = 0.0;
    switch (model.sense(j)) {
      case Sense::kLe:
        v = act[j] - b[j];
        break;
      case Sense::kGe:
        v = b[j] - act[j];
        break;
      case Sense::kEq:
        v = std::abs(act[j] - b[j]);
        break;
    }
    if (v > 0.0) record(Violation::Kind::kRow, j, v);
  }
  for (int i = 0; i < model.n(); ++i) {
    const double lo = model.lower()[i] - x[i];
    const double up = x[i] - model.upper()[i];
    if (lo > 0.0) record(Violation::Kind::kLower, i, lo);
    if (up > 0.0) record(Violation::Kind::kUpper, i, up);
    if (model.is_integer(i)) {
      const double frac = std::abs(x[i] - std::round(x[i]));
      if (frac > 0.0) record(Violation::Kind::kIntegrality, i, frac);
    }
  }
  return rep;
}

BipartiteGraph ToBipartiteGraph(const MilpInstance& model) {
  BipartiteGraph g;
  g.n_var = model.n();
  g.n_con = model.m();
  g.var_degree.assign(g.n_var, 0);
  g.con_degree.assign(g.n_con, 0);
  g.edges.reserve(model.nnz());
  for (int j = 0; j < model.m(); ++j) {
    RowView r = model.row(j);
    for (int k = 0; k < r.size(); ++k) {
      g.edges.push_back({r.cols[k], j, r.vals[k]});
      ++g.var_degree[r.cols[k]];
    }
    g.con_degree[j] = r.size();
  }
  return g;
}

}  // namespace tlns
