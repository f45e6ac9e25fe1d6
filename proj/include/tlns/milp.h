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

// Core MILP data model:
//
//   min c'x  s.t.  a_j x (<=|>=|=) b_j   for every row j,
//                  l <= x <= u,  x_i integral where is_integer[i].
//
// A MilpInstance is immutable once built. The coefficient matrix is held
// behind a shared pointer so that bound-only variants (fixings, branching)
// are cheap to create and share the same rows.

#ifndef TLNS_MILP_H_
#define TLNS_MILP_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace tlns {

inline constexpr double kFeasibilityTol = 1e-6;

enum class Sense : std::int8_t { kLe, kGe, kEq };

const char* SenseName(Sense sense);

struct SparseRow {
  std::vector<int> cols;
  std::vector<double> vals;
};

// Plain field bundle used to build an instance.
struct MilpData {
  std::string name;
  int num_vars = 0;
  std::vector<SparseRow> rows;
  std::vector<Sense> sense;
  std::vector<double> rhs;
  std::vector<double> obj;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<bool> is_integer;
};

// Compressed row + column storage of the constraint matrix.
struct SparseMatrix {
  int num_rows = 0;
  int num_cols = 0;
  std::vector<int> row_start;  // num_rows + 1
  std::vector<int> col_index;
  std::vector<double> row_value;
  std::vector<int> col_start;  // num_cols + 1
  std::vector<int> row_index;
  std::vector<double> col_value;

  int nnz() const { return static_cast<int>(col_index.size()); }
};

struct RowView {
  std::span<const int> cols;
  std::span<const double> vals;
  int size() const { return static_cast<int>(cols.size()); }
};

struct ColView {
  std::span<const int> rows;
  std::span<const double> vals;
  int size() const { return static_cast<int>(rows.size()); }
};

class MilpInstance {
 public:
  MilpInstance();
  // Validates every invariant and throws ContractError on violation.
  // Explicit zero coefficients are dropped and each row is sorted by column.
  explicit MilpInstance(MilpData data);

  int n() const { return matrix_->num_cols; }
  int m() const { return matrix_->num_rows; }
  int nnz() const { return matrix_->nnz(); }
  const std::string& name() const { return name_; }

  RowView row(int j) const;
  ColView col(int i) const;
  const SparseMatrix& matrix() const { return *matrix_; }

  Sense sense(int j) const { return sense_[j]; }
  std::span<const Sense> senses() const { return sense_; }
  std::span<const double> rhs() const { return rhs_; }
  std::span<const double> obj() const { return obj_; }
  std::span<const double> lower() const { return lower_; }
  std::span<const double> upper() const { return upper_; }
  bool is_integer(int i) const { return is_integer_[i] != 0; }
  // Number of integer variables (q).
  int num_integer() const { return num_integer_; }
  // Indices of integer variables in increasing order.
  std::vector<int> IntegerIndices() const;
  // True when every integer variable has bounds inside {0, 1} or is fixed.
  bool IsBinaryProgram() const;

  // Copy sharing the matrix, with replaced bounds. Validates the bounds.
  MilpInstance WithBounds(std::vector<double> lower,
                          std::vector<double> upper) const;
  MilpInstance WithName(std::string name) const;

  // Field-by-field export (rows in the stored, sorted order).
  MilpData ToData() const;

  friend bool operator==(const MilpInstance& a, const MilpInstance& b);

 private:
  void ValidateBounds() const;

  std::string name_;
  std::shared_ptr<const SparseMatrix> matrix_;
  std::vector<Sense> sense_;
  std::vector<double> rhs_;
  std::vector<double> obj_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<std::uint8_t> is_integer_;
  int num_integer_ = 0;
};

// Dense assignment with its cached objective value.
struct Solution {
  std::vector<double> x;
  double objective = 0.0;

  static Solution Of(const MilpInstance& model, std::vector<double> x);
  friend bool operator==(const Solution&, const Solution&) = default;
};

// c'x accumulated in index order. Throws ContractError on length mismatch.
double EvaluateObjective(const MilpInstance& model, std::span<const double> x);

struct Violation {
  enum class Kind : std::int8_t { kRow, kLower, kUpper, kIntegrality };
  Kind kind;
  int index;
  double amount;
};

struct FeasibilityReport {
  bool feasible = true;
  double max_violation = 0.0;
  std::vector<Violation> violations;
};

// Row activities a_j x in row order.
std::vector<double> RowActivities(const MilpInstance& model,
                                  std::span<const double> x);

FeasibilityReport CheckFeasibility(const MilpInstance& model,
                                   std::span<const double> x,
                                   double tol = kFeasibilityTol);

inline bool IsFeasible(const MilpInstance& model, std::span<const double> x,
                       double tol = kFeasibilityTol) {
  return CheckFeasibility(model, x, tol).feasible;
}

struct BipartiteEdge {
  int var;
  int con;
  double coef;
  friend bool operator==(const BipartiteEdge&, const BipartiteEdge&) = default;
};

// Variable-constraint graph: variable i and constraint j share an edge iff
// A_ji != 0. Edges are listed row by row.
struct BipartiteGraph {
  int n_var = 0;
  int n_con = 0;
  std::vector<BipartiteEdge> edges;
  std::vector<int> var_degree;
  std::vector<int> con_degree;
};

BipartiteGraph ToBipartiteGraph(const MilpInstance& model);

}  // namespace tlns

#endif  // TLNS_MILP_H_
