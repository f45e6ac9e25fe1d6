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

// Test-only reference computations. None of these call into the solver
// code paths they are used to check; they work from the raw MilpData.

#ifndef TLNS_TESTS_ORACLES_H_
#define TLNS_TESTS_ORACLES_H_

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "tlns/milp.h"

namespace tlns::oracle {

inline double Dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Dense copy of the constraint matrix.
inline std::vector<std::vector<double>> Dense(const MilpData& d) {
  std::vector<std::vector<double>> a(d.rows.size(),
                                     std::vector<double>(d.num_vars, 0.0));
  for (std::size_t j = 0; j < d.rows.size(); ++j) {
    for (std::size_t k = 0; k < d.rows[j].cols.size(); ++k) {
      a[j][d.rows[j].cols[k]] += d.rows[j].vals[k];
    }
  }
  return a;
}

inline bool RowsHold(const MilpData& d,
                     const std::vector<std::vector<double>>& dense,
                     const std::vector<double>& x, double tol) {
  for (std::size_t j = 0; j < dense.size(); ++j) {
    const double act = Dot(dense[j], x);
    switch (d.sense[j]) {
      case Sense::kLe:
        if (act > d.rhs[j] + tol) return false;
        break;
      case Sense::kGe:
        if (act < d.rhs[j] - tol) return false;
        break;
      case Sense::kEq:
        if (std::abs(act - d.rhs[j]) > tol) return false;
        break;
    }
  }
  return true;
}

struct BruteForceResult {
  double objective;
  std::vector<double> x;
};

// Exhaustive search over every integer point of a pure-integer model with
// small bound ranges. `accept` filters candidate points (used for balls).
template <typename Accept>
std::optional<BruteForceResult> BruteForce(const MilpInstance& model,
                                           Accept accept) {
  const MilpData d = model.ToData();
  const auto dense = Dense(d);
  const int n = d.num_vars;
  std::vector<double> x(d.lower);
  std::optional<BruteForceResult> best;
  for (;;) {
    if (accept(x) && RowsHold(d, dense, x, 1e-9)) {
      const double obj = Dot(d.obj, x);
      if (!best || obj < best->objective) best = BruteForceResult{obj, x};
    }
    int i = 0;
    while (i < n && x[i] >= d.upper[i]) {
      x[i] = d.lower[i];
      ++i;
    }
    if (i == n) break;
    x[i] += 1.0;
  }
  return best;
}

inline std::optional<BruteForceResult> BruteForce(const MilpInstance& model) {
  return BruteForce(model, [](const std::vector<double>&) { return true; });
}

inline int Hamming(const std::vector<double>& a, const std::vector<double>& b) {
  int h = 0;
  for (std::size_t i = 0; i < a.size(); ++i) h += std::abs(a[i] - b[i]) > 0.5;
  return h;
}

// LP optimum by enumerating every vertex: choose n active constraints among
// rows (as equalities) and variable bounds, solve, keep feasible points.
// Requires finite variable bounds (the feasible set is then a polytope).
inline std::optional<double> VertexEnumerationLp(const MilpInstance& model) {
  const MilpData d = model.ToData();
  const auto dense = Dense(d);
  const int n = d.num_vars;
  const int m = static_cast<int>(d.rows.size());
  // Candidate hyperplanes: m rows, n lower bounds, n upper bounds.
  const int total = m + 2 * n;
  std::vector<int> pick(n);
  for (int i = 0; i < n; ++i) pick[i] = i;
  std::optional<double> best;
  for (;;) {
    Eigen::MatrixXd a(n, n);
    Eigen::VectorXd rhs(n);
    for (int r = 0; r < n; ++r) {
      const int h = pick[r];
      a.row(r).setZero();
      if (h < m) {
        for (int c = 0; c < n; ++c) a(r, c) = dense[h][c];
        rhs[r] = d.rhs[h];
      } else if (h < m + n) {
        a(r, h - m) = 1.0;
        rhs[r] = d.lower[h - m];
      } else {
        a(r, h - m - n) = 1.0;
        rhs[r] = d.upper[h - m - n];
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (lu.isInvertible()) {
      Eigen::VectorXd sol = lu.solve(rhs);
      std::vector<double> x(sol.data(), sol.data() + n);
      bool ok = RowsHold(d, dense, x, 1e-9);
      for (int i = 0; ok && i < n; ++i) {
        ok = x[i] >= d.lower[i] - 1e-9 && x[i] <= d.upper[i] + 1e-9;
      }
      if (ok) {
        const double obj = Dot(d.obj, x);
        if (!best || obj < *best) best = obj;
      }
    }
    int k = n - 1;
    while (k >= 0 && pick[k] == total - n + k) --k;
    if (k < 0) break;
    ++pick[k];
    for (int r = k + 1; r < n; ++r) pick[r] = pick[r - 1] + 1;
  }
  return best;
}

}  // namespace tlns::oracle

#endif  // TLNS_TESTS_ORACLES_H_
