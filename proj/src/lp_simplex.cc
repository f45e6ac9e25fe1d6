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

#include "tlns/lp_simplex.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tlns/errors.h"

namespace tlns {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kZeroStep = 1e-12;
constexpr int kCheckEvery = 512;
constexpr int kMaxRestarts = 3;
constexpr int kMaxVerifications = 5;
using State = LpBasis::State;

// One product-form update: the new inverse is E * old inverse, where E is the
// identity except column `row`, which holds -alpha_i / pivot off the
// diagonal and 1 / pivot on it.
struct Eta {
  int row;
  double pivot;
  std::vector<int> index;
  std::vector<double> alpha;
};

class Simplex {
 public:
  Simplex(const MilpInstance& model, std::span<const double> lower,
          std::span<const double> upper, const LpOptions& options)
      : model_(model),
        options_(options),
        n_(model.n()),
        m_(model.m()),
        lo_(n_ + m_),
        up_(n_ + m_),
        cost_(n_ + m_, 0.0),
        x_(n_ + m_, 0.0),
        state_(n_ + m_, State::kAtLower) {
    for (int j = 0; j < n_; ++j) {
      lo_[j] = lower[j];
      up_[j] = upper[j];
      cost_[j] = model.obj()[j];
    }
    for (int i = 0; i < m_; ++i) {
      const double b = model.rhs()[i];
      switch (model.sense(i)) {
        case Sense::kLe:
          lo_[n_ + i] = -kInf;
          up_[n_ + i] = b;
          break;
        case Sense::kGe:
          lo_[n_ + i] = b;
          up_[n_ + i] = kInf;
          break;
        case Sense::kEq:
          lo_[n_ + i] = b;
          up_[n_ + i] = b;
          break;
      }
    }
  }

  LpResult Run();

 private:
  template <typename F>
  void ForColumn(int j, F&& f) const {
    if (j < n_) {
      ColView c = model_.col(j);
      for (int k = 0; k < c.size(); ++k) f(c.rows[k], c.vals[k]);
    } else {
      f(j - n_, -1.0);
    }
  }

  double ColumnDot(int j, const Eigen::VectorXd& y) const {
    if (j >= n_) return -y[j - n_];
    ColView c = model_.col(j);
    double s = 0.0;
    for (int k = 0; k < c.size(); ++k) s += c.vals[k] * y[c.rows[k]];
    return s;
  }

  enum class DualOutcome { kOptimal, kInfeasible, kAbandoned, kStopped };

  void ColdBasis();
  bool LoadWarmBasis(const LpBasis& basis);
  void ReducedCosts(Eigen::VectorXd& y, std::vector<double>& d) const;
  DualOutcome DualPhase(int& iter);
  void Pivot(int leave, int entering, const Eigen::VectorXd& alpha);
  void SanitizeNonbasic(int j);
  bool Factorize();
  void FactorizeOrRestart();
  void ComputeBasicValues();
  void Ftran(Eigen::VectorXd& v) const;
  void Btran(Eigen::VectorXd& v) const;
  double BasicInfeasibility(int i) const;
  bool Stopped() const;
  LpResult Finish(LpStatus status, int iterations) const;
  LpResult SolveWithoutRows() const;

  const MilpInstance& model_;
  const LpOptions& options_;
  const int n_;
  const int m_;
  std::vector<double> lo_;
  std::vector<double> up_;
  std::vector<double> cost_;
  std::vector<double> x_;
  std::vector<State> state_;
  std::vector<int> head_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  std::vector<Eta> etas_;
  int restarts_ = 0;
};

void Simplex::SanitizeNonbasic(int j) {
  if (state_[j] == State::kAtLower && !std::isfinite(lo_[j])) {
    state_[j] = State::kAtUpper;
  } else if (state_[j] == State::kAtUpper && !std::isfinite(up_[j])) {
    state_[j] = State::kAtLower;
  }
}

void Simplex::ColdBasis() {
  head_.resize(m_);
  for (int j = 0; j < n_; ++j) {
    if (state_[j] == State::kBasic) state_[j] = State::kAtLower;
  }
  for (int i = 0; i < m_; ++i) {
    head_[i] = n_ + i;
    state_[n_ + i] = State::kBasic;
  }
}

bool Simplex::LoadWarmBasis(const LpBasis& basis) {
  if (static_cast<int>(basis.head.size()) != m_ ||
      static_cast<int>(basis.state.size()) != n_ + m_) {
    return false;
  }
  int basic = 0;
  for (int j = 0; j < n_ + m_; ++j) basic += basis.state[j] == State::kBasic;
  if (basic != m_) return false;
  for (int i = 0; i < m_; ++i) {
    const int j = basis.head[i];
    if (j < 0 || j >= n_ + m_ || basis.state[j] != State::kBasic) return false;
  }
  head_ = basis.head;
  state_ = basis.state;
  for (int j = 0; j < n_ + m_; ++j) {
    if (state_[j] != State::kBasic) SanitizeNonbasic(j);
  }
  return true;
}

bool Simplex::Factorize() {
  etas_.clear();
  if (m_ == 0) return true;
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m_, m_);
  for (int k = 0; k < m_; ++k) {
    ForColumn(head_[k], [&](int row, double v) { b(row, k) = v; });
  }
  lu_.compute(b);
  const auto diag = lu_.matrixLU().diagonal().cwiseAbs();
  const double largest = std::max(1.0, diag.maxCoeff());
  return diag.minCoeff() > 1e-11 * largest;
}

// A singular basis is replaced by the all-logical basis, which is always
// nonsingular; repeated failures indicate a numerically broken model.
void Simplex::FactorizeOrRestart() {
  if (Factorize()) return;
  if (++restarts_ > kMaxRestarts) {
    throw NumericalError("simplex: basis remains singular after refactorization");
  }
  for (int j = 0; j < n_; ++j) {
    if (state_[j] != State::kBasic) continue;
    state_[j] = (x_[j] - lo_[j] <= up_[j] - x_[j]) ? State::kAtLower
                                                   : State::kAtUpper;
  }
  ColdBasis();
  if (!Factorize()) throw NumericalError("simplex: logical basis is singular");
}

void Simplex::ComputeBasicValues() {
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
  for (int j = 0; j < n_ + m_; ++j) {
    if (state_[j] == State::kBasic) continue;
    x_[j] = state_[j] == State::kAtLower ? lo_[j] : up_[j];
    if (x_[j] != 0.0) {
      const double xj = x_[j];
      ForColumn(j, [&](int row, double v) { rhs[row] -= v * xj; });
    }
  }
  Ftran(rhs);
  for (int i = 0; i < m_; ++i) x_[head_[i]] = rhs[i];
}

void Simplex::Ftran(Eigen::VectorXd& v) const {
  if (m_ == 0) return;
  v = lu_.solve(v);
  for (const Eta& e : etas_) {
    const double vr = v[e.row] / e.pivot;
    if (vr != 0.0) {
      for (std::size_t k = 0; k < e.index.size(); ++k) {
        v[e.index[k]] -= e.alpha[k] * vr;
      }
    }
    v[e.row] = vr;
  }
}

void Simplex::Btran(Eigen::VectorXd& v) const {
  if (m_ == 0) return;
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double s = v[it->row];
    for (std::size_t k = 0; k < it->index.size(); ++k) {
      s -= v[it->index[k]] * it->alpha[k];
    }
    v[it->row] = s / it->pivot;
  }
  const Eigen::MatrixXd& f = lu_.matrixLU();
  f.triangularView<Eigen::Upper>().transpose().solveInPlace(v);
  f.triangularView<Eigen::UnitLower>().transpose().solveInPlace(v);
  v = lu_.permutationP().transpose() * v;
}

// Signed violation of the basic variable in row i: negative below the lower
// bound, positive above the upper bound, zero inside.
double Simplex::BasicInfeasibility(int i) const {
  const int j = head_[i];
  if (x_[j] < lo_[j] - options_.feasibility_tol) return x_[j] - lo_[j];
  if (x_[j] > up_[j] + options_.feasibility_tol) return x_[j] - up_[j];
  return 0.0;
}

bool Simplex::Stopped() const {
  if (options_.stop != nullptr && options_.stop->load(std::memory_order_relaxed)) {
    return true;
  }
  return options_.deadline.has_value() &&
         std::chrono::steady_clock::now() >= *options_.deadline;
}

LpResult Simplex::Finish(LpStatus status, int iterations) const {
  LpResult r;
  r.status = status;
  r.iterations = iterations;
  r.x.assign(x_.begin(), x_.begin() + n_);
  r.objective = 0.0;
  for (int j = 0; j < n_; ++j) r.objective += cost_[j] * x_[j];
  r.basis = head_;
  r.final_basis.head = head_;
  r.final_basis.state = state_;
  return r;
}

LpResult Simplex::SolveWithoutRows() const {
  LpResult r;
  r.status = LpStatus::kOptimal;
  r.x.resize(n_);
  r.final_basis.state.resize(n_);
  for (int j = 0; j < n_; ++j) {
    const bool upper = cost_[j] < 0.0;
    r.x[j] = upper ? up_[j] : lo_[j];
    r.final_basis.state[j] = upper ? State::kAtUpper : State::kAtLower;
    r.objective += cost_[j] * r.x[j];
  }
  return r;
}

LpResult Simplex::Run() {
  for (int j = 0; j < n_; ++j) {
    if (lo_[j] > up_[j]) return Finish(LpStatus::kInfeasible, 0);
  }
  if (m_ == 0) return SolveWithoutRows();

  bool warm = options_.warm_start != nullptr && LoadWarmBasis(*options_.warm_start) &&
              Factorize();
  if (!warm) {
    for (int j = 0; j < n_ + m_; ++j) state_[j] = State::kAtLower;
    for (int j = 0; j < n_ + m_; ++j) SanitizeNonbasic(j);
    ColdBasis();
    if (!Factorize()) throw NumericalError("simplex: logical basis is singular");
  }
  ComputeBasicValues();

  int iter = 0;
  if (warm) {
    switch (DualPhase(iter)) {
      case DualOutcome::kInfeasible:
        return Finish(LpStatus::kInfeasible, iter);
      case DualOutcome::kStopped:
        return Finish(LpStatus::kStopped, iter);
      case DualOutcome::kOptimal:
      case DualOutcome::kAbandoned:
        break;
    }
  }

  Eigen::VectorXd y(m_);
  Eigen::VectorXd alpha(m_);
  int degenerate_run = 0;
  bool bland = false;
  int verifications = 0;

  for (;; ++iter) {
    if (iter > 0 && iter % kCheckEvery == 0 && Stopped()) {
      return Finish(LpStatus::kStopped, iter);
    }
    if (iter >= options_.iteration_limit) {
      return Finish(LpStatus::kIterationLimit, iter);
    }

    // Phase 1 prices the sum of infeasibilities, phase 2 the objective.
    bool phase_one = false;
    for (int i = 0; i < m_; ++i) {
      const double v = BasicInfeasibility(i);
      y[i] = v < 0.0 ? -1.0 : (v > 0.0 ? 1.0 : 0.0);
      phase_one |= v != 0.0;
    }
    if (!phase_one) {
      for (int i = 0; i < m_; ++i) y[i] = cost_[head_[i]];
    }
    Btran(y);

    int entering = -1;
    double best_score = 0.0;
    for (int j = 0; j < n_ + m_; ++j) {
      if (state_[j] == State::kBasic || lo_[j] == up_[j]) continue;
      const double d = (phase_one ? 0.0 : cost_[j]) - ColumnDot(j, y);
      const bool eligible =
          (state_[j] == State::kAtLower && d < -options_.optimality_tol) ||
          (state_[j] == State::kAtUpper && d > options_.optimality_tol);
      if (!eligible) continue;
      if (bland) {
        entering = j;
        break;
      }
      if (std::abs(d) > best_score) {
        best_score = std::abs(d);
        entering = j;
      }
    }

    if (entering < 0) {
      if (phase_one) return Finish(LpStatus::kInfeasible, iter);
      // Confirm optimality on a fresh factorization.
      if (etas_.empty() || verifications >= kMaxVerifications) {
        return Finish(LpStatus::kOptimal, iter);
      }
      ++verifications;
      FactorizeOrRestart();
      ComputeBasicValues();
      continue;
    }

    alpha.setZero();
    ForColumn(entering, [&](int row, double v) { alpha[row] = v; });
    Ftran(alpha);
    const double sigma = state_[entering] == State::kAtLower ? 1.0 : -1.0;

    // Ratio test. x_B moves by -sigma * t * alpha.
    double step = up_[entering] - lo_[entering];
    int leave = -1;
    bool leave_to_upper = false;
    double leave_pivot = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double a = alpha[i];
      if (std::abs(a) <= options_.pivot_tol) continue;
      const double rate = -sigma * a;
      const int j = head_[i];
      const double xv = x_[j];
      double limit;
      bool to_upper;
      if (rate < 0.0) {
        if (xv > up_[j] + options_.feasibility_tol) {
          limit = (xv - up_[j]) / -rate;
          to_upper = true;
        } else if (xv < lo_[j] - options_.feasibility_tol || !std::isfinite(lo_[j])) {
          continue;
        } else {
          limit = std::max(0.0, xv - lo_[j]) / -rate;
          to_upper = false;
        }
      } else {
        if (xv < lo_[j] - options_.feasibility_tol) {
          limit = (lo_[j] - xv) / rate;
          to_upper = false;
        } else if (xv > up_[j] + options_.feasibility_tol || !std::isfinite(up_[j])) {
          continue;
        } else {
          limit = std::max(0.0, up_[j] - xv) / rate;
          to_upper = true;
        }
      }
      bool take;
      if (leave < 0) {
        take = limit < step;  // ties with the bound flip keep the flip
      } else if (limit < step - kZeroStep) {
        take = true;
      } else if (limit <= step + kZeroStep) {
        take = bland ? j < head_[leave] : std::abs(a) > std::abs(leave_pivot);
      } else {
        take = false;
      }
      if (take) {
        step = limit;
        leave = i;
        leave_to_upper = to_upper;
        leave_pivot = a;
      }
    }

    if (leave < 0 && !std::isfinite(step)) {
      if (phase_one) {
        throw NumericalError("simplex: unbounded ray while minimizing infeasibility");
      }
      return Finish(LpStatus::kUnbounded, iter);
    }

    if (step <= kZeroStep) {
      if (++degenerate_run >= options_.degenerate_limit) bland = true;
    } else {
      degenerate_run = 0;
      bland = false;
    }

    const double delta = sigma * step;
    if (delta != 0.0) {
      x_[entering] += delta;
      for (int i = 0; i < m_; ++i) x_[head_[i]] -= delta * alpha[i];
    }

    if (leave < 0) {
      // Entering variable reaches its opposite bound; basis unchanged.
      state_[entering] = sigma > 0 ? State::kAtUpper : State::kAtLower;
      x_[entering] = sigma > 0 ? up_[entering] : lo_[entering];
      continue;
    }

    const int leaving = head_[leave];
    state_[leaving] = leave_to_upper ? State::kAtUpper : State::kAtLower;
    x_[leaving] = leave_to_upper ? up_[leaving] : lo_[leaving];
    Pivot(leave, entering, alpha);
  }
}

void Simplex::Pivot(int leave, int entering, const Eigen::VectorXd& alpha) {
  state_[entering] = State::kBasic;
  head_[leave] = entering;
  Eta eta{leave, alpha[leave], {}, {}};
  for (int i = 0; i < m_; ++i) {
    if (i != leave && alpha[i] != 0.0) {
      eta.index.push_back(i);
      eta.alpha.push_back(alpha[i]);
    }
  }
  etas_.push_back(std::move(eta));
  if (static_cast<int>(etas_.size()) >= options_.refactor_interval) {
    FactorizeOrRestart();
    ComputeBasicValues();
  }
}

void Simplex::ReducedCosts(Eigen::VectorXd& y, std::vector<double>& d) const {
  for (int i = 0; i < m_; ++i) y[i] = cost_[head_[i]];
  Btran(y);
  for (int j = 0; j < n_ + m_; ++j) {
    d[j] = state_[j] == State::kBasic ? 0.0 : cost_[j] - ColumnDot(j, y);
  }
}

// Dual simplex from a restarted basis. After bound changes the previous
// optimal basis is still dual feasible once boxed variables with a wrong
// reduced-cost sign are moved to their other bound.
Simplex::DualOutcome Simplex::DualPhase(int& iter) {
  Eigen::VectorXd y(m_);
  Eigen::VectorXd rho(m_);
  Eigen::VectorXd alpha(m_);
  std::vector<double> d(n_ + m_);
  ReducedCosts(y, d);
  bool flipped = false;
  for (int j = 0; j < n_ + m_; ++j) {
    if (state_[j] == State::kBasic || lo_[j] == up_[j]) continue;
    if (state_[j] == State::kAtLower && d[j] < -options_.optimality_tol) {
      if (!std::isfinite(up_[j])) return DualOutcome::kAbandoned;
      state_[j] = State::kAtUpper;
      flipped = true;
    } else if (state_[j] == State::kAtUpper && d[j] > options_.optimality_tol) {
      if (!std::isfinite(lo_[j])) return DualOutcome::kAbandoned;
      state_[j] = State::kAtLower;
      flipped = true;
    }
  }
  if (flipped) ComputeBasicValues();

  const int budget = iter + 10 * (n_ + m_) + 100;
  for (;; ++iter) {
    if (iter > 0 && iter % kCheckEvery == 0 && Stopped()) return DualOutcome::kStopped;
    if (iter >= options_.iteration_limit || iter >= budget) return DualOutcome::kAbandoned;

    int r = -1;
    double worst = options_.feasibility_tol;
    for (int i = 0; i < m_; ++i) {
      const double v = std::abs(BasicInfeasibility(i));
      if (v > worst) {
        worst = v;
        r = i;
      }
    }
    if (r < 0) return DualOutcome::kOptimal;
    const bool below = BasicInfeasibility(r) < 0.0;

    if (iter > 0) ReducedCosts(y, d);
    rho.setZero();
    rho[r] = 1.0;
    Btran(rho);

    int entering = -1;
    double best_ratio = kInf;
    double best_alpha = 0.0;
    for (int j = 0; j < n_ + m_; ++j) {
      if (state_[j] == State::kBasic || lo_[j] == up_[j]) continue;
      const double a = ColumnDot(j, rho);
      if (std::abs(a) <= options_.pivot_tol) continue;
      const bool at_lower = state_[j] == State::kAtLower;
      const bool eligible = below ? (at_lower ? a < 0.0 : a > 0.0)
                                  : (at_lower ? a > 0.0 : a < 0.0);
      if (!eligible) continue;
      const double ratio = std::max(0.0, at_lower ? d[j] : -d[j]) / std::abs(a);
      if (ratio < best_ratio - kZeroStep ||
          (ratio <= best_ratio + kZeroStep && std::abs(a) > std::abs(best_alpha))) {
        best_ratio = ratio;
        best_alpha = a;
        entering = j;
      }
    }
    if (entering < 0) return DualOutcome::kInfeasible;

    alpha.setZero();
    ForColumn(entering, [&](int row, double v) { alpha[row] = v; });
    Ftran(alpha);
    if (std::abs(alpha[r]) <= options_.pivot_tol) return DualOutcome::kAbandoned;
    const int leaving = head_[r];
    const double target = below ? lo_[leaving] : up_[leaving];
    const double theta = (x_[leaving] - target) / alpha[r];
    x_[entering] += theta;
    for (int i = 0; i < m_; ++i) x_[head_[i]] -= theta * alpha[i];
    x_[leaving] = target;
    state_[leaving] = below ? State::kAtLower : State::kAtUpper;
    Pivot(r, entering, alpha);
  }
}

}  // namespace

const char* LpStatusName(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "Optimal";
    case LpStatus::kInfeasible:
      return "Infeasible";
    case LpStatus::kUnbounded:
      return "Unbounded";
    case LpStatus::kIterationLimit:
      return "IterationLimit";
    case LpStatus::kStopped:
      return "Stopped";
  }
  return "?";
}

LpResult SolveLp(const MilpInstance& model, std::span<const double> lower,
                 std::span<const double> upper, const LpOptions& options) {
  if (static_cast<int>(lower.size()) != model.n() ||
      static_cast<int>(upper.size()) != model.n()) {
    throw ContractError("SolveLp: bound vectors must have length n");
  }
  Simplex simplex(model, lower, upper, options);
  return simplex.Run();
}

LpResult SolveLp(const MilpInstance& model,
                 std::span<const BoundOverride> overrides,
                 const LpOptions& options) {
  std::vector<double> lo(model.lower().begin(), model.lower().end());
  std::vector<double> up(model.upper().begin(), model.upper().end());
  for (const BoundOverride& o : overrides) {
    if (o.index < 0 || o.index >= model.n()) {
      throw ContractError("bound override index " + std::to_string(o.index) +
                          " out of range");
    }
    if (!(o.lower <= o.upper)) {
      throw ContractError("bound override for variable " +
                          std::to_string(o.index) + " has lower > upper");
    }
    lo[o.index] = o.lower;
    up[o.index] = o.upper;
  }
  return SolveLp(model, lo, up, options);
}

}  // namespace tlns
