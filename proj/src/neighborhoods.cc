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

#include "tlns/neighborhoods.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "tlns/errors.h"

namespace tlns {
namespace {

void CheckUnfixCount(const MilpInstance& model, int r) {
  if (r < 0 || r > model.num_integer()) {
    throw ContractError("neighborhood size " + std::to_string(r) +
                        " outside [0, " + std::to_string(model.num_integer()) +
                        "]");
  }
}

// Fenwick tree over nonnegative weights supporting point updates and
// inverse prefix-sum search.
class WeightTree {
 public:
  explicit WeightTree(std::span<const double> w) : n_(w.size()), tree_(w.size() + 1, 0.0) {
    for (std::size_t i = 0; i < n_; ++i) {
      tree_[i + 1] += w[i];
      const std::size_t parent = (i + 1) + ((i + 1) & (~(i + 1) + 1));
      if (parent <= n_) tree_[parent] += tree_[i + 1];
    }
  }

  void Add(std::size_t i, double delta) {
    for (std::size_t k = i + 1; k <= n_; k += k & (~k + 1)) tree_[k] += delta;
  }

  double Total() const {
    double s = 0.0;
    for (std::size_t k = n_; k > 0; k -= k & (~k + 1)) s += tree_[k];
    return s;
  }

  // Smallest index whose inclusive prefix sum exceeds `target`.
  std::size_t Find(double target) const {
    std::size_t pos = 0;
    std::size_t step = 1;
    while (step * 2 <= n_) step *= 2;
    for (; step > 0; step /= 2) {
      if (pos + step <= n_ && tree_[pos + step] <= target) {
        pos += step;
        target -= tree_[pos];
      }
    }
    return std::min(pos, n_ - 1);
  }

 private:
  std::size_t n_;
  std::vector<double> tree_;
};

}  // namespace

FixingSet FixingSet::Of(const MilpInstance& model, std::vector<int> indices) {
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  for (int i : indices) {
    if (i < 0 || i >= model.n()) {
      throw ContractError("fixing index " + std::to_string(i) + " out of range");
    }
    if (!model.is_integer(i)) {
      throw ContractError("fixing index " + std::to_string(i) +
                          " is not an integer variable");
    }
  }
  FixingSet f;
  f.indices_ = std::move(indices);
  return f;
}

FixingSet FixingSet::Complement(const MilpInstance& model,
                                std::span<const int> unfixed) {
  std::vector<char> free(model.n(), 0);
  for (int i : unfixed) {
    if (i < 0 || i >= model.n()) {
      throw ContractError("unfixed index " + std::to_string(i) + " out of range");
    }
    free[i] = 1;
  }
  FixingSet f;
  f.indices_.reserve(model.num_integer());
  for (int i = 0; i < model.n(); ++i) {
    if (model.is_integer(i) && !free[i]) f.indices_.push_back(i);
  }
  return f;
}

MilpInstance BuildAuxiliary(const MilpInstance& model,
                            std::span<const double> incumbent,
                            const FixingSet& fixed) {
  if (static_cast<int>(incumbent.size()) != model.n()) {
    throw ContractError("incumbent length does not match the model");
  }
  std::vector<double> lo(model.lower().begin(), model.lower().end());
  std::vector<double> up(model.upper().begin(), model.upper().end());
  for (int i : fixed.indices()) {
    if (i < 0 || i >= model.n() || !model.is_integer(i)) {
      throw ContractError("fixing index " + std::to_string(i) +
                          " is not an integer variable");
    }
    lo[i] = up[i] = std::round(incumbent[i]);
  }
  return model.WithBounds(std::move(lo), std::move(up));
}

MilpInstance BuildLocalBranching(const MilpInstance& model,
                                 std::span<const double> incumbent, int k) {
  if (static_cast<int>(incumbent.size()) != model.n()) {
    throw ContractError("incumbent length does not match the model");
  }
  if (k < 0) throw ContractError("local branching radius must be >= 0");
  if (!model.IsBinaryProgram()) {
    throw UnsupportedModelError("local branching requires binary integer variables");
  }
  MilpData d = model.ToData();
  SparseRow ball;
  int ones = 0;
  for (int i = 0; i < model.n(); ++i) {
    if (!model.is_integer(i)) continue;
    ball.cols.push_back(i);
    if (std::round(incumbent[i]) == 1.0) {
      ball.vals.push_back(-1.0);
      ++ones;
    } else {
      ball.vals.push_back(1.0);
    }
  }
  d.rows.push_back(std::move(ball));
  d.sense.push_back(Sense::kLe);
  d.rhs.push_back(static_cast<double>(k - ones));
  d.name = model.name() + "-lb" + std::to_string(k);
  return MilpInstance(std::move(d));
}

FixingSet RandomUnfix(const MilpInstance& model, int r, Rng& rng) {
  CheckUnfixCount(model, r);
  const std::vector<int> ints = model.IntegerIndices();
  std::vector<int> picks = SampleWithoutReplacement(static_cast<int>(ints.size()), r, rng);
  for (int& p : picks) p = ints[p];
  return FixingSet::Complement(model, picks);
}

FixingSet ScoreUnfix(const MilpInstance& model, std::span<const double> scores,
                     int r, Rng& rng) {
  CheckUnfixCount(model, r);
  if (static_cast<int>(scores.size()) != model.n()) {
    throw ContractError("score vector length does not match the model");
  }
  const std::vector<int> ints = model.IntegerIndices();
  std::vector<double> w(ints.size());
  for (std::size_t k = 0; k < ints.size(); ++k) {
    const double s = scores[ints[k]];
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw ContractError("scores must be finite and nonnegative");
    }
    w[k] = s;
  }
  std::vector<int> picks;
  picks.reserve(r);
  std::vector<char> taken(ints.size(), 0);
  if (!ints.empty()) {
    WeightTree tree(w);
    int positive = static_cast<int>(std::count_if(w.begin(), w.end(), [](double v) { return v > 0.0; }));
    while (static_cast<int>(picks.size()) < r && positive > 0) {
      const double total = tree.Total();
      if (!(total > 0.0)) break;
      std::size_t k = tree.Find(rng.Uniform() * total);
      // Guard against landing on a zero-weight slot through rounding.
      while (taken[k] || w[k] <= 0.0) k = (k + 1) % ints.size();
      taken[k] = 1;
      tree.Add(k, -w[k]);
      --positive;
      picks.push_back(ints[k]);
    }
  }
  if (static_cast<int>(picks.size()) < r) {
    std::vector<int> rest;
    for (std::size_t k = 0; k < ints.size(); ++k) {
      if (!taken[k]) rest.push_back(ints[k]);
    }
    const int need = r - static_cast<int>(picks.size());
    for (int p : SampleWithoutReplacement(static_cast<int>(rest.size()), need, rng)) {
      picks.push_back(rest[p]);
    }
  }
  return FixingSet::Complement(model, picks);
}

Fixer RandomFixer() {
  return [](const MilpInstance& model, const Solution&, int r, Rng& rng) {
    return RandomUnfix(model, r, rng);
  };
}

}  // namespace tlns
