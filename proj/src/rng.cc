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

#include "tlns/rng.h"

#include <numeric>
#include <utility>

#include "tlns/errors.h"

namespace tlns {

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : key_(Mix64(seed ^ Mix64(stream + kGamma))) {}

std::uint64_t Rng::Mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t Rng::Below(std::uint64_t n) {
  if (n == 0) throw ContractError("Rng::Below: empty range");
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = Next();
    if (r >= threshold) return r % n;
  }
}

int Rng::UniformInt(int lo, int hi) {
  if (hi < lo) throw ContractError("Rng::UniformInt: empty range");
  return lo + static_cast<int>(Below(static_cast<std::uint64_t>(hi) - lo + 1));
}

Rng Rng::Split(std::uint64_t id) const {
  return Rng(FromKey{}, Mix64(key_ ^ Mix64(id + kGamma)));
}

std::vector<int> SampleWithoutReplacement(int n, int k, Rng& rng) {
  if (k < 0 || k > n) throw ContractError("sample size out of range");
  std::vector<int> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(rng.Below(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace tlns
