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

#ifndef TLNS_RNG_H_
#define TLNS_RNG_H_

#include <cstdint>
#include <vector>

namespace tlns {

// SplitMix64 run in counter mode.
//
// A stream is identified by a 64-bit key; the k-th output (k = 1, 2, ...) is
//
//   Mix64(key + k * 0x9E3779B97F4A7C15)
//
// where Mix64 is the SplitMix64 finalizer. The key of Rng(seed, stream) is
// Mix64(seed ^ Mix64(stream + 0x9E3779B97F4A7C15)), and Split(id) derives a
// child key the same way from the parent key. Outputs depend only on
// (key, counter), so streams can be reproduced in any language.
//
// Derived draws:
//   Uniform()  = (Next() >> 11) * 2^-53
//   Below(n)   = Next() % n, redrawing while Next() < (2^64 - n) % n
class Rng {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  explicit Rng(std::uint64_t seed = 0, std::uint64_t stream = 0);

  static std::uint64_t Mix64(std::uint64_t z);

  std::uint64_t Next() { return Mix64(key_ + (++counter_) * kGamma); }
  double Uniform() { return static_cast<double>(Next() >> 11) * 0x1.0p-53; }
  std::uint64_t Below(std::uint64_t n);
  // Uniform integer in [lo, hi].
  int UniformInt(int lo, int hi);
  bool Bernoulli(double p) { return Uniform() < p; }

  // Independent child stream; does not advance this stream.
  Rng Split(std::uint64_t id) const;

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  struct FromKey {};
  Rng(FromKey, std::uint64_t key) : key_(key) {}

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

// k distinct indices from [0, n), in draw order (partial Fisher-Yates).
std::vector<int> SampleWithoutReplacement(int n, int k, Rng& rng);

}  // namespace tlns

#endif  // TLNS_RNG_H_
