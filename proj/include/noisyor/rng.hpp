// Copyright 2026 The noisyor Authors.
//
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

#pragma once

#include <array>
#include <cstdint>

namespace noisyor {

/// Identifies one reproducible random stream: the same (master_seed,
/// stream_id, draw sequence) always yields the same samples, on any platform.
struct RngSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;
};

/// xoshiro256** with splitmix64 stream derivation. All draws are built from
/// unsigned 64-bit arithmetic only, so sequences are platform-independent
/// (std::uniform_* distributions are not, which rules them out here).
class Rng {
 public:
  Rng(std::uint64_t master_seed, std::uint64_t stream_id = 0)
      : Rng(RngSpec{master_seed, stream_id}) {}

  explicit Rng(RngSpec spec) {
    std::uint64_t a = spec.master_seed;
    std::uint64_t b = spec.stream_id ^ 0x6a09e667f3bcc909ull;
    for (auto& s : state_) s = splitmix64(a) ^ splitmix64(b);
    bool all_zero = true;
    for (auto s : state_) all_zero = all_zero && s == 0;
    if (all_zero) state_[0] = 0x9e3779b97f4a7c15ull;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return next_double() < p; }

  /// Uniform integer in [0, bound), bound >= 1. Unbiased via rejection.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    std::uint64_t r = next_u64();
    while (r < threshold) r = next_u64();
    return r % bound;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  static std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::array<std::uint64_t, 4> state_;
};

}  // namespace noisyor
