//
// Copyright 2026 The stablepac Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#pragma once

#include <cmath>
#include <cstdint>

namespace stablepac {

// SplitMix64 finalizer. Also used to derive per-run stream seeds, so adding
// runs never perturbs earlier runs.
constexpr uint64_t mix64(uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Counter-based stream derivation: a pure function of (master, index), so
// adding runs never perturbs earlier ones.
constexpr uint64_t stream_seed(uint64_t master, uint64_t index) {
  return mix64(master ^ mix64(index ^ 0xA5A5A5A5A5A5A5A5ULL));
}

// xoshiro256++ seeded through SplitMix64. Every experiment draws all of its
// randomness from one of these streams; replays are bit-identical.
class Rng {
 public:
  explicit Rng(uint64_t seed) {
    uint64_t z = seed;
    for (auto& word : state_) {
      z = mix64(z);
      word = z;
    }
  }

  static Rng stream(uint64_t master, uint64_t index) {
    return Rng(stream_seed(master, index));
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1), 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n), n >= 1. Fixed-point multiply; the O(2^-64)
  // bias is irrelevant at desk scale and keeps draws one-word deterministic.
  uint64_t next_below(uint64_t n) {
    return static_cast<uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  bool next_coin() { return (next_u64() >> 63) != 0; }

  // Laplace(scale) by inverse CDF on a single 64-bit uniform: u is mapped to
  // the open interval (0,1) as (w + 0.5) * 2^-53 with w the top 53 bits, so
  // neither tail can produce an infinity.
  double next_laplace(double scale) {
    const double u =
        (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    const double s = u - 0.5;
    const double mag = std::log1p(-2.0 * std::fabs(s));
    return s < 0 ? scale * mag : -scale * mag;
  }

 private:
  static constexpr uint64_t rotl(uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  uint64_t state_[4];
};

}  // namespace stablepac
