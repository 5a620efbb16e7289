// Copyright 2026 The qaef Authors
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

#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

namespace qaef {

/// Engine used for every stochastic step (shot sampling, trajectories,
/// random circuits). mt19937_64 output is fully specified by the standard,
/// so seeded runs reproduce across platforms as long as we do not route
/// through the implementation-defined std:: distributions.
using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent stream seed for sub-task `stream` (a signal time t, a
/// trajectory index, a repetition). Depends only on (seed, stream), so
/// results do not depend on evaluation order.
inline std::uint64_t derive_seed(std::uint64_t seed, std::int64_t stream) {
    return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(stream)));
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

/// Number of successes in `trials` Bernoulli(p) draws, drawn one by one.
inline std::int64_t binomial(Rng& rng, std::int64_t trials, double p) {
    if (trials < 0) throw std::invalid_argument("binomial: negative trial count");
    std::int64_t k = 0;
    for (std::int64_t i = 0; i < trials; ++i) k += bernoulli(rng, p) ? 1 : 0;
    return k;
}

/// Uniform integer in [0, n).
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: empty range");
    // Rejection sampling keeps the draw unbiased for any n.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r = rng();
    while (r >= limit) r = rng();
    return r % n;
}

}  // namespace qaef
