// Copyright 2026 The asymforge Authors
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

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace asymforge {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Engine for stream `stream` of seed `seed`. Streams of one seed are
/// statistically independent, so instance i of a batch can be generated on
/// any thread without coordination.
inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream = 0) {
    const std::uint64_t a = mix64(seed);
    const std::uint64_t b = mix64(a ^ mix64(stream + 0x632BE59BD9B4E019ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return std::mt19937_64(seq);
}

/// Uniform in [0, 1) from the top 53 bits; identical on every platform.
inline double uniform01(std::mt19937_64& engine) {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller (platform independent, unlike
/// std::normal_distribution).
inline double standard_normal(std::mt19937_64& engine) {
    double u1 = uniform01(engine);
    while (u1 <= 0.0) u1 = uniform01(engine);
    const double u2 = uniform01(engine);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Complex Gaussian with independent N(0, 1) real and imaginary parts.
inline std::complex<double> complex_normal(std::mt19937_64& engine) {
    const double re = standard_normal(engine);
    const double im = standard_normal(engine);
    return {re, im};
}

}  // namespace asymforge
