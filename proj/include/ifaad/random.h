/*
 * Copyright 2026 The ifaad Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Seeded random draws with fully specified mappings from engine output to
// values, so that a stream can be replayed outside the library (the
// distributions in <random> are implementation-defined).

#ifndef IFAAD_RANDOM_H_
#define IFAAD_RANDOM_H_

#include <cmath>
#include <cstdint>
#include <random>

namespace ifaad {

using RandomEngine = std::mt19937_64;

// Engine for an independent stream identified by (seed, stream).
inline RandomEngine MakeEngine(uint64_t seed, uint64_t stream) {
  std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                    static_cast<uint32_t>(stream),
                    static_cast<uint32_t>(stream >> 32)};
  return RandomEngine(seq);
}

// Uniform in [0, 1) with 53 random bits.
inline double UniformUnit(RandomEngine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n). Rejection sampling keeps it exactly uniform.
inline uint64_t UniformIndex(RandomEngine& rng, uint64_t n) {
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t draw = rng();
  while (draw >= limit) draw = rng();
  return draw % n;
}

// Standard normal via Box-Muller; consumes two draws.
inline double StandardNormal(RandomEngine& rng) {
  const double u1 = 1.0 - UniformUnit(rng);  // (0, 1]
  const double u2 = UniformUnit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace ifaad

#endif  // IFAAD_RANDOM_H_
