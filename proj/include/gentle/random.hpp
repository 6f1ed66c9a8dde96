// Copyright 2026 The Gentle Authors
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

#ifndef GENTLE_RANDOM_HPP_
#define GENTLE_RANDOM_HPP_

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <random>
#include <numbers>
#include <string_view>

#include <Eigen/Core>

namespace gentle {

// Anything that yields doubles in [0, 1). All sampling in the library goes
// through this so tests can drive branches with degenerate sources.
template <typename R>
concept UniformSource = requires(R& r) {
  { r.uniform01() } -> std::convertible_to<double>;
};

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Seeded 64-bit Mersenne Twister with a portable double conversion
// (std::uniform_real_distribution is not bit-stable across standard libraries).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  // Independent named sub-stream. Adding a consumer never perturbs the others.
  static RandomStream derive(std::uint64_t seed, std::string_view name) {
    return RandomStream(seed ^ fnv1a(name));
  }

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// Constant source, for exercising deterministic branches.
struct ConstantSource {
  double value = 0.0;
  double uniform01() const { return value; }
};

template <UniformSource R>
double uniform(R& rng, double lo, double hi) {
  return lo + (hi - lo) * rng.uniform01();
}

// Index in [0, n). Clamped so a source returning values at or near 1 stays in range.
template <UniformSource R>
std::size_t uniform_index(R& rng, std::size_t n) {
  auto i = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(n));
  return i < n ? i : n - 1;
}

// Uniform direction on the unit sphere (Archimedes' projection).
template <UniformSource R>
Eigen::Vector3d uniform_unit_vector(R& rng) {
  const double z = uniform(rng, -1.0, 1.0);
  const double phi = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {r * std::cos(phi), r * std::sin(phi), z};
}

}  // namespace gentle

#endif  // GENTLE_RANDOM_HPP_
