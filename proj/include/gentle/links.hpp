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

#ifndef GENTLE_LINKS_HPP_
#define GENTLE_LINKS_HPP_

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace gentle {

using Vec3 = Eigen::Vector3d;

inline constexpr std::size_t kNumLinks = 6;

// Canonical ordering of the tracked upper-body keypoints.
enum class Link : std::size_t {
  kLeftShoulder = 0,
  kLeftElbow = 1,
  kLeftHand = 2,
  kRightShoulder = 3,
  kRightElbow = 4,
  kRightHand = 5,
};

inline constexpr std::array<std::string_view, kNumLinks> kLinkNames = {
    "l_shoulder", "l_elbow", "l_hand", "r_shoulder", "r_elbow", "r_hand"};

inline std::optional<std::size_t> link_index(std::string_view name) {
  for (std::size_t i = 0; i < kNumLinks; ++i) {
    if (kLinkNames[i] == name) return i;
  }
  return std::nullopt;
}

constexpr bool is_left(std::size_t link) { return link < 3; }

template <typename T>
using PerLink = std::array<T, kNumLinks>;

using LinkPositions = PerLink<Vec3>;
using LinkMask = PerLink<bool>;

inline LinkPositions zero_positions() {
  LinkPositions p;
  p.fill(Vec3::Zero());
  return p;
}

}  // namespace gentle

#endif  // GENTLE_LINKS_HPP_
