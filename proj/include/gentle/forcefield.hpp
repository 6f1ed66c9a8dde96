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

// Interaction-force model applied at the tracked links.
//
// A single spring law covers both contact types; only the anchor differs.
// Resistive contact pins the anchor where the link was when contact began.
// Guiding contact slides the anchor toward a point taken from a dataset
// posture. Contact is unilateral: only the displacement component along the
// activation direction produces force, and never a pulling one.

#ifndef GENTLE_FORCEFIELD_HPP_
#define GENTLE_FORCEFIELD_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>

#include "gentle/errors.hpp"
#include "gentle/links.hpp"
#include "gentle/random.hpp"
#include "gentle/refdyn.hpp"

namespace gentle::forcefield {

enum class ContactMode { kInactive = 0, kResistive = 1, kGuiding = 2 };

struct AnchorState {
  ContactMode mode = ContactMode::kInactive;
  Vec3 anchor = Vec3::Zero();
  Vec3 direction = Vec3::UnitX();  // unit; direction the contact pushes the link
  Vec3 smoothing_target = Vec3::Zero();
  double activated_at = 0.0;

  bool active() const { return mode != ContactMode::kInactive; }

  // Anchor fixed at the contact point. `push_direction` is the direction the
  // contact pushes back on the link; it is normalized here.
  static AnchorState resistive(const Vec3& contact_point, const Vec3& push_direction, double t) {
    detail::require_finite(contact_point, "contact point");
    const double n = push_direction.norm();
    detail::require(std::isfinite(n) && n > 0.0, "resistive contact needs a non-zero direction");
    return {ContactMode::kResistive, contact_point, push_direction / n, contact_point, t};
  }

  // Anchor starts on the link and slides toward `target`. The direction is the
  // link-to-target vector at activation; `fallback` is used when that vector
  // vanishes.
  static AnchorState guiding(const Vec3& link_position, const Vec3& target, double t,
                             const Vec3& fallback = Vec3::UnitX()) {
    detail::require_finite(link_position, "link position");
    detail::require_finite(target, "guiding target");
    Vec3 d = target - link_position;
    double n = d.norm();
    if (!(n > 1e-12)) {
      d = fallback;
      n = d.norm();
      detail::require(n > 0.0, "guiding fallback direction must be non-zero");
    }
    return {ContactMode::kGuiding, link_position, d / n, target, t};
  }
};

struct WrenchLimits {
  double f_max = 30.0;             // N, per-link cap
  double net_force_limit = 30.0;   // N, about the torso
  double net_torque_limit = 20.0;  // N*m, about the torso

  void validate() const {
    detail::require(f_max > 0.0, "f_max must be > 0");
    detail::require(net_force_limit > 0.0, "net force limit must be > 0");
    detail::require(net_torque_limit > 0.0, "net torque limit must be > 0");
  }
};

// ---------------------------------------------------------------------------
// Active-set sampling

enum class ActiveSetMode : std::size_t {
  kNone = 0,
  kBothArms = 1,
  kLeftArm = 2,
  kRightArm = 3,
  kSingleLink = 4,
};

inline constexpr std::size_t kNumActiveSetModes = 5;

struct ModeProbabilities {
  std::array<double, kNumActiveSetModes> p = {0.40, 0.15, 0.15, 0.15, 0.15};

  void validate() const {
    double sum = 0.0;
    for (double x : p) {
      detail::require(std::isfinite(x) && x >= 0.0, "mode probabilities must be >= 0");
      sum += x;
    }
    detail::require(std::abs(sum - 1.0) < 1e-9, "mode probabilities must sum to 1");
  }
};

struct ActiveSet {
  ActiveSetMode mode = ActiveSetMode::kNone;
  LinkMask mask{};

  std::size_t count() const {
    return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
  }
};

template <UniformSource R>
ActiveSet sample_active_set(R& rng, const ModeProbabilities& probs = {}) {
  const double u = rng.uniform01();
  std::size_t m = 0;
  double acc = probs.p[0];
  while (m + 1 < kNumActiveSetModes && u >= acc) acc += probs.p[++m];

  ActiveSet out;
  out.mode = static_cast<ActiveSetMode>(m);
  switch (out.mode) {
    case ActiveSetMode::kNone:
      break;
    case ActiveSetMode::kBothArms:
      out.mask.fill(true);
      break;
    case ActiveSetMode::kLeftArm:
      for (std::size_t i = 0; i < kNumLinks; ++i) out.mask[i] = is_left(i);
      break;
    case ActiveSetMode::kRightArm:
      for (std::size_t i = 0; i < kNumLinks; ++i) out.mask[i] = !is_left(i);
      break;
    case ActiveSetMode::kSingleLink:
      out.mask[uniform_index(rng, kNumLinks)] = true;
      break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Gain scheduling

struct StiffnessRange {
  double k_min = 5.0;    // N/m
  double k_max = 250.0;  // N/m
};

template <UniformSource R>
double sample_stiffness(R& rng, const StiffnessRange& range = {}) {
  return uniform(rng, range.k_min, range.k_max);
}

// Ramp up over `ramp`, hold, ramp down over `ramp`; zero at both ends.
struct GainProfile {
  double start = 0.0;
  double length = 5.0;
  double ramp = 0.5;
  double hold = 0.0;

  double end() const { return start + length; }

  double value(double t) const {
    if (!(t >= start && t <= end())) throw QueryError("gain query outside its interval");
    const double r = std::min(ramp, 0.5 * length);
    if (r <= 0.0) return (t > start && t < end()) ? hold : 0.0;
    const double up = (t - start) / r;
    const double down = (end() - t) / r;
    return hold * std::clamp(std::min(up, down), 0.0, 1.0);
  }
};

struct InteractionSchedule {
  double interval_start = 0.0;
  double interval_length = 5.0;
  double transition_window = 0.5;
  ActiveSet active;
  PerLink<double> hold_stiffness{};  // 0 for inactive links

  GainProfile profile(std::size_t link) const {
    return {interval_start, interval_length, transition_window,
            active.mask.at(link) ? hold_stiffness[link] : 0.0};
  }
};

inline double schedule_gain(const InteractionSchedule& schedule, std::size_t link, double t) {
  if (link >= kNumLinks) throw QueryError("link index out of range");
  return schedule.profile(link).value(t);
}

// ---------------------------------------------------------------------------
// Anchors and forces

inline constexpr double kDefaultAnchorTimeConstant = 0.2;  // s

inline AnchorState update_anchor(AnchorState state, const refdyn::LinkState& /*current*/, double dt,
                                 double time_constant = kDefaultAnchorTimeConstant) {
  detail::require(dt >= 0.0, "update_anchor: dt must be >= 0");
  detail::require(time_constant > 0.0, "update_anchor: time constant must be > 0");
  if (state.mode == ContactMode::kGuiding) {
    const double alpha = 1.0 - std::exp(-dt / time_constant);
    state.anchor += alpha * (state.smoothing_target - state.anchor);
  }
  return state;
}

// k * max(0, (anchor - x) . d) * d, capped at f_max.
inline Vec3 interaction_force(const AnchorState& state, const Vec3& position, double k_spring,
                              double f_max = WrenchLimits{}.f_max) {
  if (!state.active()) return Vec3::Zero();
  detail::require(k_spring >= 0.0, "interaction_force: stiffness must be >= 0");
  const double penetration = (state.anchor - position).dot(state.direction);
  if (!(penetration > 0.0)) return Vec3::Zero();
  return refdyn::clip_norm(k_spring * penetration * state.direction, f_max);
}

inline Vec3 interaction_force(const AnchorState& state, const refdyn::LinkState& current,
                              double k_spring, double f_max = WrenchLimits{}.f_max) {
  return interaction_force(state, current.position, k_spring, f_max);
}

struct Wrench {
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();
};

struct ForceResult {
  LinkPositions per_link_force = zero_positions();
  Vec3 torso_residual_force = Vec3::Zero();
  Vec3 torso_residual_torque = Vec3::Zero();
};

// Net force and torque about `torso` of forces applied at `positions`.
inline Wrench net_wrench(std::span<const Vec3> forces, std::span<const Vec3> positions,
                         const Vec3& torso) {
  detail::require(forces.size() == positions.size(), "net_wrench: link count mismatch");
  Wrench w;
  for (std::size_t i = 0; i < forces.size(); ++i) {
    w.force += forces[i];
    w.torque += (positions[i] - torso).cross(forces[i]);
  }
  return w;
}

// Adds an opposing torso wrench so the totals stay within limits. Per-link
// forces pass through unchanged; the force residual acts at the torso and so
// contributes no torque.
inline ForceResult bound_net_wrench(const LinkPositions& per_link_forces,
                                    const LinkPositions& link_positions, const Vec3& torso,
                                    const WrenchLimits& limits = {}) {
  limits.validate();
  ForceResult out;
  out.per_link_force = per_link_forces;
  const Wrench net = net_wrench(per_link_forces, link_positions, torso);

  const double fn = net.force.norm();
  if (fn > limits.net_force_limit) {
    out.torso_residual_force = -(1.0 - limits.net_force_limit / fn) * net.force;
  }
  const double tn = net.torque.norm();
  if (tn > limits.net_torque_limit) {
    out.torso_residual_torque = -(1.0 - limits.net_torque_limit / tn) * net.torque;
  }
  return out;
}

}  // namespace gentle::forcefield

#endif  // GENTLE_FORCEFIELD_HPP_
