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

// Per-link impedance reference dynamics.
//
// Each tracked link is a point of virtual mass M driven by a spring-damper
// toward its target and by the modeled interaction force:
//
//   M * a = f_drive_limited + f_interact - D * v
//
// integrated with semi-implicit Euler (velocity first, then position from the
// new velocity) over `substeps` equal substeps per outer step, with
// direction-preserving norm clips on acceleration and velocity.

#ifndef GENTLE_REFDYN_HPP_
#define GENTLE_REFDYN_HPP_

#include <cmath>
#include <concepts>
#include <type_traits>

#include "gentle/errors.hpp"
#include "gentle/links.hpp"

namespace gentle::refdyn {

struct LinkState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();

  bool operator==(const LinkState&) const = default;
};

struct RefDynParams {
  double mass = 0.1;      // kg
  double damping = 2.0;   // N*s/m, applied to the total dynamics
  double dt = 0.02;       // s, outer step
  int substeps = 4;
  double v_clip = 4.0;    // m/s
  double a_clip = 1000.0; // m/s^2

  double substep_length() const { return dt / substeps; }

  void validate() const {
    detail::require(std::isfinite(mass) && mass > 0.0, "refdyn: mass must be > 0");
    detail::require(std::isfinite(damping) && damping >= 0.0, "refdyn: damping must be >= 0");
    detail::require(std::isfinite(dt) && dt > 0.0, "refdyn: dt must be > 0");
    detail::require(substeps >= 1, "refdyn: substeps must be >= 1");
    detail::require(std::isfinite(v_clip) && v_clip > 0.0, "refdyn: v_clip must be > 0");
    detail::require(std::isfinite(a_clip) && a_clip > 0.0, "refdyn: a_clip must be > 0");
  }
};

inline double critical_damping(double mass, double kp) {
  detail::require(std::isfinite(mass) && mass > 0.0, "critical_damping: mass must be > 0");
  detail::require(std::isfinite(kp) && kp > 0.0, "critical_damping: kp must be > 0");
  return 2.0 * std::sqrt(mass * kp);
}

struct ImpedanceGains {
  double kp = 0.0;  // N/m
  double kd = 0.0;  // N*s/m

  static ImpedanceGains critically_damped(double mass, double kp) {
    return {kp, critical_damping(mass, kp)};
  }

  void validate() const {
    detail::require(std::isfinite(kp) && kp > 0.0, "gains: kp must be > 0");
    detail::require(std::isfinite(kd) && kd >= 0.0, "gains: kd must be >= 0");
  }
};

// Target for one link.
struct Target {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
};

using TargetFrame = PerLink<Target>;

inline Vec3 driving_force(const Target& target, const LinkState& current,
                          const ImpedanceGains& gains) {
  gains.validate();
  detail::require_finite(target.position, "target position");
  detail::require_finite(target.velocity, "target velocity");
  detail::require_finite(current.position, "current position");
  detail::require_finite(current.velocity, "current velocity");
  return gains.kp * (target.position - current.position) +
         gains.kd * (target.velocity - current.velocity);
}

// Scales v so that ||v|| <= limit. Leaves v untouched when already inside.
inline Vec3 clip_norm(const Vec3& v, double limit) {
  const double n = v.norm();
  if (n <= limit) return v;
  Vec3 out = v * (limit / n);
  // Rounding can leave the result an ulp above the limit.
  while (out.norm() > limit) out *= 1.0 - 0x1p-52;
  return out;
}

// Force model evaluated at the start of every substep.
template <typename F>
concept ForceModel = !std::is_base_of_v<Eigen::EigenBase<F>, F> && requires(const F& f, const LinkState& s) {
  { f(s) } -> std::convertible_to<Vec3>;
};

// Semi-implicit Euler over `substeps` substeps with state-dependent forces.
// Re-evaluating the spring forces per substep keeps stiff links (kp up to
// 300 N/m at M = 0.1 kg) critically damped; holding them for a whole 20 ms
// outer step does not.
template <ForceModel Drive, ForceModel Interact>
LinkState step(LinkState state, const Drive& drive, const Interact& interact,
               const RefDynParams& params) {
  params.validate();
  detail::require_finite(state.position, "state position");
  detail::require_finite(state.velocity, "state velocity");

  const double h = params.substep_length();
  for (int i = 0; i < params.substeps; ++i) {
    const Vec3 external = Vec3(drive(state)) + Vec3(interact(state));
    detail::require_finite(external, "applied force");
    const Vec3 accel =
        clip_norm((external - params.damping * state.velocity) / params.mass, params.a_clip);
    state.velocity = clip_norm(state.velocity + h * accel, params.v_clip);
    state.position += h * state.velocity;
  }
  return state;
}

// Constant forces held across all substeps of one outer step.
inline LinkState step(const LinkState& state, const Vec3& f_drive_limited,
                      const Vec3& f_interact, const RefDynParams& params) {
  detail::require_finite(f_drive_limited, "driving force");
  detail::require_finite(f_interact, "interaction force");
  return step(
      state, [&](const LinkState&) { return f_drive_limited; },
      [&](const LinkState&) { return f_interact; }, params);
}

}  // namespace gentle::refdyn

#endif  // GENTLE_REFDYN_HPP_
