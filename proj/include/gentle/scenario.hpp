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

// Episode description: what the links track, how interaction forces are
// produced (sampled per interval, or scripted), and module parameters.
// See docs/scenario-format.md for the file keys.

#ifndef GENTLE_SCENARIO_HPP_
#define GENTLE_SCENARIO_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gentle/errors.hpp"
#include "gentle/forcefield.hpp"
#include "gentle/keyvalue.hpp"
#include "gentle/links.hpp"
#include "gentle/motion_clip.hpp"
#include "gentle/refdyn.hpp"
#include "gentle/rewards.hpp"
#include "gentle/safety.hpp"

namespace gentle::harness {

enum class ScenarioMode { kTrainingStyle, kScripted };

struct ForceParams {
  double interval = 5.0;           // s, active-set and anchor resample period
  double transition_window = 0.5;  // s, gain ramp at both ends of an interval
  forcefield::StiffnessRange stiffness;
  forcefield::ModeProbabilities modes;
  forcefield::WrenchLimits limits;
  double anchor_time_constant = forcefield::kDefaultAnchorTimeConstant;
  std::size_t neighbors = 32;
  double max_posture_distance = std::numeric_limits<double>::infinity();
  double guiding_fraction = 0.5;  // chance an interval's contacts are guiding
  Vec3 torso = Vec3::Zero();      // root frame

  void validate() const {
    detail::require(interval > 0.0, "forces: interval must be > 0");
    detail::require(transition_window >= 0.0 && transition_window <= 0.5 * interval,
                    "forces: transition_window must lie in [0, interval / 2]");
    detail::require(stiffness.k_min >= 0.0 && stiffness.k_max >= stiffness.k_min,
                    "forces: need 0 <= k_min <= k_max");
    modes.validate();
    limits.validate();
    detail::require(anchor_time_constant > 0.0, "forces: anchor_time_constant must be > 0");
    detail::require(neighbors >= 1, "forces: neighbors must be >= 1");
    detail::require(max_posture_distance > 0.0, "forces: max_posture_distance must be > 0");
    detail::require(guiding_fraction >= 0.0 && guiding_fraction <= 1.0,
                    "forces: guiding_fraction must lie in [0, 1]");
  }
};

// One scripted contact on one link.
struct ForceEvent {
  double start = 0.0;
  double duration = 0.0;
  double ramp = 0.5;
  std::size_t link = 0;
  forcefield::ContactMode mode = forcefield::ContactMode::kGuiding;
  double stiffness = 0.0;
  std::optional<Vec3> target;     // guiding: absolute anchor goal
  std::optional<Vec3> offset;     // guiding: goal relative to the link at activation
  std::optional<Vec3> direction;  // resistive: push-back direction

  double end() const { return start + duration; }
};

struct Scenario {
  std::string name = "scenario";
  double duration = 10.0;
  std::uint64_t seed = 0;
  ScenarioMode mode = ScenarioMode::kScripted;

  std::optional<motion::MotionClip> clip;
  LinkPositions pose = default_pose();  // constant target when no clip is given
  Vec3 initial_offset = Vec3::Zero();   // links start this far from their t = 0 target, at rest

  std::optional<double> fixed_tau;  // nullopt: sampled schedule
  bool allow_tau_outside_range = false;

  refdyn::RefDynParams refdyn;
  safety::SafetyParams safety;
  ForceParams forces;
  rewards::RewardConfig rewards;
  std::vector<ForceEvent> events;

  static LinkPositions default_pose() {
    return {Vec3(0.0, 0.15, 0.35), Vec3(0.05, 0.20, 0.10), Vec3(0.30, 0.15, 0.05),
            Vec3(0.0, -0.15, 0.35), Vec3(0.05, -0.20, 0.10), Vec3(0.30, -0.15, 0.05)};
  }

  // Whether any trace column depends on the seed.
  bool stochastic() const { return mode == ScenarioMode::kTrainingStyle || !fixed_tau; }

  void validate() const {
    detail::require(std::isfinite(duration) && duration > 0.0, "scenario: duration must be > 0");
    refdyn.validate();
    safety.validate();
    forces.validate();
    rewards.validate();
    for (const auto& p : pose) detail::require_finite(p, "scenario pose");
    detail::require_finite(initial_offset, "scenario initial_offset");
    if (fixed_tau) {
      detail::require(*fixed_tau > 0.0, "scenario: tau_safe must be > 0");
      if (!allow_tau_outside_range) {
        detail::require(*fixed_tau >= safety.f1 && *fixed_tau <= safety.f2,
                        "scenario: fixed tau_safe outside [f1, f2]; set allow_tau_outside_range = 1");
      }
    }
    double prev = -std::numeric_limits<double>::infinity();
    std::vector<double> link_free(kNumLinks, -std::numeric_limits<double>::infinity());
    for (const auto& e : events) {
      detail::require(e.start >= prev, "scenario: events must be sorted by start time");
      prev = e.start;
      detail::require(e.start >= 0.0 && e.duration > 0.0, "scenario: event needs start >= 0, duration > 0");
      detail::require(e.ramp >= 0.0, "scenario: event ramp must be >= 0");
      detail::require(e.stiffness >= 0.0, "scenario: event stiffness must be >= 0");
      detail::require(e.link < kNumLinks, "scenario: event link out of range");
      detail::require(e.start >= link_free[e.link], "scenario: overlapping events on one link");
      link_free[e.link] = e.end();
      if (e.mode == forcefield::ContactMode::kGuiding) {
        detail::require(e.target.has_value() != e.offset.has_value(),
                        "scenario: guiding event needs exactly one of target, offset");
      } else {
        detail::require(e.direction && e.direction->norm() > 0.0,
                        "scenario: resistive event needs a non-zero direction");
      }
    }
  }
};

namespace detail_scn {

inline forcefield::ContactMode parse_contact(const kv::Section& s) {
  const auto m = s.text("mode").value_or("guiding");
  if (m == "guiding") return forcefield::ContactMode::kGuiding;
  if (m == "resistive") return forcefield::ContactMode::kResistive;
  throw ParseError("event mode must be 'guiding' or 'resistive'", s.line_of("mode"));
}

}  // namespace detail_scn

// `base_dir` resolves a relative clip path.
inline Scenario parse_scenario(std::istream& in, const std::filesystem::path& base_dir = {}) {
  const auto doc = kv::Document::parse(in);
  doc.allow_sections({"scenario", "pose", "refdyn", "safety", "forces", "rewards", "event"},
                     {"event"});
  Scenario sc;

  if (const auto* s = doc.section("scenario")) {
    s->allow_only({"name", "duration", "seed", "mode", "clip", "initial_offset"});
    s->read("initial_offset", sc.initial_offset);
    if (auto v = s->text("name")) sc.name = *v;
    s->read("duration", sc.duration);
    if (auto v = s->text("seed")) {
      try {
        if (v->empty() || (*v)[0] == '-') throw std::invalid_argument("negative");
        std::size_t used = 0;
        sc.seed = std::stoull(*v, &used, 0);
        if (used != v->size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ParseError("seed must be an unsigned 64-bit integer", s->line_of("seed"));
      }
    }
    if (auto v = s->text("mode")) {
      if (*v == "training") {
        sc.mode = ScenarioMode::kTrainingStyle;
      } else if (*v == "scripted") {
        sc.mode = ScenarioMode::kScripted;
      } else {
        throw ParseError("mode must be 'training' or 'scripted'", s->line_of("mode"));
      }
    }
    if (auto v = s->text("clip")) {
      std::filesystem::path p(*v);
      if (p.is_relative()) p = base_dir / p;
      sc.clip = motion::load_clip_file(p);
    }
  } else {
    throw ParseError("missing [scenario] section");
  }

  if (const auto* s = doc.section("pose")) {
    for (const auto& e : s->entries()) {
      const auto idx = link_index(e.key);
      if (!idx) throw ParseError("unknown link '" + e.key + "'", e.line);
      s->read(e.key, sc.pose[*idx]);
    }
  }

  if (const auto* s = doc.section("refdyn")) {
    s->allow_only({"mass", "damping", "dt", "substeps", "v_clip", "a_clip"});
    s->read("mass", sc.refdyn.mass);
    s->read("damping", sc.refdyn.damping);
    s->read("dt", sc.refdyn.dt);
    s->read("substeps", sc.refdyn.substeps);
    s->read("v_clip", sc.refdyn.v_clip);
    s->read("a_clip", sc.refdyn.a_clip);
  }

  if (const auto* s = doc.section("safety")) {
    s->allow_only({"tau_safe", "f1", "f2", "delta_tol", "resample_period", "blend_window",
                   "allow_tau_outside_range"});
    s->read("f1", sc.safety.f1);
    s->read("f2", sc.safety.f2);
    s->read("delta_tol", sc.safety.delta_tol);
    s->read("resample_period", sc.safety.resample_period);
    s->read("blend_window", sc.safety.blend_window);
    if (auto v = s->text("tau_safe"); v && *v != "sampled") {
      double tau = 0.0;
      s->read("tau_safe", tau);
      sc.fixed_tau = tau;
    }
    int allow = 0;
    s->read("allow_tau_outside_range", allow);
    sc.allow_tau_outside_range = allow != 0;
  }
  sc.rewards.delta_tol = sc.safety.delta_tol;

  if (const auto* s = doc.section("forces")) {
    s->allow_only({"interval", "transition_window", "k_min", "k_max", "p_none", "p_both", "p_left",
                   "p_right", "p_single", "f_max", "net_force_limit", "net_torque_limit",
                   "anchor_time_constant", "neighbors", "max_posture_distance", "guiding_fraction",
                   "torso"});
    auto& f = sc.forces;
    s->read("interval", f.interval);
    s->read("transition_window", f.transition_window);
    s->read("k_min", f.stiffness.k_min);
    s->read("k_max", f.stiffness.k_max);
    s->read("p_none", f.modes.p[0]);
    s->read("p_both", f.modes.p[1]);
    s->read("p_left", f.modes.p[2]);
    s->read("p_right", f.modes.p[3]);
    s->read("p_single", f.modes.p[4]);
    s->read("f_max", f.limits.f_max);
    s->read("net_force_limit", f.limits.net_force_limit);
    s->read("net_torque_limit", f.limits.net_torque_limit);
    s->read("anchor_time_constant", f.anchor_time_constant);
    s->read("neighbors", f.neighbors);
    s->read("max_posture_distance", f.max_posture_distance);
    s->read("guiding_fraction", f.guiding_fraction);
    s->read("torso", f.torso);
  }

  if (const auto* s = doc.section("rewards")) {
    s->allow_only({"sigma_x", "sigma_v", "sigma_f", "sigma_root", "sigma_joint", "w_dyn", "w_force",
                   "w_pen", "w_root", "w_joint"});
    auto& r = sc.rewards;
    s->read("sigma_x", r.sigma_x);
    s->read("sigma_v", r.sigma_v);
    s->read("sigma_f", r.sigma_f);
    s->read("sigma_root", r.sigma_root);
    s->read("sigma_joint", r.sigma_joint);
    s->read("w_dyn", r.w_dyn);
    s->read("w_force", r.w_force);
    s->read("w_pen", r.w_pen);
    s->read("w_root", r.w_root);
    s->read("w_joint", r.w_joint);
  }

  for (const auto* s : doc.all("event")) {
    s->allow_only({"start", "duration", "ramp", "link", "mode", "stiffness", "target", "offset",
                   "direction"});
    ForceEvent e;
    s->read("start", e.start);
    s->read("duration", e.duration);
    s->read("ramp", e.ramp);
    s->read("stiffness", e.stiffness);
    const auto link = s->text("link");
    if (!link) throw ParseError("event needs a link", s->line());
    const auto idx = link_index(*link);
    if (!idx) throw ParseError("unknown link '" + *link + "'", s->line_of("link"));
    e.link = *idx;
    e.mode = detail_scn::parse_contact(*s);
    e.target = s->vec3("target");
    e.offset = s->vec3("offset");
    e.direction = s->vec3("direction");
    sc.events.push_back(e);
  }

  try {
    sc.validate();
  } catch (const ParseError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ParseError(e.what());
  }
  return sc;
}

inline Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file " + path.string());
  return parse_scenario(in, path.parent_path());
}

}  // namespace gentle::harness

#endif  // GENTLE_SCENARIO_HPP_
