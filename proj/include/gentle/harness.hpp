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

// Episode loop. Each outer step:
//   1. threshold schedule -> tau_safe, kp = tau / 0.05, kd critical
//   2. interaction schedule -> active links, gains, anchor update,
//      interaction forces, torso residual wrench
//   3. clip target -> driving force, limited to tau_safe
//   4. reference dynamics integration
//   5. rewards
//   6. trace row
//
// The reference dynamics is the whole plant here: there is no separate
// simulated robot, so x_sim == x_ref and f_sim == f_interact. r_dyn is
// therefore 2 and r_force 1 on every row; only r_pen varies.

#ifndef GENTLE_HARNESS_HPP_
#define GENTLE_HARNESS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <istream>
#include <optional>
#include <span>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gentle/errors.hpp"
#include "gentle/forcefield.hpp"
#include "gentle/links.hpp"
#include "gentle/motion_clip.hpp"
#include "gentle/posture_index.hpp"
#include "gentle/random.hpp"
#include "gentle/refdyn.hpp"
#include "gentle/rewards.hpp"
#include "gentle/safety.hpp"
#include "gentle/scenario.hpp"

namespace gentle::harness {

inline constexpr std::string_view kTraceVersion = "# gentle-trace-v1";

struct TraceRow {
  double t = 0.0;
  double tau_safe = 0.0;
  double kp = 0.0;
  double kd = 0.0;
  LinkPositions position = zero_positions();
  LinkPositions velocity = zero_positions();
  LinkPositions f_drive = zero_positions();
  LinkPositions f_limited = zero_positions();
  LinkPositions f_interact = zero_positions();
  LinkMask active{};
  PerLink<int> mode{};  // forcefield::ContactMode as int
  PerLink<double> k_spring{};
  Vec3 residual_force = Vec3::Zero();
  Vec3 residual_torque = Vec3::Zero();
  rewards::RewardBreakdown reward;
};

struct Trace {
  double dt = 0.0;
  std::vector<TraceRow> rows;
  std::vector<std::string> warnings;
};

// Named RNG sub-streams, one per consumer.
struct EpisodeStreams {
  RandomStream active_set;
  RandomStream stiffness;
  RandomStream contact_type;
  RandomStream posture;
  RandomStream direction;
  RandomStream threshold;

  explicit EpisodeStreams(std::uint64_t seed)
      : active_set(RandomStream::derive(seed, "active-set")),
        stiffness(RandomStream::derive(seed, "stiffness")),
        contact_type(RandomStream::derive(seed, "contact-type")),
        posture(RandomStream::derive(seed, "posture")),
        direction(RandomStream::derive(seed, "direction")),
        threshold(RandomStream::derive(seed, "threshold")) {}
};

namespace detail_run {

struct LinkContact {
  forcefield::AnchorState anchor;
  forcefield::GainProfile gain;
  int event = -1;  // scripted event currently driving this link
};

inline refdyn::TargetFrame target_at(const Scenario& sc, double t) {
  if (sc.clip) return motion::sample_clip(*sc.clip, t);
  refdyn::TargetFrame out;
  for (std::size_t l = 0; l < kNumLinks; ++l) out[l] = {sc.pose[l], Vec3::Zero()};
  return out;
}

inline LinkPositions positions(const PerLink<refdyn::LinkState>& s) {
  LinkPositions p;
  for (std::size_t l = 0; l < kNumLinks; ++l) p[l] = s[l].position;
  return p;
}

class Episode {
 public:
  explicit Episode(const Scenario& sc)
      : sc_(sc), streams_(sc.seed), thresholds_(sc.safety) {
    if (sc_.mode == ScenarioMode::kTrainingStyle) {
      if (sc_.clip) {
        index_.emplace(motion::build_posture_index(std::span(&*sc_.clip, 1)));
      } else {
        motion::MotionClip still;
        still.frames = {sc_.pose};
        index_.emplace(motion::build_posture_index(std::span(&still, 1)));
      }
    }
  }

  Trace run() {
    Trace trace;
    trace.dt = sc_.refdyn.dt;
    const auto steps = static_cast<std::size_t>(std::floor(sc_.duration / sc_.refdyn.dt + 1e-9));
    if (sc_.clip && sc_.clip->duration() + 1e-12 < sc_.duration) {
      trace.warnings.push_back("clip '" + sc_.clip->name + "' is " + std::to_string(sc_.clip->duration()) +
                               " s long; holding its final frame to " + std::to_string(sc_.duration) + " s");
    }

    const auto init = target_at(sc_, 0.0);
    for (std::size_t l = 0; l < kNumLinks; ++l) {
      state_[l] = sc_.initial_offset.isZero() ? refdyn::LinkState{init[l].position, init[l].velocity}
                                              : refdyn::LinkState{init[l].position + sc_.initial_offset, Vec3::Zero()};
    }

    trace.rows.reserve(steps + 1);
    for (std::size_t n = 0; n <= steps; ++n) {
      const double t = static_cast<double>(n) * sc_.refdyn.dt;
      trace.rows.push_back(advance(t, n < steps));
    }
    return trace;
  }

 private:
  TraceRow advance(double t, bool integrate) {
    TraceRow row;
    row.t = t;

    // (1) safety threshold and tracking gains
    const double tau = sc_.fixed_tau ? *sc_.fixed_tau : thresholds_.value_at(t, streams_.threshold);
    const auto gains = refdyn::ImpedanceGains::critically_damped(sc_.refdyn.mass, safety::derive_stiffness(tau));
    row.tau_safe = tau;
    row.kp = gains.kp;
    row.kd = gains.kd;

    // (2) interaction schedule, anchors, forces
    const auto target = target_at(sc_, t);
    if (sc_.mode == ScenarioMode::kTrainingStyle) {
      schedule_training(t, target);
    } else {
      schedule_scripted(t);
    }
    PerLink<double> k{};
    for (std::size_t l = 0; l < kNumLinks; ++l) {
      auto& c = contacts_[l];
      if (!c.anchor.active()) continue;
      c.anchor = forcefield::update_anchor(c.anchor, state_[l], sc_.refdyn.dt, sc_.forces.anchor_time_constant);
      k[l] = c.gain.value(std::clamp(t, c.gain.start, c.gain.end()));
      row.active[l] = true;
      row.mode[l] = static_cast<int>(c.anchor.mode);
      row.k_spring[l] = k[l];
      row.f_interact[l] =
          forcefield::interaction_force(c.anchor, state_[l], k[l], sc_.forces.limits.f_max);
    }
    const auto bounded = forcefield::bound_net_wrench(row.f_interact, positions(state_), sc_.forces.torso,
                                                      sc_.forces.limits);
    row.residual_force = bounded.torso_residual_force;
    row.residual_torque = bounded.torso_residual_torque;

    // (3) driving force
    for (std::size_t l = 0; l < kNumLinks; ++l) {
      row.f_drive[l] = refdyn::driving_force(target[l], state_[l], gains);
      row.f_limited[l] = safety::limit_driving_force(row.f_drive[l], tau);
      row.position[l] = state_[l].position;
      row.velocity[l] = state_[l].velocity;
    }

    // (5) rewards; x_sim, v_sim and f_sim are the reference quantities.
    const auto& cfg = sc_.rewards;
    const double rd = rewards::r_dyn(row.position, row.position, row.velocity, row.velocity, cfg);
    const double rf = rewards::r_force(row.f_interact, row.f_interact, cfg);
    const double rp = rewards::r_pen(std::span<const Vec3>(row.f_interact), tau, cfg);
    row.reward = rewards::compliance_total(rd, rf, rp, cfg);

    // (4) integrate to the next row; forces re-evaluated each substep.
    if (integrate) {
      for (std::size_t l = 0; l < kNumLinks; ++l) {
        const auto& c = contacts_[l];
        const double f_max = sc_.forces.limits.f_max;
        const auto drive = [&](const refdyn::LinkState& s) {
          return safety::limit_driving_force(refdyn::driving_force(target[l], s, gains), tau);
        };
        const auto interact = [&](const refdyn::LinkState& s) {
          return forcefield::interaction_force(c.anchor, s, k[l], f_max);
        };
        state_[l] = refdyn::step(state_[l], drive, interact, sc_.refdyn);
      }
    }
    return row;
  }

  void schedule_training(double t, const refdyn::TargetFrame& target) {
    const auto interval = static_cast<std::size_t>(std::floor(t / sc_.forces.interval + 1e-9));
    if (interval_ && *interval_ == interval) return;
    interval_ = interval;
    const double start = static_cast<double>(interval) * sc_.forces.interval;

    const auto active = forcefield::sample_active_set(streams_.active_set, sc_.forces.modes);
    const bool guiding = streams_.contact_type.uniform01() < sc_.forces.guiding_fraction;
    const LinkPositions current = positions(state_);
    const motion::Posture* posture = nullptr;
    if (guiding && active.count() > 0) {
      posture = &motion::sample_guiding_posture(*index_, current, streams_.posture, sc_.forces.neighbors,
                                                sc_.forces.max_posture_distance);
    }
    for (std::size_t l = 0; l < kNumLinks; ++l) {
      auto& c = contacts_[l];
      c = {};
      if (!active.mask[l]) continue;
      const double hold = forcefield::sample_stiffness(streams_.stiffness, sc_.forces.stiffness);
      c.gain = {start, sc_.forces.interval, sc_.forces.transition_window, hold};
      const Vec3 fallback = uniform_unit_vector(streams_.direction);
      if (guiding) {
        // One posture feeds every active link.
        c.anchor = forcefield::AnchorState::guiding(current[l], posture->links[l], t, fallback);
      } else {
        // The contact pushes back against the link's motion toward its target.
        Vec3 d = current[l] - target[l].position;
        if (!(d.norm() > 1e-9)) d = fallback;
        c.anchor = forcefield::AnchorState::resistive(current[l], d, t);
      }
    }
  }

  void schedule_scripted(double t) {
    constexpr double eps = 1e-9;
    for (std::size_t l = 0; l < kNumLinks; ++l) {
      auto& c = contacts_[l];
      if (c.event >= 0 && t > sc_.events[static_cast<std::size_t>(c.event)].end() + eps) c = {};
    }
    for (std::size_t i = next_event_; i < sc_.events.size(); ++i) {
      const auto& e = sc_.events[i];
      if (e.start > t + eps) break;
      next_event_ = i + 1;
      if (t > e.end() + eps) continue;
      auto& c = contacts_[e.link];
      const Vec3 here = state_[e.link].position;
      c.event = static_cast<int>(i);
      c.gain = {e.start, e.duration, e.ramp, e.stiffness};
      if (e.mode == forcefield::ContactMode::kGuiding) {
        const Vec3 goal = e.target ? *e.target : here + *e.offset;
        c.anchor = forcefield::AnchorState::guiding(here, goal, t, uniform_unit_vector(streams_.direction));
      } else {
        c.anchor = forcefield::AnchorState::resistive(here, *e.direction, t);
      }
    }
  }

  const Scenario& sc_;
  EpisodeStreams streams_;
  safety::ThresholdSchedule thresholds_;
  std::optional<motion::PostureIndex> index_;
  PerLink<refdyn::LinkState> state_{};
  PerLink<LinkContact> contacts_{};
  std::optional<std::size_t> interval_;
  std::size_t next_event_ = 0;
};

}  // namespace detail_run

inline Trace run_episode(const Scenario& scenario) {
  scenario.validate();
  return detail_run::Episode(scenario).run();
}

// ---------------------------------------------------------------------------
// CSV

inline std::vector<std::string> trace_header() {
  std::vector<std::string> h = {"t", "tau_safe", "kp", "kd"};
  const char* axes[] = {"x", "y", "z"};
  for (auto name : kLinkNames) {
    const std::string l(name);
    for (const char* group : {"pos", "vel", "fdrive", "flimited", "finteract"}) {
      for (const char* a : axes) h.push_back(l + "_" + group + "_" + a);
    }
    h.push_back(l + "_active");
    h.push_back(l + "_mode");
    h.push_back(l + "_kspring");
  }
  for (const char* a : axes) h.push_back(std::string("torso_resid_f") + a);
  for (const char* a : axes) h.push_back(std::string("torso_resid_m") + a);
  for (const char* r : {"r_dyn", "r_force", "r_pen", "r_total"}) h.push_back(r);
  return h;
}

inline std::vector<double> row_values(const TraceRow& r) {
  std::vector<double> v = {r.t, r.tau_safe, r.kp, r.kd};
  v.reserve(trace_header().size());
  for (std::size_t l = 0; l < kNumLinks; ++l) {
    for (const auto* group : {&r.position, &r.velocity, &r.f_drive, &r.f_limited, &r.f_interact}) {
      for (int a = 0; a < 3; ++a) v.push_back((*group)[l][a]);
    }
    v.push_back(r.active[l] ? 1.0 : 0.0);
    v.push_back(r.mode[l]);
    v.push_back(r.k_spring[l]);
  }
  for (int a = 0; a < 3; ++a) v.push_back(r.residual_force[a]);
  for (int a = 0; a < 3; ++a) v.push_back(r.residual_torque[a]);
  for (double x : {r.reward.r_dyn, r.reward.r_force, r.reward.r_pen, r.reward.total}) v.push_back(x);
  return v;
}

inline TraceRow row_from_values(const std::vector<double>& v) {
  TraceRow r;
  std::size_t i = 0;
  r.t = v[i++];
  r.tau_safe = v[i++];
  r.kp = v[i++];
  r.kd = v[i++];
  for (std::size_t l = 0; l < kNumLinks; ++l) {
    for (auto* group : {&r.position, &r.velocity, &r.f_drive, &r.f_limited, &r.f_interact}) {
      for (int a = 0; a < 3; ++a) (*group)[l][a] = v[i++];
    }
    r.active[l] = v[i++] != 0.0;
    r.mode[l] = static_cast<int>(v[i++]);
    r.k_spring[l] = v[i++];
  }
  for (int a = 0; a < 3; ++a) r.residual_force[a] = v[i++];
  for (int a = 0; a < 3; ++a) r.residual_torque[a] = v[i++];
  r.reward.r_dyn = v[i++];
  r.reward.r_force = v[i++];
  r.reward.r_pen = v[i++];
  r.reward.total = v[i++];
  return r;
}

// Returns the number of bytes written.
inline std::size_t write_trace(const Trace& trace, std::ostream& out) {
  std::string buf;
  buf.append(kTraceVersion).push_back('\n');
  const auto header = trace_header();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) buf.push_back(',');
    buf += header[i];
  }
  buf.push_back('\n');
  for (const auto& row : trace.rows) {
    const auto values = row_values(row);
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) buf.push_back(',');
      buf += motion::format_double(values[i]);
    }
    buf.push_back('\n');
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  out.flush();
  if (!out) throw std::runtime_error("write_trace: failed after " + std::to_string(trace.rows.size()) + " rows");
  return buf.size();
}

inline Trace read_trace(std::istream& in) {
  Trace trace;
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || line != kTraceVersion) throw ParseError("missing trace version line", 1);
  const auto header = trace_header();
  ++line_no;
  if (!std::getline(in, line)) throw ParseError("missing trace header", line_no);
  {
    std::vector<std::string> got;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) got.push_back(f);
    if (got != header) throw ParseError("trace header does not match gentle-trace-v1", line_no);
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> values;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const auto comma = std::min(line.find(',', pos), line.size());
      const auto v = motion::parse_double(std::string_view(line).substr(pos, comma - pos));
      if (!v) throw ParseError("malformed number in trace", line_no);
      values.push_back(*v);
      pos = comma + 1;
    }
    if (values.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " columns, got " +
                           std::to_string(values.size()),
                       line_no);
    }
    trace.rows.push_back(row_from_values(values));
  }
  if (trace.rows.size() >= 2) trace.dt = trace.rows[1].t - trace.rows[0].t;
  return trace;
}

}  // namespace gentle::harness

#endif  // GENTLE_HARNESS_HPP_
