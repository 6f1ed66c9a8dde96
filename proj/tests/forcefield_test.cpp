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

#include "gentle/forcefield.hpp"

#include <array>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

namespace gentle::forcefield {
namespace {

TEST(ActiveSet, ModeFrequencies) {
  RandomStream rng(2024);
  std::array<int, kNumActiveSetModes> counts{};
  int six = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const auto s = sample_active_set(rng);
    ++counts[static_cast<std::size_t>(s.mode)];
    six += s.count() == 6;
  }
  const std::array<double, 5> expected = {0.40, 0.15, 0.15, 0.15, 0.15};
  for (std::size_t m = 0; m < counts.size(); ++m) {
    EXPECT_NEAR(counts[m] / double(n), expected[m], 0.01) << "mode " << m;
  }
  EXPECT_NEAR(six / double(n), 0.15, 0.01);
}

TEST(ActiveSet, MasksMatchModes) {
  RandomStream rng(1);
  for (int i = 0; i < 5000; ++i) {
    const auto s = sample_active_set(rng);
    switch (s.mode) {
      case ActiveSetMode::kNone: EXPECT_EQ(s.count(), 0u); break;
      case ActiveSetMode::kBothArms: EXPECT_EQ(s.count(), 6u); break;
      case ActiveSetMode::kLeftArm:
        EXPECT_EQ(s.mask, (LinkMask{true, true, true, false, false, false}));
        break;
      case ActiveSetMode::kRightArm:
        EXPECT_EQ(s.mask, (LinkMask{false, false, false, true, true, true}));
        break;
      case ActiveSetMode::kSingleLink: EXPECT_EQ(s.count(), 1u); break;
    }
  }
}

TEST(ActiveSet, DegenerateSourcePicksFirstMode) {
  ConstantSource zero{0.0};
  for (int i = 0; i < 10; ++i) {
    const auto s = sample_active_set(zero);
    EXPECT_EQ(s.mode, ActiveSetMode::kNone);
    EXPECT_EQ(s.count(), 0u);
  }
  ConstantSource top{std::nextafter(1.0, 0.0)};
  const auto s = sample_active_set(top);
  EXPECT_EQ(s.mode, ActiveSetMode::kSingleLink);
  EXPECT_TRUE(s.mask[5]);
}

TEST(Stiffness, RangeAndMean) {
  RandomStream rng(77);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double k = sample_stiffness(rng);
    ASSERT_GE(k, 5.0);
    ASSERT_LE(k, 250.0);
    sum += k;
  }
  EXPECT_GE(sum / n, 120.0);
  EXPECT_LE(sum / n, 135.0);
  EXPECT_NEAR(sum / n, 127.5, 1.0);
}

InteractionSchedule schedule_with(double k) {
  InteractionSchedule s;
  s.interval_start = 10.0;
  s.active.mask[2] = true;
  s.hold_stiffness[2] = k;
  return s;
}

TEST(ScheduleGain, Profile) {
  const auto s = schedule_with(120.0);
  EXPECT_EQ(schedule_gain(s, 2, 10.0), 0.0);
  EXPECT_DOUBLE_EQ(schedule_gain(s, 2, 12.5), 120.0);
  EXPECT_DOUBLE_EQ(schedule_gain(s, 2, 10.25), 60.0);
  EXPECT_DOUBLE_EQ(schedule_gain(s, 2, 14.75), 60.0);
  EXPECT_EQ(schedule_gain(s, 2, 15.0), 0.0);
  EXPECT_EQ(schedule_gain(s, 0, 12.5), 0.0);  // inactive link
}

TEST(ScheduleGain, OutsideIntervalIsAnError) {
  const auto s = schedule_with(120.0);
  EXPECT_THROW(schedule_gain(s, 2, 9.99), QueryError);
  EXPECT_THROW(schedule_gain(s, 2, 15.01), QueryError);
  EXPECT_THROW(schedule_gain(s, 6, 12.0), QueryError);
}

TEST(ScheduleGain, ContinuousPiecewiseLinear) {
  const auto s = schedule_with(250.0);
  double prev = schedule_gain(s, 2, 10.0);
  const double dt = 0.001;
  for (double t = 10.0 + dt; t <= 15.0; t += dt) {
    const double k = schedule_gain(s, 2, t);
    EXPECT_LE(std::abs(k - prev), 250.0 / 0.5 * dt + 1e-9);
    prev = k;
  }
}

TEST(UpdateAnchor, ResistiveIsFixed) {
  const auto a0 = AnchorState::resistive({0.2, 0.1, 0.0}, {0.0, 0.0, 1.0}, 0.0);
  auto a = a0;
  std::mt19937_64 gen(3);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    a = update_anchor(a, {Vec3(n(gen), n(gen), n(gen)), Vec3(n(gen), n(gen), n(gen))}, 0.02);
    ASSERT_EQ(a.anchor, a0.anchor);
  }
}

TEST(UpdateAnchor, GuidingExponentialSmoothing) {
  auto a = AnchorState::guiding(Vec3::Zero(), {1.0, 0.0, 0.0}, 0.0);
  a = update_anchor(a, {}, 0.02, 0.2);
  EXPECT_NEAR(a.anchor.x(), 1.0 - std::exp(-0.1), 1e-15);
  EXPECT_NEAR(a.anchor.x(), 0.0952, 1e-4);
  EXPECT_EQ(a.anchor.y(), 0.0);
}

TEST(UpdateAnchor, GuidingFixedPoint) {
  auto a = AnchorState::guiding(Vec3::Zero(), {0.3, 0.0, 0.0}, 0.0);
  a.anchor = a.smoothing_target;
  const Vec3 before = a.anchor;
  a = update_anchor(a, {}, 0.02);
  EXPECT_EQ(a.anchor, before);
}

TEST(UpdateAnchor, GuidingIsContinuous) {
  auto a = AnchorState::guiding(Vec3::Zero(), {0.5, -0.2, 0.1}, 0.0);
  const double dt = 0.02;
  for (int i = 0; i < 200; ++i) {
    const Vec3 prev = a.anchor;
    a = update_anchor(a, {}, dt);
    // Step never exceeds the remaining gap times (1 - e^{-dt/T}).
    EXPECT_LE((a.anchor - prev).norm(), (a.smoothing_target - prev).norm() * (1 - std::exp(-dt / 0.2)) + 1e-15);
  }
}

TEST(AnchorState, DirectionIsUnit) {
  const auto g = AnchorState::guiding({0.1, 0.1, 0.1}, {0.4, -0.3, 0.9}, 1.0);
  EXPECT_NEAR(g.direction.norm(), 1.0, 1e-12);
  const auto r = AnchorState::resistive(Vec3::Zero(), {3.0, 4.0, 0.0}, 1.0);
  EXPECT_NEAR(r.direction.norm(), 1.0, 1e-12);
  EXPECT_THROW(AnchorState::resistive(Vec3::Zero(), Vec3::Zero(), 0.0), ValidationError);
  const auto degenerate = AnchorState::guiding(Vec3::Ones(), Vec3::Ones(), 0.0, {0.0, 2.0, 0.0});
  EXPECT_EQ(degenerate.direction, Vec3::UnitY());
}

AnchorState along_x(const Vec3& anchor) {
  AnchorState s = AnchorState::resistive(anchor, Vec3::UnitX(), 0.0);
  return s;
}

TEST(InteractionForce, SpringLaw) {
  EXPECT_TRUE(interaction_force(along_x({0.1, 0.0, 0.0}), Vec3::Zero(), 100.0)
                  .isApprox(Vec3(10.0, 0.0, 0.0), 1e-14));
}

TEST(InteractionForce, OneSidedCutoff) {
  EXPECT_EQ(interaction_force(along_x({-0.05, 0.0, 0.0}), Vec3::Zero(), 100.0), Vec3::Zero());
  EXPECT_EQ(interaction_force(along_x({0.0, 0.2, 0.0}), Vec3::Zero(), 100.0), Vec3::Zero());
  EXPECT_EQ(interaction_force(along_x(Vec3::Zero()), Vec3::Zero(), 100.0), Vec3::Zero());
}

TEST(InteractionForce, InactiveIsZero) {
  AnchorState s;
  s.anchor = {1.0, 0.0, 0.0};
  EXPECT_EQ(interaction_force(s, Vec3::Zero(), 250.0), Vec3::Zero());
}

TEST(InteractionForce, CapAndOneSidednessProperties) {
  std::mt19937_64 gen(42);
  std::normal_distribution<double> n(0.0, 0.5);
  std::uniform_real_distribution<double> k(0.0, 250.0);
  for (int i = 0; i < 20000; ++i) {
    const auto s = (i % 2) ? AnchorState::resistive(Vec3(n(gen), n(gen), n(gen)), Vec3(n(gen), n(gen), n(gen)), 0.0)
                           : AnchorState::guiding(Vec3(n(gen), n(gen), n(gen)), Vec3(n(gen), n(gen), n(gen)), 0.0);
    const Vec3 x(n(gen), n(gen), n(gen));
    const Vec3 f = interaction_force(s, x, k(gen));
    EXPECT_GE(f.dot(s.direction), 0.0);
    EXPECT_LE(f.norm(), 30.0 + 1e-12);
    // Parallel to the activation direction.
    EXPECT_LE((f - f.dot(s.direction) * s.direction).norm(), 1e-12);
  }
}

TEST(BoundNetWrench, UnderLimitHasNoResidual) {
  LinkPositions f = zero_positions(), x = zero_positions();
  f[2] = {10.0, 0.0, 0.0};
  x[2] = {0.3, 0.0, 0.0};
  const auto r = bound_net_wrench(f, x, Vec3::Zero());
  EXPECT_EQ(r.torso_residual_force, Vec3::Zero());
  EXPECT_EQ(r.torso_residual_torque, Vec3::Zero());
  EXPECT_EQ(r.per_link_force, f);
}

TEST(BoundNetWrench, ForceResidual) {
  LinkPositions f = zero_positions(), x = zero_positions();
  f[2] = f[5] = {20.0, 0.0, 0.0};
  const auto r = bound_net_wrench(f, x, Vec3::Zero());
  EXPECT_TRUE(r.torso_residual_force.isApprox(Vec3(-10.0, 0.0, 0.0), 1e-14));
  EXPECT_EQ(r.torso_residual_torque, Vec3::Zero());
  EXPECT_EQ(r.per_link_force, f);
}

TEST(BoundNetWrench, TorqueResidual) {
  LinkPositions f = zero_positions(), x = zero_positions();
  const Vec3 torso(0.0, 0.0, 1.0);
  x[5] = torso + Vec3(1.0, 0.0, 0.0);
  f[5] = {0.0, 25.0, 0.0};  // torque (0, 0, 25)
  const auto r = bound_net_wrench(f, x, torso);
  EXPECT_EQ(r.torso_residual_force, Vec3::Zero());
  EXPECT_TRUE(r.torso_residual_torque.isApprox(Vec3(0.0, 0.0, -5.0), 1e-14));
}

TEST(BoundNetWrench, PropertyAgainstDirectSummation) {
  std::mt19937_64 gen(8);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> mag(0.0, 30.0);
  for (int trial = 0; trial < 5000; ++trial) {
    LinkPositions f, x;
    for (std::size_t l = 0; l < kNumLinks; ++l) {
      f[l] = Vec3(n(gen), n(gen), n(gen)).normalized() * mag(gen);
      x[l] = Vec3(n(gen), n(gen), n(gen)) * 0.5;
    }
    const Vec3 torso(n(gen) * 0.1, n(gen) * 0.1, n(gen) * 0.1);
    const auto r = bound_net_wrench(f, x, torso);
    Vec3 force = r.torso_residual_force, torque = r.torso_residual_torque;
    for (std::size_t l = 0; l < kNumLinks; ++l) {
      force += f[l];
      torque += (x[l] - torso).cross(f[l]);
    }
    EXPECT_LE(force.norm(), 30.0 + 1e-9);
    EXPECT_LE(torque.norm(), 20.0 + 1e-9);
    EXPECT_EQ(r.per_link_force, f);
  }
}

TEST(InteractionForce, ContinuousOverAnInterval) {
  // Link oscillating at the velocity clip through a fixed anchor while the
  // gain ramps; consecutive samples differ by at most k_max * v_clip * dt.
  const double dt = 0.02, v_clip = 4.0, k_max = 250.0;
  InteractionSchedule sched;
  sched.active.mask.fill(true);
  sched.hold_stiffness.fill(k_max);
  const auto anchor = AnchorState::resistive({0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, 0.0);
  Vec3 prev_f = Vec3::Zero();
  for (int n = 0; n <= 250; ++n) {
    const double t = n * dt;
    const Vec3 x(-0.1 * std::sin(t * v_clip / 0.1), 0.0, 0.0);
    const Vec3 f = interaction_force(anchor, x, schedule_gain(sched, 0, t));
    if (n > 0) EXPECT_LE((f - prev_f).norm(), k_max * v_clip * dt + 1e-9) << "t " << t;
    prev_f = f;
  }
}

}  // namespace
}  // namespace gentle::forcefield
