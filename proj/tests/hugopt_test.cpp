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

#include "gentle/hugopt.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "gentle/hugopt_io.hpp"

namespace gentle::hug {
namespace {

constexpr double kPi = std::numbers::pi;

JointAngles joints(std::initializer_list<double> v) {
  JointAngles q;
  Eigen::Index i = 0;
  for (double x : v) q[i++] = x;
  return q;
}

TEST(ForwardKinematics, RestPoseHangsDown) {
  const UpperBodyModel m;
  const auto p = forward_kinematics(m, BaseState{});
  EXPECT_TRUE(p.torso.isApprox(Vec3(0.0, 0.0, 0.9)));
  EXPECT_TRUE(p.links[0].isApprox(Vec3(0.0, 0.15, 1.25)));
  EXPECT_TRUE(p.links[1].isApprox(Vec3(0.0, 0.15, 1.0)));
  EXPECT_TRUE(p.links[2].isApprox(Vec3(0.0, 0.15, 0.75)));
  EXPECT_TRUE(p.links[5].isApprox(Vec3(0.0, -0.15, 0.75)));
}

TEST(ForwardKinematics, ShoulderPitchRaisesArmForward) {
  UpperBodyModel m;
  m.q = joints({kPi / 2, 0, 0, 0, 0, 0, 0, 0});
  const auto p = forward_kinematics(m, BaseState{});
  EXPECT_LE((p.links[2] - Vec3(0.5, 0.15, 1.25)).norm(), 1e-12);
  EXPECT_LE((p.links[1] - Vec3(0.25, 0.15, 1.25)).norm(), 1e-12);
  // Right arm unaffected.
  EXPECT_LE((p.links[5] - Vec3(0.0, -0.15, 0.75)).norm(), 1e-12);
}

TEST(ForwardKinematics, ElbowAndRoll) {
  UpperBodyModel m;
  m.q = joints({0, 0, 0, kPi / 2, 0, kPi / 6, 0, 0});
  const auto p = forward_kinematics(m, BaseState{});
  EXPECT_LE((p.links[2] - Vec3(0.25, 0.15, 1.0)).norm(), 1e-12);
  // Roll by +30 deg about +x swings the right arm toward +y.
  const double r = 0.5;
  EXPECT_LE((p.links[5] - Vec3(0.0, -0.15 + r * std::sin(kPi / 6), 1.25 - r * std::cos(kPi / 6))).norm(), 1e-12);
}

TEST(ForwardKinematics, HeadingRotatesAboutTorso) {
  const UpperBodyModel m;
  const auto p = forward_kinematics(m, BaseState{0.0, 0.0, kPi / 2});
  EXPECT_LE((p.links[0] - Vec3(-0.15, 0.0, 1.25)).norm(), 1e-12);
}

TEST(ForwardKinematics, TranslationEquivariance) {
  UpperBodyModel m;
  m.q = joints({0.3, -0.2, 0.5, 0.9, -0.4, 0.1, -0.3, 1.2});
  const auto a = forward_kinematics(m, BaseState{0.2, -0.1, 0.7});
  const auto b = forward_kinematics(m, BaseState{1.2, 1.9, 0.7});
  for (std::size_t l = 0; l < kNumLinks; ++l) {
    EXPECT_LE((b.links[l] - a.links[l] - Vec3(1.0, 2.0, 0.0)).norm(), 1e-12);
  }
  EXPECT_LE((b.torso - a.torso - Vec3(1.0, 2.0, 0.0)).norm(), 1e-12);
}

TEST(WrapAngle, HalfOpenInterval) {
  EXPECT_DOUBLE_EQ(wrap_angle(kPi), kPi);
  EXPECT_DOUBLE_EQ(wrap_angle(-kPi), kPi);
  EXPECT_NEAR(wrap_angle(3 * kPi / 2), -kPi / 2, 1e-12);
  EXPECT_NEAR(wrap_angle(-7.0), -7.0 + 2 * kPi, 1e-12);
}

// Targets built from the pose (q, base): hands and elbows to four waist
// points, front point on the torso heading line.
HugTargets targets_from(const UpperBodyModel& m, const JointAngles& q, const BaseState& base, double lambda) {
  const auto p = forward_kinematics(m, q, base);
  HugTargets t;
  t.waist = {p.links[2], p.links[5], p.links[1], p.links[4]};
  t.pairs = HugTargets::preset_pairs();
  t.front = p.torso + t.delta * Vec3(std::cos(base.psi), std::sin(base.psi), 0.0);
  t.front->z() = 1.0;  // only xy matters
  t.lambda_reg = lambda;
  t.q0 = q;
  return t;
}

TEST(HugObjective, ZeroAtConstructedMinimum) {
  const UpperBodyModel m;
  const JointAngles q = joints({0.8, 0.3, -0.2, 1.0, 0.7, -0.4, 0.1, 1.3});
  const BaseState b{0.4, -0.2, 0.3};
  EXPECT_NEAR(hug_objective(m, q, b, targets_from(m, q, b, 0.0)), 0.0, 1e-28);
  // Regularizer vanishes at the neutral pose.
  EXPECT_NEAR(hug_objective(m, q, b, targets_from(m, q, b, 0.5)), 0.0, 1e-28);
}

TEST(HugObjective, SingleDisplacedTarget) {
  const UpperBodyModel m;
  const JointAngles q = joints({0.8, 0.3, -0.2, 1.0, 0.7, -0.4, 0.1, 1.3});
  const BaseState b{0.4, -0.2, 0.3};
  auto t = targets_from(m, q, b, 0.0);
  t.waist[0] += Vec3(0.0, 0.1, 0.0);
  EXPECT_NEAR(hug_objective(m, q, b, t), 0.01, 1e-15);
}

TEST(HugObjective, DefaultFrontIsWaistCentroid) {
  HugTargets t;
  t.waist = {{1.0, 0.0, 1.0}, {0.0, 1.0, 0.0}};
  EXPECT_EQ(t.front_point(), Vec3(0.5, 0.5, 0.5));
}

TEST(HugObjective, TranslationInvariance) {
  const UpperBodyModel m;
  const JointAngles q = joints({0.1, 0.2, 0.3, 0.4, -0.1, -0.2, -0.3, 0.5});
  HugTargets t;
  t.waist = {{0.4, 0.1, 0.9}, {0.4, -0.1, 0.9}, {0.3, 0.2, 1.0}, {0.3, -0.2, 1.0}};
  t.pairs = HugTargets::preset_pairs();
  const double c0 = hug_objective(m, q, {0.05, 0.02, 0.2}, t);
  for (auto& w : t.waist) w += Vec3(3.0, -2.0, 0.0);
  const double c1 = hug_objective(m, q, {3.05, -1.98, 0.2}, t);
  EXPECT_NEAR(c0, c1, 1e-12 * std::max(1.0, c0));
}

// Independent oracle: central differences of the scalar objective.
ParamVector central_difference(const UpperBodyModel& m, const ParamVector& x, const HugTargets& t, double h) {
  ParamVector g;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    ParamVector a = x, b = x;
    a[i] += h;
    b[i] -= h;
    const auto [qa, ba] = unpack(a);
    const auto [qb, bb] = unpack(b);
    g[i] = (hug_objective(m, qa, ba, t) - hug_objective(m, qb, bb, t)) / (2 * h);
  }
  return g;
}

TEST(HugGradient, MatchesCentralDifferences) {
  const UpperBodyModel m;
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> u(0.0, 1.0), w(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    JointAngles q;
    for (std::size_t j = 0; j < kNumJoints; ++j) {
      q[static_cast<Eigen::Index>(j)] = m.limits[j].min + (0.1 + 0.8 * u(gen)) * (m.limits[j].max - m.limits[j].min);
    }
    const BaseState b{w(gen), w(gen), 3.0 * w(gen)};
    HugTargets t;
    t.waist = {{w(gen), w(gen), 1.0}, {w(gen), w(gen), 0.9}, {w(gen), w(gen), 1.1}, {w(gen), w(gen), 1.0}};
    t.pairs = HugTargets::preset_pairs();
    t.pairs.push_back({kTorso, 0, 0.5});
    t.pairs.push_back({0, 1, 0.3});
    t.lambda_reg = 0.05;
    t.q0 = JointAngles::Constant(0.2);
    const ParamVector g = hug_gradient(m, q, b, t);
    const ParamVector g_fd = central_difference(m, pack(q, b), t, 1e-6);
    EXPECT_LT((g - g_fd).norm() / std::max(g_fd.norm(), 1e-8), 1e-4) << "trial " << trial;
  }
}

TEST(OptimizeHug, InverseCrimeRecovery) {
  const UpperBodyModel m;
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(0.15, 0.85), w(-0.5, 0.5);
  for (int trial = 0; trial < 5; ++trial) {
    JointAngles q_star;
    for (std::size_t j = 0; j < kNumJoints; ++j) {
      q_star[static_cast<Eigen::Index>(j)] = m.limits[j].min + u(gen) * (m.limits[j].max - m.limits[j].min);
    }
    const BaseState b_star{w(gen), w(gen), 2.0 * w(gen)};
    const auto t = targets_from(m, q_star, b_star, 0.0);
    OptimizeOptions opt;
    opt.seed = static_cast<std::uint64_t>(trial);
    const auto r = optimize_hug(m, t, JointAngles::Zero(), BaseState{}, opt);
    EXPECT_LT(r.cost, 1e-4) << "trial " << trial;
    EXPECT_TRUE(m.within_limits(r.q));
  }
}

TEST(OptimizeHug, AlreadyOptimalReturnsInit) {
  const UpperBodyModel m;
  const JointAngles q = joints({0.5, 0.2, 0.1, 0.6, 0.5, -0.2, -0.1, 0.6});
  const BaseState b{0.1, 0.2, 0.3};
  const auto r = optimize_hug(m, targets_from(m, q, b, 0.01), q, b);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_EQ(r.winning_start, 0u);
  EXPECT_EQ(r.q, q);
  EXPECT_EQ(r.base.x, b.x);
  EXPECT_EQ(r.base.psi, b.psi);
  EXPECT_EQ(r.cost, 0.0);
}

TEST(OptimizeHug, UnreachableTargetDescendsMonotonically) {
  const UpperBodyModel m;
  HugTargets t;
  t.waist = {{0.0, 0.0, 11.0}, {10.0, 0.0, 1.0}, {0.3, 0.2, 1.0}, {0.3, -0.2, 1.0}};
  t.pairs = HugTargets::preset_pairs();
  OptimizeOptions opt;
  opt.restarts = 3;
  const auto r = optimize_hug(m, t, JointAngles::Zero(), BaseState{}, opt);
  ASSERT_GE(r.cost_trace.size(), 2u);
  for (std::size_t i = 1; i < r.cost_trace.size(); ++i) EXPECT_LE(r.cost_trace[i], r.cost_trace[i - 1]);
  EXPECT_TRUE(std::isfinite(r.cost));
  EXPECT_TRUE(m.within_limits(r.q));
  EXPECT_GT(r.base.psi, -kPi);
  EXPECT_LE(r.base.psi, kPi);
}

TEST(OptimizeHug, RejectsInfeasibleInit) {
  const UpperBodyModel m;
  HugTargets t;
  t.waist = {Vec3::Zero()};
  EXPECT_THROW(optimize_hug(m, t, JointAngles::Constant(10.0), BaseState{}), ValidationError);
}

TEST(OptimizeHug, NonFiniteCostAborts) {
  const UpperBodyModel m;
  HugTargets t;
  t.waist = {Vec3(1e308, 1e308, 1e308)};
  t.pairs = {{2, 0, 1e10}};
  EXPECT_THROW(optimize_hug(m, t, JointAngles::Zero(), BaseState{}), std::runtime_error);
}

TEST(HugFiles, ParseModelAndTargets) {
  std::istringstream model(
      "z0 = 1.0\n"
      "upper_arm = 0.3 0.3\n"
      "base_init = 0.1 0 0\n");
  const auto mf = parse_model(model);
  EXPECT_EQ(mf.model.z0, 1.0);
  EXPECT_EQ(mf.model.upper_arm[1], 0.3);
  EXPECT_EQ(mf.base_init.x, 0.1);

  std::istringstream targets(
      "# preset\n"
      "waist 0.35 -0.1 1.0\n"
      "waist 0.35 0.1 1.0\n"
      "front 0.3 0 1.0\n"
      "pair l_hand 0 1\n"
      "pair torso 1 0.5\n"
      "lambda 0\n");
  const auto t = parse_hug_targets(targets);
  ASSERT_EQ(t.pairs.size(), 2u);
  EXPECT_EQ(t.pairs[1].link, kTorso);
  EXPECT_EQ(t.pairs[1].weight, 0.5);
  EXPECT_EQ(t.lambda_reg, 0.0);
  ASSERT_TRUE(t.front.has_value());

  std::istringstream bad("waist 0 0 0\npair l_hand 3 1\n");
  EXPECT_THROW(parse_hug_targets(bad), ParseError);
  std::istringstream bad_link("waist 0 0 0\npair nose 0 1\n");
  EXPECT_THROW(parse_hug_targets(bad_link), ParseError);
  std::istringstream bad_model("q_init = 9 9 9 9 9 9 9 9\n");
  EXPECT_THROW(parse_model(bad_model), ParseError);
}

}  // namespace
}  // namespace gentle::hug
