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

// Shape-aware hug pose optimization over a simplified upper body.
//
// Each arm is a 4-DoF chain: shoulder pitch, roll and yaw, then elbow pitch.
// The torso stands upright on a planar base (x, y, psi) at fixed height z0.
// The optimizer minimizes a sum of squared residuals
//
//   sum_{(l,k) in S} w_lk |p_l - b_k|^2
//     + w_t |xy(p_torso + delta * [cos psi, sin psi, 0]) - xy(b_front)|^2
//     + lambda_reg |q - q0|^2
//
// with a Levenberg-Marquardt iteration on the analytic residual Jacobian,
// projecting onto the joint limits after every step.

#ifndef GENTLE_HUGOPT_HPP_
#define GENTLE_HUGOPT_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gentle/errors.hpp"
#include "gentle/links.hpp"
#include "gentle/random.hpp"

namespace gentle::hug {

inline constexpr std::size_t kJointsPerArm = 4;
inline constexpr std::size_t kNumJoints = 2 * kJointsPerArm;
inline constexpr std::size_t kNumParams = kNumJoints + 3;  // joints, then x, y, psi

using JointAngles = Eigen::Matrix<double, kNumJoints, 1>;
using ParamVector = Eigen::Matrix<double, kNumParams, 1>;

// Link ids used by pair associations: the six tracked links, then the torso.
inline constexpr std::size_t kTorso = kNumLinks;

inline std::optional<std::size_t> body_point_index(std::string_view name) {
  if (name == "torso") return kTorso;
  return link_index(name);
}

inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

struct BaseState {
  double x = 0.0;
  double y = 0.0;
  double psi = 0.0;  // heading, wrapped to (-pi, pi]
};

struct JointLimit {
  double min = -std::numbers::pi;
  double max = std::numbers::pi;
};

struct UpperBodyModel {
  double z0 = 0.9;  // m, torso height
  Vec3 left_shoulder_offset{0.0, 0.15, 0.35};
  Vec3 right_shoulder_offset{0.0, -0.15, 0.35};
  std::array<double, 2> upper_arm = {0.25, 0.25};  // left, right
  std::array<double, 2> forearm = {0.25, 0.25};
  JointAngles q = JointAngles::Zero();
  std::array<JointLimit, kNumJoints> limits = {{
      {-3.0, 2.6}, {-1.6, 2.2}, {-2.6, 2.6}, {-1.0, 2.1},   // left
      {-3.0, 2.6}, {-2.2, 1.6}, {-2.6, 2.6}, {-1.0, 2.1},   // right
  }};

  void validate() const {
    detail::require(std::isfinite(z0), "model: z0 must be finite");
    for (int s = 0; s < 2; ++s) {
      detail::require(upper_arm[s] > 0.0 && forearm[s] > 0.0, "model: segment lengths must be > 0");
    }
    for (const auto& l : limits) detail::require(l.min <= l.max, "model: joint limit min > max");
  }

  JointAngles project(JointAngles q_in) const {
    for (std::size_t j = 0; j < kNumJoints; ++j) {
      q_in[static_cast<Eigen::Index>(j)] =
          std::clamp(q_in[static_cast<Eigen::Index>(j)], limits[j].min, limits[j].max);
    }
    return q_in;
  }

  bool within_limits(const JointAngles& q_in) const {
    for (std::size_t j = 0; j < kNumJoints; ++j) {
      const double v = q_in[static_cast<Eigen::Index>(j)];
      if (v < limits[j].min || v > limits[j].max) return false;
    }
    return true;
  }
};

// World positions of the six links and the torso, plus the joint axes needed
// for the Jacobian.
struct BodyPoints {
  LinkPositions links;
  Vec3 torso;

  const Vec3& operator[](std::size_t id) const { return id == kTorso ? torso : links.at(id); }
};

namespace detail_fk {

inline Eigen::Matrix3d rot(const Vec3& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis).toRotationMatrix();
}

struct ArmFrames {
  Vec3 shoulder, elbow, hand;
  std::array<Vec3, kJointsPerArm> axes;  // world-frame joint axes
};

// Pitch joints turn about -y so a positive angle swings the segment forward;
// roll is about +x, yaw about the upper-arm axis. The rest pose hangs along -z.
inline ArmFrames arm(const Eigen::Matrix3d& base_rot, const Vec3& shoulder, double upper,
                     double fore, const double* q) {
  const Vec3 pitch_axis = -Vec3::UnitY();
  const Eigen::Matrix3d r_pitch = rot(pitch_axis, q[0]);
  const Eigen::Matrix3d r_roll = rot(Vec3::UnitX(), q[1]);
  const Eigen::Matrix3d r_yaw = rot(Vec3::UnitZ(), q[2]);
  const Eigen::Matrix3d r_elbow = rot(pitch_axis, q[3]);
  const Eigen::Matrix3d r_upper = base_rot * r_pitch * r_roll * r_yaw;

  ArmFrames f;
  f.shoulder = shoulder;
  f.elbow = shoulder + r_upper * Vec3(0.0, 0.0, -upper);
  f.hand = f.elbow + r_upper * r_elbow * Vec3(0.0, 0.0, -fore);
  f.axes = {base_rot * pitch_axis, base_rot * r_pitch * Vec3::UnitX(),
            base_rot * r_pitch * r_roll * Vec3::UnitZ(), r_upper * pitch_axis};
  return f;
}

inline Eigen::Matrix3d base_rotation(double psi) { return rot(Vec3::UnitZ(), psi); }

}  // namespace detail_fk

inline BodyPoints forward_kinematics(const UpperBodyModel& model, const JointAngles& q,
                                     const BaseState& base) {
  const Eigen::Matrix3d rb = detail_fk::base_rotation(base.psi);
  const Vec3 torso(base.x, base.y, model.z0);
  const auto left = detail_fk::arm(rb, torso + rb * model.left_shoulder_offset,
                                   model.upper_arm[0], model.forearm[0], q.data());
  const auto right = detail_fk::arm(rb, torso + rb * model.right_shoulder_offset,
                                    model.upper_arm[1], model.forearm[1], q.data() + kJointsPerArm);
  BodyPoints out;
  out.torso = torso;
  out.links = {left.shoulder, left.elbow, left.hand, right.shoulder, right.elbow, right.hand};
  return out;
}

inline BodyPoints forward_kinematics(const UpperBodyModel& model, const BaseState& base) {
  return forward_kinematics(model, model.q, base);
}

struct PairTarget {
  std::size_t link = 0;    // 0..5 tracked links, kTorso for the torso
  std::size_t target = 0;  // index into waist points
  double weight = 1.0;
};

struct HugTargets {
  std::vector<Vec3> waist;
  std::optional<Vec3> front;  // defaults to the waist centroid
  std::vector<PairTarget> pairs;
  double torso_weight = 1.0;
  double delta = 0.05;  // m, forward torso offset
  double lambda_reg = 0.01;
  JointAngles q0 = JointAngles::Zero();

  Vec3 front_point() const {
    if (front) return *front;
    detail::require(!waist.empty(), "hug targets: no waist points");
    Vec3 c = Vec3::Zero();
    for (const auto& b : waist) c += b;
    return c / static_cast<double>(waist.size());
  }

  void validate() const {
    detail::require(torso_weight >= 0.0 && lambda_reg >= 0.0, "hug targets: weights must be >= 0");
    detail::require(std::isfinite(delta), "hug targets: delta must be finite");
    for (const auto& p : pairs) {
      detail::require(p.weight >= 0.0, "hug targets: pair weight must be >= 0");
      detail::require(p.link <= kTorso, "hug targets: unknown link");
      detail::require(p.target < waist.size(), "hug targets: pair references missing waist point");
    }
  }

  // Hands to the far side of the back waist, elbows to the opposite-side waist.
  static std::vector<PairTarget> preset_pairs() {
    return {{static_cast<std::size_t>(Link::kLeftHand), 0, 1.0},
            {static_cast<std::size_t>(Link::kRightHand), 1, 1.0},
            {static_cast<std::size_t>(Link::kLeftElbow), 2, 1.0},
            {static_cast<std::size_t>(Link::kRightElbow), 3, 1.0}};
  }
};

inline ParamVector pack(const JointAngles& q, const BaseState& base) {
  ParamVector p;
  p.head<kNumJoints>() = q;
  p[kNumJoints] = base.x;
  p[kNumJoints + 1] = base.y;
  p[kNumJoints + 2] = base.psi;
  return p;
}

inline std::pair<JointAngles, BaseState> unpack(const ParamVector& p) {
  return {p.head<kNumJoints>(), BaseState{p[kNumJoints], p[kNumJoints + 1], p[kNumJoints + 2]}};
}

// Weighted residuals whose squared norm is the objective, and optionally the
// Jacobian with respect to (q, x, y, psi).
inline Eigen::VectorXd hug_residuals(const UpperBodyModel& model, const JointAngles& q,
                                     const BaseState& base, const HugTargets& targets,
                                     Eigen::MatrixXd* jacobian = nullptr) {
  const auto n_pairs = static_cast<Eigen::Index>(targets.pairs.size());
  const Eigen::Index rows = 3 * n_pairs + 2 + static_cast<Eigen::Index>(kNumJoints);
  Eigen::VectorXd r(rows);
  if (jacobian) jacobian->setZero(rows, kNumParams);

  const Eigen::Matrix3d rb = detail_fk::base_rotation(base.psi);
  const Vec3 torso(base.x, base.y, model.z0);
  const auto left = detail_fk::arm(rb, torso + rb * model.left_shoulder_offset,
                                   model.upper_arm[0], model.forearm[0], q.data());
  const auto right = detail_fk::arm(rb, torso + rb * model.right_shoulder_offset,
                                    model.upper_arm[1], model.forearm[1], q.data() + kJointsPerArm);

  Eigen::Index row = 0;
  for (const auto& pair : targets.pairs) {
    const double s = std::sqrt(pair.weight);
    Vec3 p;
    const detail_fk::ArmFrames* arm = nullptr;
    std::size_t depth = 0;  // joints of the arm that move this point
    switch (pair.link) {
      case 0: arm = &left; p = left.shoulder; break;
      case 1: arm = &left; p = left.elbow; depth = 3; break;
      case 2: arm = &left; p = left.hand; depth = 4; break;
      case 3: arm = &right; p = right.shoulder; break;
      case 4: arm = &right; p = right.elbow; depth = 3; break;
      case 5: arm = &right; p = right.hand; depth = 4; break;
      default: p = torso; break;
    }
    r.segment<3>(row) = s * (p - targets.waist[pair.target]);
    if (jacobian) {
      auto& J = *jacobian;
      const std::size_t offset = arm == &right ? kJointsPerArm : 0;
      for (std::size_t j = 0; j < depth; ++j) {
        const Vec3& pivot = j < 3 ? arm->shoulder : arm->elbow;
        J.block<3, 1>(row, static_cast<Eigen::Index>(offset + j)) = s * arm->axes[j].cross(p - pivot);
      }
      J.block<3, 1>(row, kNumJoints) = s * Vec3::UnitX();
      J.block<3, 1>(row, kNumJoints + 1) = s * Vec3::UnitY();
      J.block<3, 1>(row, kNumJoints + 2) = s * Vec3::UnitZ().cross(p - torso);
    }
    row += 3;
  }

  const double st = std::sqrt(targets.torso_weight);
  const Vec3 front = targets.front_point();
  const double c = std::cos(base.psi);
  const double sn = std::sin(base.psi);
  r[row] = st * (base.x + targets.delta * c - front.x());
  r[row + 1] = st * (base.y + targets.delta * sn - front.y());
  if (jacobian) {
    auto& J = *jacobian;
    J(row, kNumJoints) = st;
    J(row + 1, kNumJoints + 1) = st;
    J(row, kNumJoints + 2) = -st * targets.delta * sn;
    J(row + 1, kNumJoints + 2) = st * targets.delta * c;
  }
  row += 2;

  const double sr = std::sqrt(targets.lambda_reg);
  r.segment<kNumJoints>(row) = sr * (q - targets.q0);
  if (jacobian) jacobian->block<kNumJoints, kNumJoints>(row, 0) = sr * Eigen::Matrix<double, kNumJoints, kNumJoints>::Identity();
  return r;
}

inline double hug_objective(const UpperBodyModel& model, const JointAngles& q,
                            const BaseState& base, const HugTargets& targets) {
  return hug_residuals(model, q, base, targets).squaredNorm();
}

inline double hug_objective(const UpperBodyModel& model, const BaseState& base,
                            const HugTargets& targets) {
  return hug_objective(model, model.q, base, targets);
}

// Gradient of the objective, 2 J^T r.
inline ParamVector hug_gradient(const UpperBodyModel& model, const JointAngles& q,
                                const BaseState& base, const HugTargets& targets) {
  Eigen::MatrixXd J;
  const Eigen::VectorXd r = hug_residuals(model, q, base, targets, &J);
  return 2.0 * J.transpose() * r;
}

struct OptimizeOptions {
  int max_iterations = 2000;
  double min_improvement = 1e-8;
  int restarts = 8;
  std::uint64_t seed = 0;
  double initial_damping = 1e-3;
  double base_jitter = 0.3;  // m, spread of restart base positions around the init
};

struct HugResult {
  JointAngles q = JointAngles::Zero();
  BaseState base;
  double cost = 0.0;
  int iterations = 0;             // accepted steps of the winning start
  int total_iterations = 0;       // across all starts
  std::size_t winning_start = 0;  // 0 is the caller's initial guess
  std::vector<double> cost_trace; // winning start, one entry per accepted iterate
};

namespace detail_opt {

inline void require_finite_cost(double cost, int iteration) {
  if (!std::isfinite(cost)) {
    throw std::runtime_error("hug optimization: non-finite cost at iteration " +
                             std::to_string(iteration));
  }
}

inline HugResult descend(const UpperBodyModel& model, const HugTargets& targets, JointAngles q,
                         BaseState base, const OptimizeOptions& opt) {
  q = model.project(q);
  base.psi = wrap_angle(base.psi);
  Eigen::MatrixXd J;
  Eigen::VectorXd r = hug_residuals(model, q, base, targets, &J);
  double cost = r.squaredNorm();
  require_finite_cost(cost, 0);

  HugResult out;
  out.cost_trace.push_back(cost);
  double mu = opt.initial_damping;
  int it = 0;
  while (it < opt.max_iterations && cost > 0.0) {
    const Eigen::Matrix<double, kNumParams, kNumParams> jtj = J.transpose() * J;
    const ParamVector g = J.transpose() * r;
    bool accepted = false;
    double improvement = 0.0;
    while (mu < 1e12) {
      Eigen::Matrix<double, kNumParams, kNumParams> a = jtj;
      a.diagonal().array() += mu * (1.0 + jtj.diagonal().array());
      const ParamVector step = a.ldlt().solve(-g);
      auto [q_new, base_new] = unpack(pack(q, base) + step);
      q_new = model.project(q_new);
      base_new.psi = wrap_angle(base_new.psi);
      Eigen::MatrixXd J_new;
      Eigen::VectorXd r_new = hug_residuals(model, q_new, base_new, targets, &J_new);
      const double cost_new = r_new.squaredNorm();
      require_finite_cost(cost_new, it + 1);
      if (cost_new < cost) {
        improvement = cost - cost_new;
        q = q_new;
        base = base_new;
        r = std::move(r_new);
        J = std::move(J_new);
        cost = cost_new;
        mu = std::max(mu / 3.0, 1e-12);
        accepted = true;
        break;
      }
      mu *= 4.0;
    }
    if (!accepted) break;
    ++it;
    out.cost_trace.push_back(cost);
    if (improvement < opt.min_improvement) break;
  }
  out.q = q;
  out.base = base;
  out.cost = cost;
  out.iterations = it;
  out.total_iterations = it;
  return out;
}

}  // namespace detail_opt

// Local descent from the initial guess, then from `restarts` seeded random
// starts (joint angles uniform within limits, base jittered around the
// initial guess, heading uniform). Returns the lowest-cost result.
inline HugResult optimize_hug(const UpperBodyModel& model, const HugTargets& targets,
                              const JointAngles& q_init, const BaseState& base_init,
                              const OptimizeOptions& opt = {}) {
  model.validate();
  targets.validate();
  detail::require(model.within_limits(q_init), "optimize_hug: initial joints outside limits");

  HugResult best = detail_opt::descend(model, targets, q_init, base_init, opt);
  int total = best.total_iterations;
  RandomStream rng = RandomStream::derive(opt.seed, "hug-restarts");
  for (int s = 1; s <= opt.restarts; ++s) {
    JointAngles q;
    for (std::size_t j = 0; j < kNumJoints; ++j) {
      q[static_cast<Eigen::Index>(j)] = uniform(rng, model.limits[j].min, model.limits[j].max);
    }
    BaseState b{base_init.x + uniform(rng, -opt.base_jitter, opt.base_jitter),
                base_init.y + uniform(rng, -opt.base_jitter, opt.base_jitter),
                uniform(rng, -std::numbers::pi, std::numbers::pi)};
    HugResult cand = detail_opt::descend(model, targets, q, b, opt);
    total += cand.total_iterations;
    if (cand.cost < best.cost) {
      best = std::move(cand);
      best.winning_start = static_cast<std::size_t>(s);
    }
  }
  best.total_iterations = total;
  return best;
}

}  // namespace gentle::hug

#endif  // GENTLE_HUGOPT_HPP_
