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

#ifndef GENTLE_REWARDS_HPP_
#define GENTLE_REWARDS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <tuple>
#include <utility>

#include "gentle/errors.hpp"
#include "gentle/links.hpp"

namespace gentle::rewards {

struct RewardConfig {
  // Kernel widths. Not given with the weights; chosen to match the 5 cm / 10 N
  // regime of the tracking stiffness.
  double sigma_x = 0.1;       // m
  double sigma_v = 0.5;       // m/s
  double sigma_f = 5.0;       // N
  double sigma_root = 0.1;    // m
  double sigma_joint = 0.5;   // rad

  double w_dyn = 2.0;
  double w_force = 2.0;
  double w_pen = 6.0;
  double w_root = 0.5;
  double w_joint = 1.0;

  double delta_tol = 10.0;  // N

  void validate() const {
    for (double s : {sigma_x, sigma_v, sigma_f, sigma_root, sigma_joint}) {
      detail::require(std::isfinite(s) && s > 0.0, "rewards: kernel widths must be > 0");
    }
    detail::require(delta_tol >= 0.0, "rewards: delta_tol must be >= 0");
  }
};

struct RewardBreakdown {
  double r_dyn = 0.0;
  double r_force = 0.0;
  double r_pen = 0.0;
  double r_root = 0.0;
  double r_joint = 0.0;
  double total = 0.0;
};

// Euclidean norm of the concatenated difference a - b.
inline double stacked_distance(std::span<const Vec3> a, std::span<const Vec3> b) {
  detail::require(a.size() == b.size(), "rewards: mismatched link counts");
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sq += (a[i] - b[i]).squaredNorm();
  return std::sqrt(sq);
}

inline double kernel(double err, double sigma) { return std::exp(-err / sigma); }

inline double r_dyn(std::span<const Vec3> x_sim, std::span<const Vec3> x_ref,
                    std::span<const Vec3> v_sim, std::span<const Vec3> v_ref,
                    const RewardConfig& cfg = {}) {
  return kernel(stacked_distance(x_sim, x_ref), cfg.sigma_x) +
         kernel(stacked_distance(v_sim, v_ref), cfg.sigma_v);
}

inline double r_force(std::span<const Vec3> f_pred, std::span<const Vec3> f_sim,
                      const RewardConfig& cfg = {}) {
  return kernel(stacked_distance(f_pred, f_sim), cfg.sigma_f);
}

// -1 when |f| exceeds tau_safe + delta_tol.
inline double r_pen(double force_norm, double tau_safe, const RewardConfig& cfg = {}) {
  detail::require(tau_safe > 0.0, "r_pen: tau_safe must be > 0");
  return force_norm > tau_safe + cfg.delta_tol ? -1.0 : 0.0;
}

inline double r_pen(const Vec3& f_interact, double tau_safe, const RewardConfig& cfg = {}) {
  return r_pen(f_interact.norm(), tau_safe, cfg);
}

// The threshold is per link, so the indicator fires on the worst link.
inline double r_pen(std::span<const Vec3> f_interact, double tau_safe,
                    const RewardConfig& cfg = {}) {
  double worst = 0.0;
  for (const Vec3& f : f_interact) worst = std::max(worst, f.norm());
  return r_pen(worst, tau_safe, cfg);
}

struct TrackingErrors {
  double root = 0.0;   // m
  double joint = 0.0;  // rad
};

inline std::pair<double, double> tracking_rewards(double root_err, double joint_err,
                                                  const RewardConfig& cfg = {}) {
  detail::require(root_err >= 0.0 && joint_err >= 0.0, "tracking errors must be >= 0");
  return {kernel(root_err, cfg.sigma_root), kernel(joint_err, cfg.sigma_joint)};
}

// Weighted sum of the compliance terms, plus the tracking terms when given.
inline RewardBreakdown compliance_total(double r_dyn_value, double r_force_value,
                                        double r_pen_value, const RewardConfig& cfg = {},
                                        std::optional<TrackingErrors> tracking = std::nullopt) {
  RewardBreakdown b;
  b.r_dyn = r_dyn_value;
  b.r_force = r_force_value;
  b.r_pen = r_pen_value;
  b.total = cfg.w_dyn * b.r_dyn + cfg.w_force * b.r_force + cfg.w_pen * b.r_pen;
  if (tracking) {
    std::tie(b.r_root, b.r_joint) = tracking_rewards(tracking->root, tracking->joint, cfg);
    b.total += cfg.w_root * b.r_root + cfg.w_joint * b.r_joint;
  }
  return b;
}

}  // namespace gentle::rewards

#endif  // GENTLE_REWARDS_HPP_
