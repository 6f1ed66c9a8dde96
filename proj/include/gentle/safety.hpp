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

#ifndef GENTLE_SAFETY_HPP_
#define GENTLE_SAFETY_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "gentle/errors.hpp"
#include "gentle/links.hpp"
#include "gentle/random.hpp"

namespace gentle::safety {

// Position error at which the unlimited driving force reaches the threshold.
inline constexpr double kStiffnessErrorScale = 0.05;  // m

struct SafetyParams {
  double f1 = 5.0;                // N, lower end of the threshold range
  double f2 = 15.0;               // N, upper end
  double delta_tol = 10.0;        // N, penalty tolerance above the threshold
  double resample_period = 5.0;   // s
  double blend_window = 0.5;      // s, linear blend at each resample boundary

  void validate() const {
    detail::require(std::isfinite(f1) && f1 > 0.0, "safety: f1 must be > 0");
    detail::require(std::isfinite(f2) && f2 >= f1, "safety: f2 must be >= f1");
    detail::require(std::isfinite(delta_tol) && delta_tol >= 0.0, "safety: delta_tol must be >= 0");
    detail::require(std::isfinite(resample_period) && resample_period > 0.0,
                    "safety: resample_period must be > 0");
    detail::require(std::isfinite(blend_window) && blend_window >= 0.0 &&
                        blend_window <= resample_period,
                    "safety: blend_window must lie in [0, resample_period]");
  }
};

inline double derive_stiffness(double tau_safe) {
  detail::require(std::isfinite(tau_safe) && tau_safe > 0.0,
                  "derive_stiffness: tau_safe must be > 0");
  return tau_safe / kStiffnessErrorScale;
}

// min(1, tau / |f|) * f. The zero vector maps to itself.
inline Vec3 limit_driving_force(const Vec3& f_drive, double tau_safe) {
  detail::require(tau_safe > 0.0, "limit_driving_force: tau_safe must be > 0");
  const double n = f_drive.norm();
  if (n <= tau_safe) return f_drive;
  return f_drive * (tau_safe / n);
}

// Piecewise-constant threshold, one uniform draw from [f1, f2] per resample
// period, linearly blended from the previous value over `blend_window` after
// each boundary. Values are drawn lazily in interval order, so the sequence
// depends only on the stream, never on the query pattern.
class ThresholdSchedule {
 public:
  explicit ThresholdSchedule(SafetyParams params) : params_(params) { params_.validate(); }

  const SafetyParams& params() const { return params_; }

  std::size_t interval_of(double t) const {
    if (!(t >= 0.0) || !std::isfinite(t)) throw QueryError("threshold query at negative or non-finite time");
    return static_cast<std::size_t>(std::floor(t / params_.resample_period));
  }

  template <UniformSource R>
  double value_at(double t, R& rng) {
    const std::size_t k = interval_of(t);
    while (values_.size() <= k) values_.push_back(uniform(rng, params_.f1, params_.f2));
    const double since = t - static_cast<double>(k) * params_.resample_period;
    if (k == 0 || params_.blend_window <= 0.0 || since >= params_.blend_window) return values_[k];
    const double a = since / params_.blend_window;
    return std::clamp((1.0 - a) * values_[k - 1] + a * values_[k], params_.f1, params_.f2);
  }

  // Interior value of interval k (after the blend). Requires prior draws.
  double interval_value(std::size_t k) const { return values_.at(k); }

 private:
  SafetyParams params_;
  std::vector<double> values_;
};

template <UniformSource R>
double sample_threshold(ThresholdSchedule& schedule, R& rng, double t) {
  return schedule.value_at(t, rng);
}

}  // namespace gentle::safety

#endif  // GENTLE_SAFETY_HPP_
