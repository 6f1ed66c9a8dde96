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

// Text formats for optimize-hug.
//
// Model file (key = value):
//   z0 = 0.9
//   left_shoulder = 0 0.15 0.35        right_shoulder = 0 -0.15 0.35
//   upper_arm = 0.25 0.25              forearm = 0.25 0.25   (left right)
//   q_init = <8 angles>                base_init = x y psi
//   limits_min = <8 angles>            limits_max = <8 angles>
//
// Targets file, one record per line:
//   waist <x> <y> <z>
//   front <x> <y> <z>
//   pair <link-name> <target-index> <weight>
//   torso_weight <w> | delta <m> | lambda <l> | q0 <8 angles>

#ifndef GENTLE_HUGOPT_IO_HPP_
#define GENTLE_HUGOPT_IO_HPP_

#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <string>
#include <vector>

#include "gentle/errors.hpp"
#include "gentle/hugopt.hpp"
#include "gentle/keyvalue.hpp"
#include "gentle/motion_clip.hpp"

namespace gentle::hug {

struct ModelFile {
  UpperBodyModel model;
  BaseState base_init;
};

inline ModelFile parse_model(std::istream& in) {
  const auto doc = kv::Document::parse(in);
  doc.allow_sections({""});
  ModelFile out;
  const auto* s = doc.section("");
  if (!s) return out;
  s->allow_only({"z0", "left_shoulder", "right_shoulder", "upper_arm", "forearm", "q_init", "base_init",
                 "limits_min", "limits_max"});
  auto& m = out.model;
  s->read("z0", m.z0);
  s->read("left_shoulder", m.left_shoulder_offset);
  s->read("right_shoulder", m.right_shoulder_offset);
  if (auto v = s->numbers("upper_arm", 2)) m.upper_arm = {(*v)[0], (*v)[1]};
  if (auto v = s->numbers("forearm", 2)) m.forearm = {(*v)[0], (*v)[1]};
  if (auto v = s->numbers("limits_min", kNumJoints)) {
    for (std::size_t j = 0; j < kNumJoints; ++j) m.limits[j].min = (*v)[j];
  }
  if (auto v = s->numbers("limits_max", kNumJoints)) {
    for (std::size_t j = 0; j < kNumJoints; ++j) m.limits[j].max = (*v)[j];
  }
  if (auto v = s->numbers("q_init", kNumJoints)) {
    for (std::size_t j = 0; j < kNumJoints; ++j) m.q[static_cast<Eigen::Index>(j)] = (*v)[j];
  }
  if (auto v = s->numbers("base_init", 3)) out.base_init = {(*v)[0], (*v)[1], wrap_angle((*v)[2])};
  try {
    m.validate();
  } catch (const ValidationError& e) {
    throw ParseError(e.what());
  }
  if (!m.within_limits(m.q)) throw ParseError("q_init lies outside the joint limits", s->line_of("q_init"));
  return out;
}

inline HugTargets parse_hug_targets(std::istream& in) {
  HugTargets t;
  std::string raw;
  std::size_t line_no = 0;
  auto nums = [&](const std::vector<std::string_view>& tok, std::size_t from, std::size_t count) {
    if (tok.size() != from + count) {
      throw ParseError("'" + std::string(tok[0]) + "' expects " + std::to_string(count) + " values", line_no);
    }
    std::vector<double> v;
    for (std::size_t i = from; i < tok.size(); ++i) {
      const auto x = motion::parse_double(tok[i]);
      if (!x || !std::isfinite(*x)) throw ParseError("malformed number '" + std::string(tok[i]) + "'", line_no);
      v.push_back(*x);
    }
    return v;
  };
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tok = motion::detail_clip::split_ws(line);
    if (tok.empty()) continue;
    const auto kind = tok[0];
    if (kind == "waist") {
      const auto v = nums(tok, 1, 3);
      t.waist.emplace_back(v[0], v[1], v[2]);
    } else if (kind == "front") {
      const auto v = nums(tok, 1, 3);
      t.front = Vec3(v[0], v[1], v[2]);
    } else if (kind == "pair") {
      if (tok.size() != 4) throw ParseError("'pair' expects <link-name> <target-index> <weight>", line_no);
      const auto link = body_point_index(tok[1]);
      if (!link) throw ParseError("unknown link '" + std::string(tok[1]) + "'", line_no);
      const auto idx = motion::parse_double(tok[2]);
      if (!idx || *idx < 0 || *idx != std::floor(*idx)) throw ParseError("target index must be a non-negative integer", line_no);
      const auto w = motion::parse_double(tok[3]);
      if (!w || !std::isfinite(*w) || *w < 0) throw ParseError("pair weight must be >= 0", line_no);
      t.pairs.push_back({*link, static_cast<std::size_t>(*idx), *w});
    } else if (kind == "torso_weight") {
      t.torso_weight = nums(tok, 1, 1)[0];
    } else if (kind == "delta") {
      t.delta = nums(tok, 1, 1)[0];
    } else if (kind == "lambda") {
      t.lambda_reg = nums(tok, 1, 1)[0];
    } else if (kind == "q0") {
      const auto v = nums(tok, 1, kNumJoints);
      for (std::size_t j = 0; j < kNumJoints; ++j) t.q0[static_cast<Eigen::Index>(j)] = v[j];
    } else {
      throw ParseError("unknown record '" + std::string(kind) + "'", line_no);
    }
  }
  if (t.waist.empty()) throw ParseError("targets file has no waist points");
  try {
    t.validate();
  } catch (const ValidationError& e) {
    throw ParseError(e.what());
  }
  return t;
}

template <typename Parser>
auto parse_file(const std::filesystem::path& path, Parser parser) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  try {
    return parser(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace gentle::hug

#endif  // GENTLE_HUGOPT_IO_HPP_
