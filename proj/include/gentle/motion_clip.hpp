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

// Motion clips: 50 Hz sequences of upper-body link positions in the root
// frame, stored in a plain text container.
//
//   format=gentle-clip-v1 rate=50 links=6
//   x y z  x y z  ... (18 numbers, canonical link order) [| joint values...]
//
// Lines starting with '#' and blank lines are ignored.

#ifndef GENTLE_MOTION_CLIP_HPP_
#define GENTLE_MOTION_CLIP_HPP_

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gentle/errors.hpp"
#include "gentle/links.hpp"
#include "gentle/refdyn.hpp"

namespace gentle::motion {

inline constexpr std::string_view kClipFormat = "gentle-clip-v1";
inline constexpr double kDefaultFrameRate = 50.0;

struct MotionClip {
  std::string name;
  double frame_rate = kDefaultFrameRate;
  std::vector<LinkPositions> frames;
  std::vector<std::vector<double>> joints;  // empty, or one vector per frame
  std::vector<std::string> warnings;

  double duration() const {
    return frames.empty() ? 0.0 : static_cast<double>(frames.size() - 1) / frame_rate;
  }

  bool operator==(const MotionClip& o) const {
    return name == o.name && frame_rate == o.frame_rate && frames == o.frames &&
           joints == o.joints;
  }
};

// Linear interpolation of link positions, finite-difference velocity between
// the bracketing frames. Past the last frame the clip holds still.
inline refdyn::TargetFrame sample_clip(const MotionClip& clip, double t) {
  detail::require(!clip.frames.empty(), "sample_clip: clip has no frames");
  detail::require(std::isfinite(t) && t >= 0.0, "sample_clip: time must be >= 0");
  refdyn::TargetFrame out;
  const double f = t * clip.frame_rate;
  const auto last = clip.frames.size() - 1;
  const double i_floor = std::floor(f);
  if (i_floor >= static_cast<double>(last)) {
    for (std::size_t l = 0; l < kNumLinks; ++l) out[l] = {clip.frames[last][l], Vec3::Zero()};
    return out;
  }
  const auto i = static_cast<std::size_t>(i_floor);
  const double a = f - i_floor;
  for (std::size_t l = 0; l < kNumLinks; ++l) {
    const Vec3& p0 = clip.frames[i][l];
    const Vec3& p1 = clip.frames[i + 1][l];
    out[l] = {(1.0 - a) * p0 + a * p1, (p1 - p0) * clip.frame_rate};
  }
  return out;
}

namespace detail_clip {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace detail_clip

// Decimal or scientific notation. Returns nullopt on malformed text; NaN and
// infinity parse successfully so callers can report them precisely.
inline std::optional<double> parse_double(std::string_view tok) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  const auto* end = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end || tok.empty()) return std::nullopt;
  return v;
}

inline MotionClip load_clip(std::istream& in, std::string name = "clip", double v_clip = 4.0) {
  MotionClip clip;
  clip.name = std::move(name);

  std::string raw;
  std::size_t line_no = 0;
  bool have_header = false;
  std::optional<std::size_t> joint_count;

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = detail_clip::trim(raw);
    if (line.empty() || line.front() == '#') continue;

    if (!have_header) {
      bool format_ok = false;
      bool links_ok = false;
      for (auto tok : detail_clip::split_ws(line)) {
        const auto eq = tok.find('=');
        if (eq == std::string_view::npos) throw ParseError("malformed header field '" + std::string(tok) + "'", line_no);
        const auto key = tok.substr(0, eq);
        const auto val = tok.substr(eq + 1);
        if (key == "format") {
          if (val != kClipFormat) throw ParseError("unsupported format '" + std::string(val) + "'", line_no);
          format_ok = true;
        } else if (key == "rate") {
          const auto r = parse_double(val);
          if (!r || !std::isfinite(*r) || *r <= 0.0) throw ParseError("invalid frame rate", line_no);
          clip.frame_rate = *r;
        } else if (key == "links") {
          if (val != "6") throw ParseError("expected links=6, got links=" + std::string(val), line_no);
          links_ok = true;
        } else {
          throw ParseError("unknown header field '" + std::string(key) + "'", line_no);
        }
      }
      if (!format_ok) throw ParseError("header is missing format=gentle-clip-v1", line_no);
      if (!links_ok) throw ParseError("header is missing links=6", line_no);
      have_header = true;
      continue;
    }

    const std::size_t frame = clip.frames.size();
    const std::string where = "frame " + std::to_string(frame);
    const auto bar = line.find('|');
    const auto coords = detail_clip::split_ws(line.substr(0, bar));
    if (coords.size() != 3 * kNumLinks) {
      throw ParseError(where + ": expected 18 coordinates, found " + std::to_string(coords.size()),
                       line_no);
    }
    LinkPositions p;
    for (std::size_t c = 0; c < coords.size(); ++c) {
      const auto v = parse_double(coords[c]);
      if (!v) throw ParseError(where + ": malformed number '" + std::string(coords[c]) + "'", line_no);
      if (!std::isfinite(*v)) throw ParseError(where + ": non-finite coordinate " + std::to_string(c), line_no);
      p[c / 3][static_cast<Eigen::Index>(c % 3)] = *v;
    }

    std::vector<double> q;
    if (bar != std::string_view::npos) {
      for (auto tok : detail_clip::split_ws(line.substr(bar + 1))) {
        const auto v = parse_double(tok);
        if (!v) throw ParseError(where + ": malformed joint value '" + std::string(tok) + "'", line_no);
        if (!std::isfinite(*v)) throw ParseError(where + ": non-finite joint value", line_no);
        q.push_back(*v);
      }
    }
    if (!joint_count) joint_count = q.size();
    if (q.size() != *joint_count) {
      throw ParseError(where + ": joint vector length " + std::to_string(q.size()) +
                           " differs from " + std::to_string(*joint_count),
                       line_no);
    }
    clip.frames.push_back(p);
    if (!q.empty()) clip.joints.push_back(std::move(q));
  }

  if (!have_header) throw ParseError("missing header line");
  if (clip.frames.size() < 2) throw ParseError("a clip needs at least 2 frames");

  const double max_step = v_clip / clip.frame_rate;
  for (std::size_t f = 1; f < clip.frames.size(); ++f) {
    for (std::size_t l = 0; l < kNumLinks; ++l) {
      const double d = (clip.frames[f][l] - clip.frames[f - 1][l]).norm();
      if (d > max_step) {
        clip.warnings.push_back("frame " + std::to_string(f) + ": " + std::string(kLinkNames[l]) +
                                " moves " + std::to_string(d) + " m in one frame");
      }
    }
  }
  return clip;
}

inline MotionClip load_clip_file(const std::filesystem::path& path, double v_clip = 4.0) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open clip file " + path.string());
  return load_clip(in, path.stem().string(), v_clip);
}

inline std::string format_double(double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

inline void write_clip(std::ostream& out, const MotionClip& clip) {
  out << "format=" << kClipFormat << " rate=" << format_double(clip.frame_rate) << " links=6\n";
  for (std::size_t f = 0; f < clip.frames.size(); ++f) {
    for (std::size_t l = 0; l < kNumLinks; ++l) {
      for (int c = 0; c < 3; ++c) {
        if (l + c > 0) out << ' ';
        out << format_double(clip.frames[f][l][c]);
      }
    }
    if (!clip.joints.empty()) {
      out << " |";
      for (double q : clip.joints.at(f)) out << ' ' << format_double(q);
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("failed writing clip " + clip.name);
}

}  // namespace gentle::motion

#endif  // GENTLE_MOTION_CLIP_HPP_
