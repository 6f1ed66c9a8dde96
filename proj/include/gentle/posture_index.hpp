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

// Exact k-nearest-neighbour index over upper-body postures, used to pick
// guiding anchors that are kinematically consistent with the current pose.
//
// Postures are 18-D vectors (6 links x xyz, canonical order) compared by
// Euclidean distance. Ties are broken by ordinal (clip order, then frame), so
// results match a linear scan exactly.

#ifndef GENTLE_POSTURE_INDEX_HPP_
#define GENTLE_POSTURE_INDEX_HPP_

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <queue>
#include <span>
#include <utility>
#include <vector>

#include "gentle/errors.hpp"
#include "gentle/links.hpp"
#include "gentle/motion_clip.hpp"
#include "gentle/random.hpp"

namespace gentle::motion {

inline constexpr std::size_t kPostureDim = 3 * kNumLinks;
using PostureVector = std::array<double, kPostureDim>;

inline PostureVector flatten(const LinkPositions& p) {
  PostureVector v;
  for (std::size_t l = 0; l < kNumLinks; ++l) {
    for (std::size_t c = 0; c < 3; ++c) v[3 * l + c] = p[l][static_cast<Eigen::Index>(c)];
  }
  return v;
}

inline LinkPositions unflatten(const PostureVector& v) {
  LinkPositions p;
  for (std::size_t l = 0; l < kNumLinks; ++l) p[l] = {v[3 * l], v[3 * l + 1], v[3 * l + 2]};
  return p;
}

inline double squared_distance(const PostureVector& a, const PostureVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < kPostureDim; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

struct Posture {
  LinkPositions links;
  std::size_t clip = 0;
  std::size_t frame = 0;
  std::size_t ordinal = 0;  // position in the index's global frame order
};

struct Neighbor {
  std::size_t ordinal = 0;
  double squared_distance = 0.0;

  // Lexicographic on (distance, ordinal); strict weak order used everywhere.
  friend bool operator<(const Neighbor& a, const Neighbor& b) {
    if (a.squared_distance != b.squared_distance) return a.squared_distance < b.squared_distance;
    return a.ordinal < b.ordinal;
  }
};

class PostureIndex {
 public:
  static constexpr std::size_t kLeafSize = 8;

  explicit PostureIndex(std::vector<Posture> postures) : postures_(std::move(postures)) {
    detail::require(!postures_.empty(), "posture index needs at least one posture");
    points_.reserve(postures_.size());
    for (std::size_t i = 0; i < postures_.size(); ++i) {
      postures_[i].ordinal = i;
      points_.push_back(flatten(postures_[i].links));
      detail::require(std::all_of(points_.back().begin(), points_.back().end(),
                                  [](double x) { return std::isfinite(x); }),
                      "posture index: non-finite posture");
    }
    order_.resize(points_.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    nodes_.reserve(2 * points_.size() / kLeafSize + 2);
    build(0, order_.size());
  }

  std::size_t size() const { return postures_.size(); }
  const Posture& posture(std::size_t ordinal) const { return postures_.at(ordinal); }

  // k nearest postures, closest first. Returns min(k, size()) entries; with a
  // cutoff, only postures within `max_distance` are considered.
  std::vector<Neighbor> nearest(const PostureVector& query, std::size_t k,
                                double max_distance = std::numeric_limits<double>::infinity()) const {
    detail::require(k >= 1, "nearest: k must be >= 1");
    Search s{query, std::min(k, size()), max_distance * max_distance, {}};
    search(0, s);
    std::vector<Neighbor> out;
    out.reserve(s.heap.size());
    while (!s.heap.empty()) {
      out.push_back(s.heap.top());
      s.heap.pop();
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

  std::vector<Neighbor> nearest(const LinkPositions& query, std::size_t k) const {
    return nearest(flatten(query), k);
  }

 private:
  struct Node {
    // Leaf when split_dim < 0; then [begin, end) indexes order_.
    int split_dim = -1;
    double split_value = 0.0;
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t left = 0;
    std::size_t right = 0;
  };

  struct Search {
    const PostureVector& query;
    std::size_t k;
    double max_sq;
    std::priority_queue<Neighbor> heap;  // worst on top

    bool full() const { return heap.size() >= k; }

    void offer(const Neighbor& n) {
      if (n.squared_distance > max_sq) return;
      if (!full()) {
        heap.push(n);
      } else if (n < heap.top()) {
        heap.pop();
        heap.push(n);
      }
    }
  };

  std::size_t build(std::size_t begin, std::size_t end) {
    const std::size_t id = nodes_.size();
    nodes_.push_back({});
    if (end - begin <= kLeafSize) {
      nodes_[id].begin = begin;
      nodes_[id].end = end;
      return id;
    }
    // Split on the dimension of widest spread at the median.
    int best_dim = 0;
    double best_spread = -1.0;
    for (std::size_t d = 0; d < kPostureDim; ++d) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (std::size_t i = begin; i < end; ++i) {
        lo = std::min(lo, points_[order_[i]][d]);
        hi = std::max(hi, points_[order_[i]][d]);
      }
      if (hi - lo > best_spread) {
        best_spread = hi - lo;
        best_dim = static_cast<int>(d);
      }
    }
    if (best_spread <= 0.0) {  // all identical
      nodes_[id].begin = begin;
      nodes_[id].end = end;
      return id;
    }
    const std::size_t mid = begin + (end - begin) / 2;
    const auto dim = static_cast<std::size_t>(best_dim);
    std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                     order_.begin() + static_cast<std::ptrdiff_t>(mid),
                     order_.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](std::size_t a, std::size_t b) { return points_[a][dim] < points_[b][dim]; });
    const double split = points_[order_[mid]][dim];
    const std::size_t left = build(begin, mid);
    const std::size_t right = build(mid, end);
    nodes_[id].split_dim = best_dim;
    nodes_[id].split_value = split;
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  // Left child holds values <= split, right child values >= split.
  void search(std::size_t node_id, Search& s) const {
    const Node& node = nodes_[node_id];
    if (node.split_dim < 0) {
      for (std::size_t i = node.begin; i < node.end; ++i) {
        const std::size_t ord = order_[i];
        s.offer({ord, squared_distance(points_[ord], s.query)});
      }
      return;
    }
    const double diff = s.query[static_cast<std::size_t>(node.split_dim)] - node.split_value;
    const std::size_t near = diff <= 0.0 ? node.left : node.right;
    const std::size_t far = diff <= 0.0 ? node.right : node.left;
    search(near, s);
    const double plane_sq = diff * diff;
    // Equal distances must still be visited so ordinal tie-breaks stay exact.
    if (plane_sq > s.max_sq) return;
    if (!s.full() || plane_sq <= s.heap.top().squared_distance) search(far, s);
  }

  std::vector<Posture> postures_;
  std::vector<PostureVector> points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

inline PostureIndex build_posture_index(std::span<const MotionClip> clips) {
  detail::require(!clips.empty(), "build_posture_index: no clips");
  std::vector<Posture> postures;
  for (std::size_t c = 0; c < clips.size(); ++c) {
    for (std::size_t f = 0; f < clips[c].frames.size(); ++f) {
      postures.push_back({clips[c].frames[f], c, f, 0});
    }
  }
  return PostureIndex(std::move(postures));
}

inline constexpr std::size_t kDefaultNeighborhood = 32;

// Uniform choice among the k postures nearest to `current`. The whole posture
// is returned so every active link takes its anchor from the same frame.
template <UniformSource R>
const Posture& sample_guiding_posture(const PostureIndex& index, const LinkPositions& current,
                                      R& rng, std::size_t k = kDefaultNeighborhood,
                                      double max_distance = std::numeric_limits<double>::infinity()) {
  auto near = index.nearest(flatten(current), k, max_distance);
  if (near.empty()) near = index.nearest(flatten(current), 1);
  return index.posture(near[uniform_index(rng, near.size())].ordinal);
}

}  // namespace gentle::motion

#endif  // GENTLE_POSTURE_INDEX_HPP_
