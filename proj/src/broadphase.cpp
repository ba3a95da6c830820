/*
 Copyright 2026 The wbmpc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#include "wbmpc/broadphase.hpp"

#include <cmath>
#include <algorithm>
#include <numeric>

namespace wbmpc {

AabbTree::AabbTree(std::span<const Aabb> boxes) {
  if (boxes.empty()) return;
  std::vector<Vec3> centers;
  centers.reserve(boxes.size());
  for (const auto& b : boxes) centers.push_back(b.center());
  std::vector<int> items(boxes.size());
  std::iota(items.begin(), items.end(), 0);
  nodes_.reserve(2 * boxes.size());
  build(items, 0, static_cast<int>(items.size()), boxes, centers);
}

int AabbTree::build(std::vector<int>& items, int begin, int end, std::span<const Aabb> boxes,
                    const std::vector<Vec3>& centers) {
  const int index = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  if (end - begin == 1) {
    nodes_[index].box = boxes[items[begin]];
    nodes_[index].item = items[begin];
    return index;
  }
  Vec3 lo = centers[items[begin]], hi = lo;
  for (int i = begin; i < end; ++i) {
    lo = lo.cwiseMin(centers[items[i]]);
    hi = hi.cwiseMax(centers[items[i]]);
  }
  int axis;
  (hi - lo).maxCoeff(&axis);
  const int mid = begin + (end - begin) / 2;
  std::nth_element(items.begin() + begin, items.begin() + mid, items.begin() + end,
                   [&](int a, int b) {
                     const double ca = centers[a][axis], cb = centers[b][axis];
                     return ca < cb || (ca == cb && a < b);
                   });
  const int left = build(items, begin, mid, boxes, centers);
  const int right = build(items, mid, end, boxes, centers);
  nodes_[index].left = left;
  nodes_[index].right = right;
  nodes_[index].box = nodes_[left].box.merged(nodes_[right].box);
  return index;
}

std::vector<int> AabbTree::items_under(int node) const {
  std::vector<int> out;
  std::vector<int> stack{node};
  while (!stack.empty()) {
    const Node& n = nodes_[stack.back()];
    stack.pop_back();
    if (n.item >= 0) {
      out.push_back(n.item);
    } else {
      stack.push_back(n.left);
      stack.push_back(n.right);
    }
  }
  return out;
}

namespace {

// Signed distances may be negative, so overlapping boxes give no bound at all.
double lower_bound(const Aabb& a, const Aabb& b) {
  return a.overlaps(b) ? -std::numeric_limits<double>::infinity() : a.distance(b);
}

}  // namespace

AabbTree::Nearest AabbTree::nearest(const Aabb& query, const ExactQuery& exact,
                                    Trace* trace) const {
  Nearest best;
  double best_d = std::numeric_limits<double>::infinity();
  if (nodes_.empty()) return best;
  std::vector<std::pair<int, double>> stack{{0, lower_bound(query, nodes_[0].box)}};
  while (!stack.empty()) {
    const auto [index, bound] = stack.back();
    stack.pop_back();
    // The slack absorbs rounding in the box bound so exact ties are still visited.
    if (bound > best_d + 1e-12 * (1.0 + std::abs(best_d))) {
      if (trace) trace->pruned.push_back({index, bound, best_d});
      continue;
    }
    const Node& n = nodes_[index];
    if (n.item >= 0) {
      const DistanceResult r = exact(n.item);
      if (trace) ++trace->exact_queries;
      if (r.signed_distance < best_d || (r.signed_distance == best_d && n.item < best.item)) {
        best_d = r.signed_distance;
        best.item = n.item;
        best.result = r;
      }
      continue;
    }
    const double bl = lower_bound(query, nodes_[n.left].box);
    const double br = lower_bound(query, nodes_[n.right].box);
    // Push the farther child first so the nearer one is explored first.
    if (bl <= br) {
      stack.push_back({n.right, br});
      stack.push_back({n.left, bl});
    } else {
      stack.push_back({n.left, bl});
      stack.push_back({n.right, br});
    }
  }
  return best;
}

}  // namespace wbmpc
