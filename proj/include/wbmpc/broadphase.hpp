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
#pragma once

#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "wbmpc/geometry.hpp"

namespace wbmpc {

/// Binary AABB hierarchy for nearest-body queries. Built by splitting at the
/// median centroid along the axis of largest centroid spread.
class AabbTree {
 public:
  struct Node {
    Aabb box;
    int left = -1;   // child node indices, -1 for leaves
    int right = -1;
    int item = -1;   // leaf payload: index into the boxes given at construction
  };

  struct Nearest {
    int item = -1;
    DistanceResult result;
  };

  /// Filled by nearest() when requested; lets tests audit pruning decisions.
  struct Trace {
    int exact_queries = 0;
    struct Pruned {
      int node;
      double lower_bound;
      double best;
    };
    std::vector<Pruned> pruned;
  };

  using ExactQuery = std::function<DistanceResult(int item)>;

  AabbTree() = default;
  explicit AabbTree(std::span<const Aabb> boxes);

  /// Smallest signed distance between `query` and the items, computed by
  /// `exact` on leaves that survive pruning. A subtree is skipped only when its
  /// box lies strictly farther than the best distance found so far; equal
  /// distances resolve to the lowest item index.
  Nearest nearest(const Aabb& query, const ExactQuery& exact, Trace* trace = nullptr) const;

  const std::vector<Node>& nodes() const { return nodes_; }
  int root() const { return nodes_.empty() ? -1 : 0; }
  std::vector<int> items_under(int node) const;
  bool empty() const { return nodes_.empty(); }

 private:
  int build(std::vector<int>& items, int begin, int end, std::span<const Aabb> boxes,
            const std::vector<Vec3>& centers);
  std::vector<Node> nodes_;
};

}  // namespace wbmpc
