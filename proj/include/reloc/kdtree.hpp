#pragma once

#include "reloc/types.hpp"

#include <cstdint>
#include <limits>
#include <vector>

namespace reloc {

/// Static 3-d tree for exact nearest-neighbor queries.
class KdTree {
 public:
  struct Neighbor {
    int index = -1;  // -1 when nothing lies within the search radius
    double dist2 = std::numeric_limits<double>::infinity();
  };

  KdTree() = default;
  explicit KdTree(std::vector<Point3> points);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const std::vector<Point3>& points() const { return points_; }

  /// Nearest point with squared distance <= max_dist2 (smallest index on ties).
  Neighbor nearest(const Point3& q,
                   double max_dist2 = std::numeric_limits<double>::infinity()) const;

 private:
  struct Node {
    int begin = 0, end = 0;  // range in order_
    int left = -1, right = -1;
    int axis = -1;  // -1 for a leaf
    double split = 0.0;
  };

  int build(int begin, int end);
  void search(int node, const Point3& q, Neighbor& best) const;

  std::vector<Point3> points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
};

}  // namespace reloc
