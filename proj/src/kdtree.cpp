#include "reloc/kdtree.hpp"

#include <algorithm>
#include <numeric>

namespace reloc {

namespace {
constexpr int kLeafSize = 8;
}

KdTree::KdTree(std::vector<Point3> points) : points_(std::move(points)) {
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0);
  if (!points_.empty()) {
    nodes_.reserve(2 * points_.size() / kLeafSize + 1);
    build(0, static_cast<int>(points_.size()));
  }
}

int KdTree::build(int begin, int end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{begin, end});
  if (end - begin <= kLeafSize) return id;

  Point3 lo = points_[order_[begin]], hi = lo;
  for (int i = begin; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  if (hi[axis] == lo[axis]) return id;  // all points coincide

  const int mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](int a, int b) { return points_[a][axis] < points_[b][axis]; });
  const double split = points_[order_[mid]][axis];
  const int left = build(begin, mid);
  const int right = build(mid, end);
  Node& n = nodes_[id];
  n.axis = axis;
  n.split = split;
  n.left = left;
  n.right = right;
  return id;
}

KdTree::Neighbor KdTree::nearest(const Point3& q, double max_dist2) const {
  Neighbor best;
  best.dist2 = max_dist2;
  if (!nodes_.empty()) search(0, q, best);
  if (best.index < 0) best.dist2 = std::numeric_limits<double>::infinity();
  return best;
}

void KdTree::search(int node_id, const Point3& q, Neighbor& best) const {
  const Node& n = nodes_[node_id];
  if (n.axis < 0) {
    for (int i = n.begin; i < n.end; ++i) {
      const int idx = order_[i];
      const double d2 = (points_[idx] - q).squaredNorm();
      if (d2 < best.dist2 || (d2 == best.dist2 && (best.index < 0 || idx < best.index))) {
        best.dist2 = d2;
        best.index = idx;
      }
    }
    return;
  }
  // Left holds coordinates <= split, right holds >= split.
  const double diff = q[n.axis] - n.split;
  const int first = diff <= 0.0 ? n.left : n.right;
  const int second = diff <= 0.0 ? n.right : n.left;
  search(first, q, best);
  if (diff * diff <= best.dist2) search(second, q, best);
}

}  // namespace reloc
