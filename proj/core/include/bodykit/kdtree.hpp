#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "bodykit/util.hpp"

namespace bodykit {

// Static 3-d kd-tree for nearest-neighbor queries over a point set.
// Median split on the widest axis, leaves of up to 8 points.
class KdTree3 {
 public:
  using Points = Eigen::Matrix<double, Eigen::Dynamic, 3>;

  KdTree3() = default;

  explicit KdTree3(const Points& points) : points_(points) {
    require(points_.rows() > 0, "kd-tree: empty point set");
    order_.resize(static_cast<std::size_t>(points_.rows()));
    std::iota(order_.begin(), order_.end(), 0);
    nodes_.reserve(order_.size() / kLeafSize * 2 + 2);
    root_ = build(0, static_cast<int>(order_.size()));
  }

  int size() const { return static_cast<int>(points_.rows()); }

  // Index of the nearest stored point and the (unsquared) distance.
  std::pair<int, double> nearest(const Eigen::Vector3d& q) const {
    int best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    search(root_, q, best, best_d2);
    return {best, std::sqrt(best_d2)};
  }

 private:
  static constexpr int kLeafSize = 8;

  struct Node {
    double split = 0.0;
    int axis = -1;   // -1 marks a leaf
    int left = -1;   // child node or [begin,end) range for leaves
    int right = -1;
  };

  Points points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int root_ = -1;

  int build(int begin, int end) {
    Node node;
    if (end - begin <= kLeafSize) {
      node.left = begin;
      node.right = end;
      nodes_.push_back(node);
      return static_cast<int>(nodes_.size()) - 1;
    }
    Eigen::Vector3d lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
    Eigen::Vector3d hi = -lo;
    for (int i = begin; i < end; ++i) {
      const auto p = points_.row(order_[static_cast<std::size_t>(i)]);
      for (int a = 0; a < 3; ++a) {
        lo[a] = std::min(lo[a], p[a]);
        hi[a] = std::max(hi[a], p[a]);
      }
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);
    const int mid = (begin + end) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](int a, int b) { return points_(a, axis) < points_(b, axis); });
    node.axis = axis;
    node.split = points_(order_[static_cast<std::size_t>(mid)], axis);
    const int self = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    const int left = build(begin, mid);
    const int right = build(mid, end);
    nodes_[static_cast<std::size_t>(self)].left = left;
    nodes_[static_cast<std::size_t>(self)].right = right;
    return self;
  }

  void search(int idx, const Eigen::Vector3d& q, int& best, double& best_d2) const {
    const Node& node = nodes_[static_cast<std::size_t>(idx)];
    if (node.axis < 0) {
      for (int i = node.left; i < node.right; ++i) {
        const int pi = order_[static_cast<std::size_t>(i)];
        const double d2 = (points_.row(pi).transpose() - q).squaredNorm();
        if (d2 < best_d2) {
          best_d2 = d2;
          best = pi;
        }
      }
      return;
    }
    const double delta = q[node.axis] - node.split;
    const int near = delta < 0.0 ? node.left : node.right;
    const int far = delta < 0.0 ? node.right : node.left;
    search(near, q, best, best_d2);
    if (delta * delta < best_d2) search(far, q, best, best_d2);
  }
};

}  // namespace bodykit
