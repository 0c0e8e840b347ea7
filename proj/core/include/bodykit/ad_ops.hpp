#pragma once

#include <memory>

#include "bodykit/anthro.hpp"
#include "bodykit/autodiff.hpp"
#include "bodykit/kdtree.hpp"
#include "bodykit/mesh.hpp"

namespace bodykit::ad {

// Laplacian smoothness penalty over a batch of flattened meshes
// (rows of x are xyz-interleaved 3V vectors): for each sample the sum
// over directed ring edges of ||w (x_v - x_n)||^2, averaged over the
// batch.
template <class T>
int laplacian_batch(Tape<T>& tape, int x, std::shared_ptr<const LaplacianWeights> lap) {
  const Mat<T>& xv = tape.value(x);
  const Eigen::Index V = lap->vertex_count();
  require(xv.cols() == 3 * V, "laplacian_batch: expected rows of 3V coordinates");
  const Eigen::Index batch = xv.rows();

  auto edge_term = [&](const Mat<T>& data, Eigen::Index row, int v, int n, int c) -> T {
    return data(row, 3 * v + c) - data(row, 3 * n + c);
  };

  T total = T(0);
  for (Eigen::Index r = 0; r < batch; ++r)
    for (int v = 0; v < V; ++v)
      for (int e = lap->ring_offsets[static_cast<std::size_t>(v)];
           e < lap->ring_offsets[static_cast<std::size_t>(v) + 1]; ++e) {
        const int n = lap->ring_vertices[static_cast<std::size_t>(e)];
        const T w = static_cast<T>(lap->weights[static_cast<std::size_t>(e)]);
        for (int c = 0; c < 3; ++c) {
          const T d = w * edge_term(xv, r, v, n, c);
          total += d * d;
        }
      }
  Mat<T> value(1, 1);
  value(0, 0) = total / static_cast<T>(batch);

  return tape.custom(std::move(value), {x}, [x, lap, V, batch](Tape<T>& t, int self) {
    if (!t.needs_grad(x)) return;
    const T g = t.grad(self)(0, 0) / static_cast<T>(batch);
    const Mat<T>& xv = t.value(x);
    Mat<T>& gx = t.grad(x);
    for (Eigen::Index r = 0; r < batch; ++r)
      for (int v = 0; v < V; ++v)
        for (int e = lap->ring_offsets[static_cast<std::size_t>(v)];
             e < lap->ring_offsets[static_cast<std::size_t>(v) + 1]; ++e) {
          const int n = lap->ring_vertices[static_cast<std::size_t>(e)];
          const T w = static_cast<T>(lap->weights[static_cast<std::size_t>(e)]);
          for (int c = 0; c < 3; ++c) {
            const T d = xv(r, 3 * v + c) - xv(r, 3 * n + c);
            // each undirected edge appears in both directed sums
            const T coeff = T(4) * w * w * d * g;
            gx(r, 3 * v + c) += coeff;
            gx(r, 3 * n + c) -= coeff;
          }
        }
  });
}

// Fixed registration target: point set plus its spatial index.
struct ChamferTarget {
  KdTree3::Points points;
  std::unique_ptr<KdTree3> tree;  // null when below the exhaustive-search threshold

  explicit ChamferTarget(KdTree3::Points pts) : points(std::move(pts)) {
    require(points.rows() > 0, "chamfer: empty point set");
    if (points.rows() >= 64) tree = std::make_unique<KdTree3>(points);
  }

  std::pair<int, double> nearest(const Eigen::Vector3d& q) const {
    if (tree) return tree->nearest(q);
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int j = 0; j < points.rows(); ++j) {
      const double d = (points.row(j).transpose() - q).norm();
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    return {best, best_d};
  }
};

// Symmetric mean nearest-neighbor distance from a variable V x 3 point
// matrix to a fixed target cloud. Matches bodykit::chamfer on values;
// the backward pass holds nearest-neighbor assignments fixed.
template <class T>
int chamfer_to_target(Tape<T>& tape, int x, std::shared_ptr<const ChamferTarget> target) {
  const Mat<T>& xv = tape.value(x);
  require(xv.cols() == 3 && xv.rows() > 0, "chamfer: expected a nonempty V x 3 point matrix");
  const Eigen::Index n = xv.rows();
  const Eigen::Index m = target->points.rows();

  Points pts(n, 3);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int c = 0; c < 3; ++c) pts(i, c) = static_cast<double>(xv(i, c));

  // forward direction: each variable point to its nearest target
  auto fwd_nn = std::make_shared<std::vector<int>>(static_cast<std::size_t>(n));
  double fwd_total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto [j, d] = target->nearest(pts.row(i).transpose());
    (*fwd_nn)[static_cast<std::size_t>(i)] = j;
    fwd_total += d;
  }

  // reverse direction: each target point to its nearest variable point
  auto rev_nn = std::make_shared<std::vector<int>>(static_cast<std::size_t>(m));
  double rev_total = 0.0;
  if (n >= 64) {
    const KdTree3 tree(pts);
    for (Eigen::Index j = 0; j < m; ++j) {
      const auto [i, d] = tree.nearest(target->points.row(j).transpose());
      (*rev_nn)[static_cast<std::size_t>(j)] = i;
      rev_total += d;
    }
  } else {
    for (Eigen::Index j = 0; j < m; ++j) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < n; ++i) {
        const double d = (pts.row(i) - target->points.row(j)).norm();
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(i);
        }
      }
      (*rev_nn)[static_cast<std::size_t>(j)] = best;
      rev_total += best_d;
    }
  }

  Mat<T> value(1, 1);
  value(0, 0) = static_cast<T>(0.5 * (fwd_total / static_cast<double>(n) +
                                      rev_total / static_cast<double>(m)));

  return tape.custom(std::move(value), {x}, [x, target, fwd_nn, rev_nn, n, m](Tape<T>& t, int self) {
    if (!t.needs_grad(x)) return;
    const T g = t.grad(self)(0, 0);
    const Mat<T>& xv = t.value(x);
    Mat<T>& gx = t.grad(x);
    const T eps = T(1e-12);
    const T wa = g * T(0.5) / static_cast<T>(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int j = (*fwd_nn)[static_cast<std::size_t>(i)];
      Eigen::Matrix<T, 1, 3> diff;
      for (int c = 0; c < 3; ++c) diff[c] = xv(i, c) - static_cast<T>(target->points(j, c));
      const T d = diff.norm();
      if (d > eps) gx.row(i) += (wa / d) * diff;
    }
    const T wb = g * T(0.5) / static_cast<T>(m);
    for (Eigen::Index j = 0; j < m; ++j) {
      const int i = (*rev_nn)[static_cast<std::size_t>(j)];
      Eigen::Matrix<T, 1, 3> diff;
      for (int c = 0; c < 3; ++c) diff[c] = xv(i, c) - static_cast<T>(target->points(j, c));
      const T d = diff.norm();
      if (d > eps) gx.row(i) += (wb / d) * diff;
    }
  });
}

// All registry measurements of a variable V x 3 vertex matrix, as a
// 1 x 36 row. Differentiable with respect to the vertices.
template <class T>
int measurements_op(Tape<T>& tape, int x, std::shared_ptr<const Registry> registry) {
  const Mat<T>& xv = tape.value(x);
  require(xv.cols() == 3, "measurements_op: expected V x 3 vertices");
  Points pts(xv.rows(), 3);
  for (Eigen::Index i = 0; i < xv.rows(); ++i)
    for (int c = 0; c < 3; ++c) pts(i, c) = static_cast<double>(xv(i, c));
  const Eigen::VectorXd measured = measure(pts, *registry);
  Mat<T> value(1, registry->size());
  for (int i = 0; i < registry->size(); ++i) value(0, i) = static_cast<T>(measured[i]);

  return tape.custom(std::move(value), {x}, [x, registry](Tape<T>& t, int self) {
    if (!t.needs_grad(x)) return;
    const Mat<T>& g = t.grad(self);
    const Mat<T>& xv = t.value(x);
    Mat<T>& gx = t.grad(x);
    const T eps = T(1e-12);
    auto accumulate_edge = [&](int a, int b, T weight) {
      Eigen::Matrix<T, 1, 3> diff = xv.row(a) - xv.row(b);
      const T d = diff.norm();
      if (d <= eps) return;
      diff *= weight / d;
      gx.row(a) += diff;
      gx.row(b) -= diff;
    };
    for (int i = 0; i < registry->size(); ++i) {
      const T gi = g(0, i);
      if (gi == T(0)) continue;
      const MeasurementDef& e = registry->entries[static_cast<std::size_t>(i)];
      if (e.kind == MeasureKind::kCircumference) {
        const int c_n = static_cast<int>(e.loop.size());
        for (int k = 0; k < c_n; ++k)
          accumulate_edge(e.loop[static_cast<std::size_t>(k)],
                          e.loop[static_cast<std::size_t>((k + 1) % c_n)], gi);
      } else {
        accumulate_edge(e.landmarks[0], e.landmarks[1], gi);
      }
    }
  });
}

}  // namespace bodykit::ad
