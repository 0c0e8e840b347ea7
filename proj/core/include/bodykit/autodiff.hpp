#pragma once

#include <Eigen/Core>
#include <cmath>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

#include "bodykit/params.hpp"
#include "bodykit/util.hpp"

namespace bodykit::ad {

// Dynamic reverse-mode tape. Nodes are created by forward calls and hold
// dense 2-d values; backward() runs one reverse sweep over the creation
// order, so every reachable node is visited exactly once. The tape is
// rebuilt each training step.
template <class T>
class Tape {
 public:
  struct Node {
    Mat<T> value;
    Mat<T> grad;  // lazily allocated
    std::function<void(Tape&, int)> backward;
    Param<T>* param = nullptr;
    bool needs_grad = false;
  };

  int constant(Mat<T> v) {
    nodes_.push_back(Node{std::move(v), {}, {}, nullptr, false});
    return last();
  }

  // Differentiable leaf bound to a parameter; gradients accumulate into
  // the parameter after backward().
  int leaf(Param<T>& p) {
    nodes_.push_back(Node{p.value, {}, {}, &p, true});
    return last();
  }

  int size() const { return static_cast<int>(nodes_.size()); }
  const Mat<T>& value(int i) const { return nodes_[idx(i)].value; }
  bool needs_grad(int i) const { return nodes_[idx(i)].needs_grad; }

  Mat<T>& grad(int i) {
    Node& n = nodes_[idx(i)];
    if (!n.grad.size()) n.grad = Mat<T>::Zero(n.value.rows(), n.value.cols());
    return n.grad;
  }

  // Extension point for ops defined outside this header.
  int custom(Mat<T> value, const std::vector<int>& parents,
             std::function<void(Tape&, int)> backward) {
    bool needs = false;
    for (int p : parents) needs = needs || nodes_[idx(p)].needs_grad;
    Node n;
    n.value = std::move(value);
    n.needs_grad = needs;
    if (needs) n.backward = std::move(backward);
    nodes_.push_back(std::move(n));
    return last();
  }

  // ---- dense ops ----

  int matmul(int a, int b) {
    Mat<T> v = value(a) * value(b);
    return custom(std::move(v), {a, b}, [a, b](Tape& t, int self) {
      const Mat<T>& g = t.grad(self);
      if (t.needs_grad(a)) t.grad(a).noalias() += g * t.value(b).transpose();
      if (t.needs_grad(b)) t.grad(b).noalias() += t.value(a).transpose() * g;
    });
  }

  int add(int a, int b) {
    check_same_shape(a, b, "add");
    return custom(value(a) + value(b), {a, b}, [a, b](Tape& t, int self) {
      const Mat<T>& g = t.grad(self);
      if (t.needs_grad(a)) t.grad(a) += g;
      if (t.needs_grad(b)) t.grad(b) += g;
    });
  }

  int sub(int a, int b) {
    check_same_shape(a, b, "sub");
    return custom(value(a) - value(b), {a, b}, [a, b](Tape& t, int self) {
      const Mat<T>& g = t.grad(self);
      if (t.needs_grad(a)) t.grad(a) += g;
      if (t.needs_grad(b)) t.grad(b) -= g;
    });
  }

  // x: N x F, bias: 1 x F broadcast over rows.
  int add_rowvec(int x, int bias) {
    require(value(bias).rows() == 1 && value(bias).cols() == value(x).cols(),
            "add_rowvec: bias must be 1 x cols(x)");
    Mat<T> v = value(x);
    v.rowwise() += value(bias).row(0);
    return custom(std::move(v), {x, bias}, [x, bias](Tape& t, int self) {
      const Mat<T>& g = t.grad(self);
      if (t.needs_grad(x)) t.grad(x) += g;
      if (t.needs_grad(bias)) t.grad(bias).row(0) += g.colwise().sum();
    });
  }

  int cmul(int a, int b) {
    check_same_shape(a, b, "cmul");
    return custom(value(a).cwiseProduct(value(b)), {a, b}, [a, b](Tape& t, int self) {
      const Mat<T>& g = t.grad(self);
      if (t.needs_grad(a)) t.grad(a) += g.cwiseProduct(t.value(b));
      if (t.needs_grad(b)) t.grad(b) += g.cwiseProduct(t.value(a));
    });
  }

  int scale(int a, T s) {
    return custom(value(a) * s, {a}, [a, s](Tape& t, int self) {
      if (t.needs_grad(a)) t.grad(a) += t.grad(self) * s;
    });
  }

  int exp_op(int a) {
    Mat<T> v = value(a).array().exp();
    return custom(std::move(v), {a}, [a](Tape& t, int self) {
      if (t.needs_grad(a)) t.grad(a).array() += t.grad(self).array() * t.value(self).array();
    });
  }

  int concat_cols(int a, int b) {
    require(value(a).rows() == value(b).rows(), "concat_cols: row counts differ");
    Mat<T> v(value(a).rows(), value(a).cols() + value(b).cols());
    v << value(a), value(b);
    const Eigen::Index ca = value(a).cols();
    return custom(std::move(v), {a, b}, [a, b, ca](Tape& t, int self) {
      const Mat<T>& g = t.grad(self);
      if (t.needs_grad(a)) t.grad(a) += g.leftCols(ca);
      if (t.needs_grad(b)) t.grad(b) += g.rightCols(g.cols() - ca);
    });
  }

  int sum_all(int a) {
    Mat<T> v(1, 1);
    v(0, 0) = value(a).sum();
    return custom(std::move(v), {a}, [a](Tape& t, int self) {
      if (t.needs_grad(a)) t.grad(a).array() += t.grad(self)(0, 0);
    });
  }

  int mean_all(int a) {
    Mat<T> v(1, 1);
    v(0, 0) = value(a).mean();
    const T inv = T(1) / static_cast<T>(value(a).size());
    return custom(std::move(v), {a}, [a, inv](Tape& t, int self) {
      if (t.needs_grad(a)) t.grad(a).array() += t.grad(self)(0, 0) * inv;
    });
  }

  // x: N x F, slope: 1 x F (per-channel).
  int prelu(int x, int slope) {
    require(value(slope).rows() == 1 && value(slope).cols() == value(x).cols(),
            "prelu: slope must be 1 x cols(x)");
    const Mat<T>& xv = value(x);
    Mat<T> v = xv;
    for (Eigen::Index j = 0; j < xv.cols(); ++j) {
      const T s = value(slope)(0, j);
      for (Eigen::Index i = 0; i < xv.rows(); ++i)
        if (xv(i, j) < T(0)) v(i, j) = s * xv(i, j);
    }
    return custom(std::move(v), {x, slope}, [x, slope](Tape& t, int self) {
      const Mat<T>& g = t.grad(self);
      const Mat<T>& xv = t.value(x);
      if (t.needs_grad(x)) {
        Mat<T>& gx = t.grad(x);
        for (Eigen::Index j = 0; j < xv.cols(); ++j) {
          const T s = t.value(slope)(0, j);
          for (Eigen::Index i = 0; i < xv.rows(); ++i)
            gx(i, j) += g(i, j) * (xv(i, j) >= T(0) ? T(1) : s);
        }
      }
      if (t.needs_grad(slope)) {
        Mat<T>& gs = t.grad(slope);
        for (Eigen::Index j = 0; j < xv.cols(); ++j) {
          T acc = T(0);
          for (Eigen::Index i = 0; i < xv.rows(); ++i)
            if (xv(i, j) < T(0)) acc += g(i, j) * xv(i, j);
          gs(0, j) += acc;
        }
      }
    });
  }

  // Batch normalization over rows (training mode, biased batch variance).
  // Updates the running buffers in place as a forward side effect.
  int bn_train(int x, int gamma, int beta, Mat<T>& running_mean, Mat<T>& running_var, T momentum,
               T eps) {
    const Mat<T>& xv = value(x);
    const Eigen::Index rows = xv.rows(), cols = xv.cols();
    require(rows >= 2, "bn_train: batch size must be >= 2");
    Mat<T> mu = xv.colwise().mean();
    Mat<T> centered = xv.rowwise() - mu.row(0);
    Mat<T> var = centered.array().square().colwise().mean();
    Mat<T> invstd = (var.array() + eps).rsqrt();
    Mat<T> xhat = centered.array().rowwise() * invstd.row(0).array();
    Mat<T> v = (xhat.array().rowwise() * value(gamma).row(0).array()).rowwise() +
               value(beta).row(0).array();
    running_mean = (T(1) - momentum) * running_mean + momentum * mu;
    running_var = (T(1) - momentum) * running_var + momentum * var;
    auto xhat_c = std::make_shared<Mat<T>>(std::move(xhat));
    auto invstd_c = std::make_shared<Mat<T>>(std::move(invstd));
    return custom(std::move(v), {x, gamma, beta},
                  [x, gamma, beta, xhat_c, invstd_c, rows, cols](Tape& t, int self) {
                    const Mat<T>& g = t.grad(self);
                    const Mat<T>& xh = *xhat_c;
                    if (t.needs_grad(beta)) t.grad(beta).row(0) += g.colwise().sum();
                    if (t.needs_grad(gamma))
                      t.grad(gamma).row(0) += g.cwiseProduct(xh).colwise().sum();
                    if (t.needs_grad(x)) {
                      const T inv_n = T(1) / static_cast<T>(rows);
                      Mat<T>& gx = t.grad(x);
                      for (Eigen::Index j = 0; j < cols; ++j) {
                        const T gam = t.value(gamma)(0, j);
                        const T istd = (*invstd_c)(0, j);
                        T sum_g = T(0), sum_gx = T(0);
                        for (Eigen::Index i = 0; i < rows; ++i) {
                          sum_g += g(i, j);
                          sum_gx += g(i, j) * xh(i, j);
                        }
                        for (Eigen::Index i = 0; i < rows; ++i) {
                          gx(i, j) += gam * istd * inv_n *
                                      (static_cast<T>(rows) * g(i, j) - sum_g - xh(i, j) * sum_gx);
                        }
                      }
                    }
                  });
  }

  // Batch normalization with frozen statistics (inference mode).
  int bn_eval(int x, int gamma, int beta, const Mat<T>& mean, const Mat<T>& var, T eps) {
    Mat<T> invstd = (var.array() + eps).rsqrt();
    Mat<T> xhat = (value(x).rowwise() - mean.row(0)).array().rowwise() * invstd.row(0).array();
    Mat<T> v = (xhat.array().rowwise() * value(gamma).row(0).array()).rowwise() +
               value(beta).row(0).array();
    auto xhat_c = std::make_shared<Mat<T>>(std::move(xhat));
    auto invstd_c = std::make_shared<Mat<T>>(std::move(invstd));
    return custom(std::move(v), {x, gamma, beta}, [x, gamma, beta, xhat_c, invstd_c](Tape& t, int self) {
      const Mat<T>& g = t.grad(self);
      if (t.needs_grad(beta)) t.grad(beta).row(0) += g.colwise().sum();
      if (t.needs_grad(gamma)) t.grad(gamma).row(0) += g.cwiseProduct(*xhat_c).colwise().sum();
      if (t.needs_grad(x))
        t.grad(x).array() +=
            g.array().rowwise() * (t.value(gamma).row(0).array() * invstd_c->row(0).array());
    });
  }

  // Elementwise Huber (quadratic within unit residual, linear outside),
  // averaged over all elements.
  int huber_mean(int pred, int target) {
    check_same_shape(pred, target, "huber_mean");
    const Mat<T> r = value(pred) - value(target);
    T total = T(0);
    for (Eigen::Index j = 0; j < r.cols(); ++j)
      for (Eigen::Index i = 0; i < r.rows(); ++i) {
        const T a = std::abs(r(i, j));
        total += a <= T(1) ? T(0.5) * a * a : a - T(0.5);
      }
    Mat<T> v(1, 1);
    v(0, 0) = total / static_cast<T>(r.size());
    return custom(std::move(v), {pred, target}, [pred, target](Tape& t, int self) {
      const T g = t.grad(self)(0, 0);
      const Mat<T> r = t.value(pred) - t.value(target);
      const T inv = T(1) / static_cast<T>(r.size());
      Mat<T> d(r.rows(), r.cols());
      for (Eigen::Index j = 0; j < r.cols(); ++j)
        for (Eigen::Index i = 0; i < r.rows(); ++i) {
          const T x = r(i, j);
          d(i, j) = std::abs(x) <= T(1) ? x : (x > T(0) ? T(1) : T(-1));
        }
      d *= g * inv;
      if (t.needs_grad(pred)) t.grad(pred) += d;
      if (t.needs_grad(target)) t.grad(target) -= d;
    });
  }

  int mse_mean(int pred, int target) {
    check_same_shape(pred, target, "mse_mean");
    const Mat<T> r = value(pred) - value(target);
    Mat<T> v(1, 1);
    v(0, 0) = r.array().square().mean();
    return custom(std::move(v), {pred, target}, [pred, target](Tape& t, int self) {
      const T g = t.grad(self)(0, 0);
      const Mat<T> r = t.value(pred) - t.value(target);
      const T c = T(2) * g / static_cast<T>(r.size());
      if (t.needs_grad(pred)) t.grad(pred) += c * r;
      if (t.needs_grad(target)) t.grad(target) -= c * r;
    });
  }

  // Closed-form KL(N(mu, diag(exp(logvar))) || N(0, I)), summed over
  // latent dimensions and averaged over batch rows.
  int kl_gauss_mean(int mu, int logvar) {
    check_same_shape(mu, logvar, "kl_gauss_mean");
    const Mat<T>& m = value(mu);
    const Mat<T>& lv = value(logvar);
    Mat<T> v(1, 1);
    v(0, 0) = T(0.5) *
              (m.array().square() + lv.array().exp() - T(1) - lv.array()).rowwise().sum().mean();
    return custom(std::move(v), {mu, logvar}, [mu, logvar](Tape& t, int self) {
      const T g = t.grad(self)(0, 0);
      const T inv_b = T(1) / static_cast<T>(t.value(mu).rows());
      if (t.needs_grad(mu)) t.grad(mu).array() += g * inv_b * t.value(mu).array();
      if (t.needs_grad(logvar))
        t.grad(logvar).array() +=
            g * inv_b * T(0.5) * (t.value(logvar).array().exp() - T(1));
    });
  }

  // Per-coordinate random Fourier features: each scalar y_i expands to
  // [cos(2 pi B(k,i) y_i), sin(...)] for k = 0..f-1, concatenated per
  // coordinate. y: N x d -> N x (2 f d).
  int fourier_percoord(int y, const Mat<T>& B) {
    const Mat<T>& yv = value(y);
    const Eigen::Index f = B.rows(), d = B.cols();
    require(yv.cols() == d, "fourier_percoord: input dim " + std::to_string(yv.cols()) +
                                " does not match B (" + std::to_string(d) + ")");
    const T two_pi = T(2) * std::numbers::pi_v<T>;
    Mat<T> v(yv.rows(), 2 * f * d);
    for (Eigen::Index n = 0; n < yv.rows(); ++n)
      for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index k = 0; k < f; ++k) {
          const T ang = two_pi * B(k, i) * yv(n, i);
          v(n, i * 2 * f + k) = std::cos(ang);
          v(n, i * 2 * f + f + k) = std::sin(ang);
        }
    auto Bc = std::make_shared<Mat<T>>(B);
    return custom(std::move(v), {y}, [y, Bc, f, d, two_pi](Tape& t, int self) {
      if (!t.needs_grad(y)) return;
      const Mat<T>& g = t.grad(self);
      const Mat<T>& out = t.value(self);
      Mat<T>& gy = t.grad(y);
      for (Eigen::Index n = 0; n < gy.rows(); ++n)
        for (Eigen::Index i = 0; i < d; ++i) {
          T acc = T(0);
          for (Eigen::Index k = 0; k < f; ++k) {
            const T w = two_pi * (*Bc)(k, i);
            const T c = out(n, i * 2 * f + k);
            const T s = out(n, i * 2 * f + f + k);
            acc += w * (-s * g(n, i * 2 * f + k) + c * g(n, i * 2 * f + f + k));
          }
          gy(n, i) += acc;
        }
    });
  }

  // Whole-vector random Fourier features: y: N x d -> [cos(2 pi y B^T),
  // sin(2 pi y B^T)], N x 2f.
  int fourier_matrix(int y, const Mat<T>& B) {
    const Mat<T>& yv = value(y);
    require(yv.cols() == B.cols(), "fourier_matrix: input dim " + std::to_string(yv.cols()) +
                                       " does not match B (" + std::to_string(B.cols()) + ")");
    const T two_pi = T(2) * std::numbers::pi_v<T>;
    const Eigen::Index f = B.rows();
    Mat<T> ang = two_pi * (yv * B.transpose());
    Mat<T> v(yv.rows(), 2 * f);
    v.leftCols(f) = ang.array().cos();
    v.rightCols(f) = ang.array().sin();
    auto Bc = std::make_shared<Mat<T>>(B);
    return custom(std::move(v), {y}, [y, Bc, f, two_pi](Tape& t, int self) {
      if (!t.needs_grad(y)) return;
      const Mat<T>& g = t.grad(self);
      const Mat<T>& out = t.value(self);
      // d ang = -sin * g_cos + cos * g_sin
      Mat<T> dang = (-out.rightCols(f).array() * g.leftCols(f).array() +
                     out.leftCols(f).array() * g.rightCols(f).array())
                        .matrix();
      t.grad(y).noalias() += two_pi * dang * (*Bc);
    });
  }

  // 1 x 3V row (xyz interleaved) -> V x 3 point matrix.
  int row_to_points(int x) {
    const Mat<T>& xv = value(x);
    require(xv.rows() == 1 && xv.cols() % 3 == 0, "row_to_points: expected 1 x 3V input");
    const Eigen::Index V = xv.cols() / 3;
    Mat<T> v(V, 3);
    for (Eigen::Index i = 0; i < V; ++i)
      for (int c = 0; c < 3; ++c) v(i, c) = xv(0, 3 * i + c);
    return custom(std::move(v), {x}, [x, V](Tape& t, int self) {
      if (!t.needs_grad(x)) return;
      const Mat<T>& g = t.grad(self);
      Mat<T>& gx = t.grad(x);
      for (Eigen::Index i = 0; i < V; ++i)
        for (int c = 0; c < 3; ++c) gx(0, 3 * i + c) += g(i, c);
    });
  }

  int points_to_row(int x) {
    const Mat<T>& xv = value(x);
    require(xv.cols() == 3, "points_to_row: expected V x 3 input");
    const Eigen::Index V = xv.rows();
    Mat<T> v(1, 3 * V);
    for (Eigen::Index i = 0; i < V; ++i)
      for (int c = 0; c < 3; ++c) v(0, 3 * i + c) = xv(i, c);
    return custom(std::move(v), {x}, [x, V](Tape& t, int self) {
      if (!t.needs_grad(x)) return;
      const Mat<T>& g = t.grad(self);
      Mat<T>& gx = t.grad(x);
      for (Eigen::Index i = 0; i < V; ++i)
        for (int c = 0; c < 3; ++c) gx(i, c) += g(0, 3 * i + c);
    });
  }

  // ---- reverse sweep ----

  void backward(int root) {
    require(!nodes_.empty(), "backward called before any forward pass");
    require(root >= 0 && root < size(), "backward: invalid root node");
    require(value(root).rows() == 1 && value(root).cols() == 1,
            "backward: root must be a scalar node");
    grad(root)(0, 0) = T(1);
    visits_ = 0;
    for (int i = root; i >= 0; --i) {
      Node& n = nodes_[static_cast<std::size_t>(i)];
      if (!n.grad.size()) continue;  // not reachable from the root
      ++visits_;
      if (n.backward) n.backward(*this, i);
      if (n.param && n.param->trainable) {
        if (!n.param->grad.size())
          n.param->grad = Mat<T>::Zero(n.value.rows(), n.value.cols());
        n.param->grad += n.grad;
      }
    }
  }

  int backward_visits() const { return visits_; }

 private:
  std::vector<Node> nodes_;
  int visits_ = 0;

  int last() const { return static_cast<int>(nodes_.size()) - 1; }
  std::size_t idx(int i) const { return static_cast<std::size_t>(i); }

  void check_same_shape(int a, int b, const char* op) const {
    require(value(a).rows() == value(b).rows() && value(a).cols() == value(b).cols(),
            std::string(op) + ": shape mismatch (" + std::to_string(value(a).rows()) + "x" +
                std::to_string(value(a).cols()) + " vs " + std::to_string(value(b).rows()) + "x" +
                std::to_string(value(b).cols()) + ")");
  }
};

}  // namespace bodykit::ad
