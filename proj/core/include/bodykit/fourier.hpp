#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace bodykit {

// Frozen random Fourier feature map. B is an f x d matrix with entries
// drawn from N(0, sigma^2) at construction and never updated; inputs are
// mapped through cos/sin of 2 pi B y. The content hash travels with
// checkpoints so a model can refuse inputs encoded with a different B.
class FourierEncoder {
 public:
  FourierEncoder() = default;
  FourierEncoder(int frequencies, int input_dim, double sigma, std::uint64_t seed);

  // Whole-vector map: y (d) -> [cos(2 pi B y), sin(2 pi B y)] (2f).
  Eigen::VectorXd encode(const Eigen::VectorXd& y) const;

  // Per-coordinate map: each scalar y_i through its own column of B,
  // giving d * 2f features (f cosines then f sines per coordinate).
  Eigen::VectorXd encode_per_coordinate(const Eigen::VectorXd& y) const;

  int frequencies() const { return static_cast<int>(b_.rows()); }
  int input_dim() const { return static_cast<int>(b_.cols()); }
  int output_dim() const { return 2 * frequencies(); }
  int output_dim_per_coordinate() const { return input_dim() * 2 * frequencies(); }
  double sigma() const { return sigma_; }
  std::uint64_t seed() const { return seed_; }
  const Eigen::MatrixXd& matrix() const { return b_; }

  std::uint64_t hash() const;

 private:
  Eigen::MatrixXd b_;  // f x d
  double sigma_ = 1.0;
  std::uint64_t seed_ = 0;
};

}  // namespace bodykit
