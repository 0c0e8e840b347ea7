#include "bodykit/fourier.hpp"

#include <cmath>
#include <numbers>

#include "bodykit/rng.hpp"
#include "bodykit/util.hpp"

namespace bodykit {

FourierEncoder::FourierEncoder(int frequencies, int input_dim, double sigma, std::uint64_t seed)
    : sigma_(sigma), seed_(seed) {
  require(frequencies > 0 && input_dim > 0, "fourier: frequencies and input dim must be positive");
  Rng rng(seed ^ 0xf00d5eedull);
  b_.resize(frequencies, input_dim);
  for (Eigen::Index i = 0; i < b_.rows(); ++i)
    for (Eigen::Index j = 0; j < b_.cols(); ++j) b_(i, j) = sigma * rng.normal();
}

Eigen::VectorXd FourierEncoder::encode(const Eigen::VectorXd& y) const {
  require(y.size() == b_.cols(), "fourier: input dim " + std::to_string(y.size()) +
                                     " does not match encoder (" + std::to_string(b_.cols()) + ")");
  const Eigen::VectorXd angles = 2.0 * std::numbers::pi * (b_ * y);
  Eigen::VectorXd out(2 * angles.size());
  out.head(angles.size()) = angles.array().cos();
  out.tail(angles.size()) = angles.array().sin();
  return out;
}

Eigen::VectorXd FourierEncoder::encode_per_coordinate(const Eigen::VectorXd& y) const {
  require(y.size() == b_.cols(), "fourier: input dim " + std::to_string(y.size()) +
                                     " does not match encoder (" + std::to_string(b_.cols()) + ")");
  const Eigen::Index f = b_.rows();
  Eigen::VectorXd out(y.size() * 2 * f);
  for (Eigen::Index i = 0; i < y.size(); ++i)
    for (Eigen::Index k = 0; k < f; ++k) {
      const double ang = 2.0 * std::numbers::pi * b_(k, i) * y[i];
      out[i * 2 * f + k] = std::cos(ang);
      out[i * 2 * f + f + k] = std::sin(ang);
    }
  return out;
}

std::uint64_t FourierEncoder::hash() const {
  std::uint64_t h = fnv1a(b_.data(), sizeof(double) * static_cast<std::size_t>(b_.size()));
  h = fnv1a(&sigma_, sizeof(sigma_), h);
  h = fnv1a(&seed_, sizeof(seed_), h);
  return h;
}

}  // namespace bodykit
