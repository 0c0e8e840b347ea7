#pragma once

#include <string>

#include "bodykit/autodiff.hpp"
#include "bodykit/rng.hpp"

namespace bodykit::ad {

inline constexpr double kBnMomentum = 0.1;
inline constexpr double kBnEps = 1e-5;
inline constexpr double kPreluInit = 0.25;

// Shared context for graph construction. `training` selects batch-norm
// statistics (and updates the running buffers); `frozen` feeds
// parameters in as constants so no gradients flow into them.
template <class T>
struct NetBuild {
  Tape<T>& tape;
  ParamStore<T>& params;
  bool training = false;
  bool frozen = false;

  int use(const std::string& name) {
    Param<T>& p = params.at(name);
    if (frozen || !p.trainable) return tape.constant(p.value);
    return tape.leaf(p);
  }
};

template <class T>
void init_fc(ParamStore<T>& params, const std::string& prefix, int in, int out, Rng& rng) {
  auto& w = params.create(prefix + "/w", in, out);
  const double bound = std::sqrt(6.0 / static_cast<double>(in));
  for (Eigen::Index j = 0; j < out; ++j)
    for (Eigen::Index i = 0; i < in; ++i)
      w.value(i, j) = static_cast<T>(rng.uniform(-bound, bound));
  auto& b = params.create(prefix + "/b", 1, out);
  const double bb = 1.0 / std::sqrt(static_cast<double>(in));
  for (Eigen::Index j = 0; j < out; ++j) b.value(0, j) = static_cast<T>(rng.uniform(-bb, bb));
}

template <class T>
int fc(NetBuild<T>& net, const std::string& prefix, int x) {
  const int y = net.tape.matmul(x, net.use(prefix + "/w"));
  return net.tape.add_rowvec(y, net.use(prefix + "/b"));
}

template <class T>
void init_bn(ParamStore<T>& params, const std::string& prefix, int features) {
  params.create(prefix + "/gamma", 1, features).value.setOnes();
  params.create(prefix + "/beta", 1, features);
  params.create(prefix + "/running_mean", 1, features, /*trainable=*/false);
  params.create(prefix + "/running_var", 1, features, /*trainable=*/false).value.setOnes();
}

template <class T>
int bn(NetBuild<T>& net, const std::string& prefix, int x) {
  const int gamma = net.use(prefix + "/gamma");
  const int beta = net.use(prefix + "/beta");
  auto& mean = net.params.at(prefix + "/running_mean");
  auto& var = net.params.at(prefix + "/running_var");
  if (net.training)
    return net.tape.bn_train(x, gamma, beta, mean.value, var.value, static_cast<T>(kBnMomentum),
                             static_cast<T>(kBnEps));
  return net.tape.bn_eval(x, gamma, beta, mean.value, var.value, static_cast<T>(kBnEps));
}

template <class T>
void init_prelu(ParamStore<T>& params, const std::string& prefix, int features) {
  params.create(prefix + "/slope", 1, features).value.setConstant(static_cast<T>(kPreluInit));
}

template <class T>
int prelu_layer(NetBuild<T>& net, const std::string& prefix, int x) {
  return net.tape.prelu(x, net.use(prefix + "/slope"));
}

// Core block: fully connected layer, batch normalization, PReLU.
template <class T>
void init_core_block(ParamStore<T>& params, const std::string& prefix, int in, int out, Rng& rng,
                     bool with_bn = true) {
  init_fc(params, prefix + "/fc", in, out, rng);
  if (with_bn) init_bn(params, prefix + "/bn", out);
  init_prelu(params, prefix + "/prelu", out);
}

template <class T>
int core_block(NetBuild<T>& net, const std::string& prefix, int x, bool with_bn = true) {
  int y = fc(net, prefix + "/fc", x);
  if (with_bn) y = bn(net, prefix + "/bn", y);
  return prelu_layer(net, prefix + "/prelu", y);
}

}  // namespace bodykit::ad
