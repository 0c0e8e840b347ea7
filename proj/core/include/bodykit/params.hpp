#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "bodykit/util.hpp"

namespace bodykit::ad {

template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

// Named tensor with its gradient accumulator and Adam state.
template <class T>
struct Param {
  std::string name;
  Mat<T> value;
  Mat<T> grad;  // empty until touched by a backward pass
  Mat<T> m, v;  // Adam moments, empty until the first step
  bool trainable = true;

  void zero_grad() {
    if (grad.size()) grad.setZero();
  }
};

// Ordered collection of parameters and buffers. Iteration order is the
// lexicographic name order, which makes serialization deterministic.
// Every fetch is recorded so tests can assert which parameters a
// forward pass touched.
template <class T>
class ParamStore {
 public:
  Param<T>& create(const std::string& name, Eigen::Index rows, Eigen::Index cols,
                   bool trainable = true) {
    require(!map_.count(name), "param already exists: " + name);
    Param<T>& p = map_[name];
    p.name = name;
    p.value = Mat<T>::Zero(rows, cols);
    p.trainable = trainable;
    return p;
  }

  Param<T>& at(const std::string& name) {
    auto it = map_.find(name);
    require(it != map_.end(), "unknown param: " + name);
    access_log_.push_back(name);
    return it->second;
  }

  const Param<T>& at(const std::string& name) const {
    auto it = map_.find(name);
    require(it != map_.end(), "unknown param: " + name);
    access_log_.push_back(name);
    return it->second;
  }

  bool has(const std::string& name) const { return map_.count(name) != 0; }
  std::size_t size() const { return map_.size(); }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    out.reserve(map_.size());
    for (const auto& [k, _] : map_) out.push_back(k);
    return out;
  }

  void zero_grads() {
    for (auto& [_, p] : map_) p.zero_grad();
  }

  auto begin() { return map_.begin(); }
  auto end() { return map_.end(); }
  auto begin() const { return map_.begin(); }
  auto end() const { return map_.end(); }

  const std::vector<std::string>& access_log() const { return access_log_; }
  void clear_access_log() { access_log_.clear(); }

  // Hash of all parameter values, used to verify frozen networks.
  std::uint64_t content_hash() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const auto& [name, p] : map_) {
      h = fnv1a(name.data(), name.size(), h);
      h = fnv1a(p.value.data(), sizeof(T) * static_cast<std::size_t>(p.value.size()), h);
    }
    return h;
  }

  template <class U>
  ParamStore<U> cast() const {
    ParamStore<U> out;
    for (const auto& [name, p] : map_) {
      auto& q = out.create(name, p.value.rows(), p.value.cols(), p.trainable);
      q.value = p.value.template cast<U>();
    }
    return out;
  }

 private:
  std::map<std::string, Param<T>> map_;
  mutable std::vector<std::string> access_log_;
};

// Adam with bias correction. Throws if any gradient is non-finite so a
// diverging step never corrupts the parameters.
template <class T>
struct AdamConfig {
  T lr = T(1e-3);
  T beta1 = T(0.9);
  T beta2 = T(0.999);
  T eps = T(1e-8);
};

template <class T>
class Adam {
 public:
  explicit Adam(AdamConfig<T> cfg = {}) : cfg_(cfg) {}

  long steps() const { return t_; }
  AdamConfig<T>& config() { return cfg_; }

  void step(ParamStore<T>& params) {
    ++t_;
    const T c1 = T(1) - std::pow(cfg_.beta1, static_cast<T>(t_));
    const T c2 = T(1) - std::pow(cfg_.beta2, static_cast<T>(t_));
    for (auto& [name, p] : params) {
      if (!p.trainable || !p.grad.size()) continue;
      require(p.grad.allFinite(), "adam: non-finite gradient for '" + name + "' at step " +
                                      std::to_string(t_) + "; step aborted");
      if (!p.m.size()) {
        p.m = Mat<T>::Zero(p.value.rows(), p.value.cols());
        p.v = Mat<T>::Zero(p.value.rows(), p.value.cols());
      }
      p.m = cfg_.beta1 * p.m + (T(1) - cfg_.beta1) * p.grad;
      p.v = cfg_.beta2 * p.v + (T(1) - cfg_.beta2) * p.grad.cwiseProduct(p.grad);
      const Mat<T> m_hat = p.m / c1;
      const Mat<T> v_hat = p.v / c2;
      p.value.array() -= cfg_.lr * m_hat.array() / (v_hat.array().sqrt() + cfg_.eps);
    }
  }

 private:
  AdamConfig<T> cfg_;
  long t_ = 0;
};

// Checkpoint directory layout: manifest.json describing each tensor
// (name, shape, dtype, byte offset) plus caller-provided metadata, and
// weights.bin with raw little-endian float32 in manifest order.
void save_checkpoint(const std::filesystem::path& dir, const ParamStore<float>& params,
                     const std::string& meta_json);

struct LoadedCheckpoint {
  ParamStore<float> params;
  std::string meta_json;
  std::uint64_t weights_hash = 0;
};

LoadedCheckpoint load_checkpoint(const std::filesystem::path& dir);
std::uint64_t checkpoint_hash(const std::filesystem::path& dir);

}  // namespace bodykit::ad
