#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "bodykit/ad_ops.hpp"
#include "bodykit/anthro.hpp"
#include "bodykit/autodiff.hpp"
#include "bodykit/dataset.hpp"
#include "bodykit/fourier.hpp"
#include "bodykit/layers.hpp"
#include "bodykit/mesh.hpp"

namespace bodykit {

// Elementwise Huber distance between same-topology meshes, averaged
// over coordinates (quadratic within unit residual, linear outside).
double huber(const Mesh& a, const Mesh& b);

// KL(N(mu, diag(sigma^2)) || N(0, I)) in closed form; sigma must be
// strictly positive.
double kl_divergence(const Eigen::VectorXd& mu, const Eigen::VectorXd& sigma);

struct GenLossWeights {
  double alpha = 1.0;   // reconstruction
  double beta = 1e-3;   // KL
  double gamma = 0.0;   // Laplacian smoothness
};

struct GeneratorConfig {
  int fourier_f = 8;          // 0 disables conditioning encoding (raw 37-dim input)
  double fourier_sigma = 1.0;
  int latent_dim = 10;
  int epochs = 150;
  int batch = 32;
  double lr = 1e-3;
  GenLossWeights loss;
  std::uint64_t seed = 1;
};

struct GeneratorArch {
  int v3 = 0;        // 3 * vertex count
  int cond_dim = 0;  // 37 * 2f, or 37 when f == 0
  int latent = 10;
};

void init_generator_params(ad::ParamStore<float>& params, const GeneratorArch& arch, Rng& rng);

// Parameter prefixes that belong to the encoder side and must never be
// touched by decoder-only inference.
const std::vector<std::string>& generator_encoder_prefixes();

// ---- graph builders, shared by training, inference and registration ----

template <class T>
int generator_cond_block(ad::NetBuild<T>& net, int cond_features) {
  return ad::core_block(net, "cond_enc", cond_features);
}

// Mesh encoder + fusion head; returns (mu, logvar).
template <class T>
std::pair<int, int> generator_posterior(ad::NetBuild<T>& net, int x_norm, int h_a) {
  const int h_v = ad::core_block(net, "mesh_enc", x_norm);
  const int fused = net.tape.concat_cols(h_v, h_a);
  const int f0 = ad::core_block(net, "fusion0", fused);
  const int f1 = ad::core_block(net, "fusion1", f0);
  return {ad::fc(net, "mu", f1), ad::fc(net, "logvar", f1)};
}

template <class T>
int generator_decode(ad::NetBuild<T>& net, int z, int h_a) {
  const int in = net.tape.concat_cols(z, h_a);
  const int d0 = ad::core_block(net, "dec0", in);
  const int d1 = ad::core_block(net, "dec1", d0);
  const int d2 = ad::core_block(net, "dec2", d1);
  return ad::fc(net, "dec_out", d2);
}

struct GenTrainRow {
  int epoch = 0;
  double huber = 0, kl = 0, laplacian = 0, total = 0;
  double val_p2p_m = std::numeric_limits<double>::quiet_NaN();
};

// Conditional VAE over bind-pose meshes. Training fuses mesh and
// condition features into a 10-d latent; inference runs the decoder
// side only.
class Generator {
 public:
  static Generator train(const Dataset& ds, const GeneratorConfig& cfg,
                         std::vector<GenTrainRow>* log = nullptr);

  void save(const std::filesystem::path& dir) const;
  static Generator load(const std::filesystem::path& dir);

  // Decoder-only sampling. z defaults to a standard-normal draw seeded
  // from the config seed; pass a zero vector for the conditional mean.
  // An encoder override with a different frozen B is rejected.
  Mesh sample(const AnthroVector& a, const Eigen::VectorXd* z = nullptr,
              const FourierEncoder* encoder_override = nullptr) const;
  Mesh sample_conditioning(const Eigen::VectorXd& c37, const Eigen::VectorXd& z) const;
  std::vector<Mesh> interpolate(const AnthroVector& a1, const AnthroVector& a2, int steps,
                                const Eigen::VectorXd& z) const;

  // Normalized decode used by evaluation and registration.
  Eigen::VectorXd decode_normalized(const Eigen::VectorXd& c37, const Eigen::VectorXd& z) const;
  Eigen::VectorXd condition_features(const Eigen::VectorXd& c37) const;

  const GeneratorConfig& config() const { return cfg_; }
  const GeneratorArch& arch() const { return arch_; }
  const ad::ParamStore<float>& params() const { return params_; }
  ad::ParamStore<float>& mutable_params() { return params_; }
  const std::optional<FourierEncoder>& cond_encoder() const { return cond_enc_; }
  double norm_scale() const { return norm_scale_; }
  std::uint64_t encoder_hash() const { return cond_enc_ ? cond_enc_->hash() : 0; }
  std::uint64_t template_hash() const { return template_hash_; }
  bool diverged() const { return diverged_; }

  Eigen::VectorXd anthro_mean;  // train-split statistics, for fit initialization
  Eigen::VectorXd anthro_std;

 private:
  ad::ParamStore<float> params_;
  GeneratorConfig cfg_;
  GeneratorArch arch_;
  std::optional<FourierEncoder> cond_enc_;
  double norm_scale_ = 1.0;
  std::uint64_t template_hash_ = 0;
  std::uint64_t registry_hash_ = 0;
  bool diverged_ = false;

  friend struct GeneratorAccess;
};

// Mean held-out P2P (meters) of decoder outputs at z = 0 against the
// true bind meshes of `idx`.
double generator_heldout_p2p(const Generator& gen, const Dataset& ds, const std::vector<int>& idx);

}  // namespace bodykit
