#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gnsde/graph.hpp"
#include "gnsde/parameters.hpp"
#include "gnsde/sde.hpp"
#include "gnsde/tensor.hpp"

namespace gnsde {

enum class ModelKind { gcn, gnode, gnsde };
enum class EncoderKind { linear, gcn };
enum class LikelihoodKind { categorical, gaussian };

std::string_view to_string(ModelKind kind);
std::string_view to_string(EncoderKind kind);
std::string_view to_string(LikelihoodKind kind);
std::string_view to_string(Activation act);
/// Throw InvalidArgument on unknown names.
ModelKind parse_model_kind(std::string_view name);
EncoderKind parse_encoder_kind(std::string_view name);
LikelihoodKind parse_likelihood_kind(std::string_view name);
Activation parse_activation(std::string_view name);

/// Architecture shared by every model kind: encoder -> dynamics -> projection.
/// The GCN baseline skips the dynamics; GN-ODE integrates the drift without
/// noise; GN-SDE integrates the posterior SDE.
struct ModelConfig {
  ModelKind kind = ModelKind::gnsde;
  std::size_t input_dim = 0;
  std::size_t latent_dim = 64;
  std::size_t hidden_dim = 64;
  std::size_t output_dim = 0;
  EncoderKind encoder = EncoderKind::gcn;
  Activation encoder_activation = Activation::tanh;
  std::size_t drift_layers = 2;
  /// Constant diffusion shared by prior and posterior.
  double diffusion = 1.0;
  /// Prior drift is -prior_decay * z; 0 gives driftless Brownian motion.
  double prior_decay = 0.0;
  LikelihoodKind likelihood = LikelihoodKind::categorical;
  /// Observation noise variance of the Gaussian training likelihood.
  double obs_variance = 0.25;
  /// GCN regression: append the query time as an input feature.
  bool time_input = false;
  /// Dropout rate applied while training the GCN and GN-ODE (0 disables).
  double dropout = 0.0;
  std::uint64_t init_seed = 0;

  /// Throws InvalidArgument on inconsistent settings.
  void validate() const;
};

/// Per-pass randomness: Brownian path seed and, when `dropout` > 0, the
/// Bernoulli masks on hidden activations.
struct SampleSpec {
  std::uint64_t seed = 0;
  double dropout = 0.0;
  bool with_kl = false;
};

struct ForwardPass {
  /// Raw head outputs [n x output_dim] (logits or means), one per readout index.
  std::vector<Tensor> outputs;
  /// KL path integral; only defined for GN-SDE passes with `with_kl`.
  Tensor kl;
};

/// Inverted dropout: kept entries scaled by 1/(1 - rate). Masks are keyed on
/// (seed, site, element) so a pass is reproducible.
Tensor apply_dropout(const Tensor& x, double rate, std::uint64_t seed, std::uint64_t site);

/// Node-level model over a fixed graph.
class NodeModel {
 public:
  explicit NodeModel(ModelConfig config);
  virtual ~NodeModel() = default;
  NodeModel(const NodeModel&) = delete;
  NodeModel& operator=(const NodeModel&) = delete;

  ModelKind kind() const noexcept { return config_.kind; }
  const ModelConfig& config() const noexcept { return config_; }
  ParameterList& parameters() noexcept { return params_; }
  const ParameterList& parameters() const noexcept { return params_; }

  /// Initial latent state: linear or single-GCN-layer embedding of the features.
  Tensor encode(const Tensor& x, const NormalizedAdjacency& adj, const SampleSpec& spec = {}) const;
  /// Graph-conditioned vector field: GCN stack over [z | t].
  Tensor drift(const Tensor& z, double t, const NormalizedAdjacency& adj, const SampleSpec& spec = {}) const;
  /// Output head: single GCN layer, no activation.
  Tensor project(const Tensor& z, const NormalizedAdjacency& adj) const;
  /// Maps raw outputs to the likelihood's parameters (softmax or identity).
  Tensor likelihood_map(const Tensor& outputs) const;

  virtual bool stochastic() const noexcept { return false; }

  /// One forward pass, reading out projected states at the given grid indices.
  virtual ForwardPass forward(const Tensor& x, const NormalizedAdjacency& adj, const TimeGrid& grid,
                              std::span<const std::size_t> readout, const SampleSpec& spec) const = 0;

 protected:
  void check_inputs(const Tensor& x, const NormalizedAdjacency& adj) const;

  ModelConfig config_;
  ParameterList params_;

 private:
  std::size_t encoder_in_dim() const;
};

std::unique_ptr<NodeModel> make_model(const ModelConfig& config);

}  // namespace gnsde
