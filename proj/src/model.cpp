#include "gnsde/model.hpp"

#include <random>

#include "gnsde/baselines.hpp"
#include "gnsde/error.hpp"
#include "gnsde/latent.hpp"
#include "gnsde/ops.hpp"
#include "gnsde/rng.hpp"

namespace gnsde {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::gcn:
      return "gcn";
    case ModelKind::gnode:
      return "gnode";
    case ModelKind::gnsde:
      return "gnsde";
  }
  return "?";
}

std::string_view to_string(EncoderKind kind) { return kind == EncoderKind::linear ? "linear" : "gcn"; }

std::string_view to_string(LikelihoodKind kind) {
  return kind == LikelihoodKind::categorical ? "categorical" : "gaussian";
}

std::string_view to_string(Activation act) {
  switch (act) {
    case Activation::none:
      return "none";
    case Activation::tanh:
      return "tanh";
    case Activation::relu:
      return "relu";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "gcn") return ModelKind::gcn;
  if (name == "gnode") return ModelKind::gnode;
  if (name == "gnsde") return ModelKind::gnsde;
  throw InvalidArgument("unknown model kind '" + std::string(name) + "' (expected gcn, gnode, gnsde)");
}

EncoderKind parse_encoder_kind(std::string_view name) {
  if (name == "linear") return EncoderKind::linear;
  if (name == "gcn") return EncoderKind::gcn;
  throw InvalidArgument("unknown encoder '" + std::string(name) + "' (expected linear, gcn)");
}

LikelihoodKind parse_likelihood_kind(std::string_view name) {
  if (name == "categorical") return LikelihoodKind::categorical;
  if (name == "gaussian") return LikelihoodKind::gaussian;
  throw InvalidArgument("unknown likelihood '" + std::string(name) + "' (expected categorical, gaussian)");
}

Activation parse_activation(std::string_view name) {
  if (name == "none") return Activation::none;
  if (name == "tanh") return Activation::tanh;
  if (name == "relu") return Activation::relu;
  throw InvalidArgument("unknown activation '" + std::string(name) + "' (expected none, tanh, relu)");
}

void ModelConfig::validate() const {
  if (input_dim == 0) throw InvalidArgument("input_dim must be positive");
  if (output_dim == 0) throw InvalidArgument("output_dim must be positive");
  if (latent_dim == 0 || hidden_dim == 0) throw InvalidArgument("latent_dim and hidden_dim must be positive");
  if (drift_layers == 0) throw InvalidArgument("drift_layers must be at least 1");
  if (!(diffusion > 0.0)) throw InvalidArgument("diffusion must be positive");
  if (!(obs_variance > 0.0)) throw InvalidArgument("obs_variance must be positive");
  if (dropout < 0.0 || dropout >= 1.0) throw InvalidArgument("dropout rate must lie in [0, 1)");
  if (likelihood == LikelihoodKind::categorical && output_dim < 2) {
    throw InvalidArgument("categorical likelihood needs at least 2 classes");
  }
}

Tensor apply_dropout(const Tensor& x, double rate, std::uint64_t seed, std::uint64_t site) {
  if (rate <= 0.0) return x;
  if (rate >= 1.0) throw InvalidArgument("dropout rate must be below 1");
  const double keep_scale = 1.0 / (1.0 - rate);
  std::vector<double> mask(x.numel());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    mask[i] = rng::uniform(seed, 0xd120'0000ULL + site, i) < rate ? 0.0 : keep_scale;
  }
  return mul(x, Tensor(x.shape(), std::move(mask)));
}

namespace {

constexpr std::uint64_t kEncoderSite = 0;
constexpr std::uint64_t kDriftSite = 1;

std::string layer_name(const char* block, std::size_t i, const char* part) {
  return std::string(block) + "." + std::to_string(i) + "." + part;
}

}  // namespace

NodeModel::NodeModel(ModelConfig config) : config_(std::move(config)) {
  config_.validate();
  std::mt19937_64 gen(config_.init_seed);
  auto add_dense = [&](const char* block, std::size_t i, std::size_t in, std::size_t out) {
    auto d = glorot_dense(in, out, gen);
    params_.add(layer_name(block, i, "weight"), d.weight);
    params_.add(layer_name(block, i, "bias"), d.bias);
  };
  add_dense("encoder", 0, encoder_in_dim(), config_.latent_dim);
  if (config_.kind != ModelKind::gcn) {
    std::size_t in = config_.latent_dim + 1;
    for (std::size_t l = 0; l < config_.drift_layers; ++l) {
      const bool last = l + 1 == config_.drift_layers;
      const std::size_t out = last ? config_.latent_dim : config_.hidden_dim;
      add_dense("drift", l, in, out);
      in = out;
    }
  }
  add_dense("projection", 0, config_.latent_dim, config_.output_dim);
}

std::size_t NodeModel::encoder_in_dim() const {
  return config_.input_dim + (config_.time_input && config_.kind == ModelKind::gcn ? 1 : 0);
}

void NodeModel::check_inputs(const Tensor& x, const NormalizedAdjacency& adj) const {
  if (x.dim() != 2 || x.cols() != config_.input_dim) {
    throw DimensionError("features " + to_string(x.shape()) + " do not match model input_dim " +
                         std::to_string(config_.input_dim));
  }
  if (x.rows() != adj.n) {
    throw DimensionError("features have " + std::to_string(x.rows()) + " rows but graph has " +
                         std::to_string(adj.n) + " nodes");
  }
}

Tensor NodeModel::encode(const Tensor& x, const NormalizedAdjacency& adj, const SampleSpec& spec) const {
  const auto& w = params_.get("encoder.0.weight");
  const auto& b = params_.get("encoder.0.bias");
  if (x.dim() != 2 || x.cols() != w.rows()) {
    throw DimensionError("encoder expects " + std::to_string(w.rows()) + " feature columns, got " +
                         to_string(x.shape()));
  }
  Tensor z;
  if (config_.encoder == EncoderKind::gcn) {
    z = gcn_layer(adj, x, w, b, config_.encoder_activation);
  } else {
    z = activate(config_.encoder_activation, add_row_bias(matmul(x, w), b));
  }
  return apply_dropout(z, spec.dropout, spec.seed, kEncoderSite);
}

Tensor NodeModel::drift(const Tensor& z, double t, const NormalizedAdjacency& adj, const SampleSpec& spec) const {
  if (config_.kind == ModelKind::gcn) throw InvalidArgument("the GCN baseline has no drift");
  if (z.dim() != 2 || z.cols() != config_.latent_dim || z.rows() != adj.n) {
    throw DimensionError("drift expects [" + std::to_string(adj.n) + "x" + std::to_string(config_.latent_dim) +
                         "] state, got " + to_string(z.shape()));
  }
  Tensor h = append_constant_col(z, t);
  for (std::size_t l = 0; l < config_.drift_layers; ++l) {
    const bool last = l + 1 == config_.drift_layers;
    h = gcn_layer(adj, h, params_.get(layer_name("drift", l, "weight")), params_.get(layer_name("drift", l, "bias")),
                  last ? Activation::none : Activation::tanh);
    if (!last) h = apply_dropout(h, spec.dropout, spec.seed, kDriftSite + l);
  }
  return h;
}

Tensor NodeModel::project(const Tensor& z, const NormalizedAdjacency& adj) const {
  return gcn_layer(adj, z, params_.get("projection.0.weight"), params_.get("projection.0.bias"), Activation::none);
}

Tensor NodeModel::likelihood_map(const Tensor& outputs) const {
  return config_.likelihood == LikelihoodKind::categorical ? softmax_rows(outputs) : outputs;
}

std::unique_ptr<NodeModel> make_model(const ModelConfig& config) {
  switch (config.kind) {
    case ModelKind::gcn:
      return std::make_unique<GcnModel>(config);
    case ModelKind::gnode:
      return std::make_unique<GnOdeModel>(config);
    case ModelKind::gnsde:
      return std::make_unique<LatentGnsde>(config);
  }
  throw InvalidArgument("unknown model kind");
}

}  // namespace gnsde
