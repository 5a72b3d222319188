#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "scsnet/conv.hpp"
#include "scsnet/layer.hpp"
#include "scsnet/scs.hpp"

namespace scsnet {

enum class LayerKind { kScs, kConv2d, kConv3d, kPool, kFlatten, kDense, kRelu };

std::string to_string(LayerKind kind);

/// One entry of a model architecture. Fields irrelevant to a kind are
/// ignored: `units` for scs/conv/dense, `kernel`/`stride` for scs/conv/pool,
/// `pool_mode` for pool, `activation` for conv/dense, `q_*` for scs.
struct LayerSpec {
  LayerKind kind = LayerKind::kDense;
  std::size_t units = 0;
  Extent3 kernel{3, 3, 1};
  Extent3 stride{1, 1, 1};
  PoolMode pool_mode = PoolMode::kMaxAbs;
  Activation activation = Activation::kNone;
  double q_floor = 1e-6;
  double q_init = 0.1;
};

struct ModelConfig {
  std::vector<LayerSpec> layers;
  std::size_t classes = 0;
  Shape input;  // per-sample, e.g. {k, k, B'}
};

class DenseLayer : public Layer {
 public:
  DenseLayer(std::size_t inputs, std::size_t outputs, Activation activation, SplitMix64& rng);

  std::string kind() const override { return "dense"; }
  Shape output_shape(const Shape& sample) const override;
  Tensor forward(const Tensor& batch) override;
  std::vector<Parameter> parameters() const override { return {{"weight", weight_}, {"bias", bias_}}; }
  std::size_t parameter_count() const override { return inputs_ * outputs_ + outputs_; }

 private:
  std::size_t inputs_;
  std::size_t outputs_;
  Activation activation_;
  Tensor weight_;  // [in, out]
  Tensor bias_;    // [out]
};

class FlattenLayer : public Layer {
 public:
  std::string kind() const override { return "flatten"; }
  Shape output_shape(const Shape& sample) const override { return {shape_numel(sample)}; }
  Tensor forward(const Tensor& batch) override;
};

class ReluLayer : public Layer {
 public:
  std::string kind() const override { return "relu"; }
  Shape output_shape(const Shape& sample) const override { return sample; }
  Tensor forward(const Tensor& batch) override;
};

/// Sequential stack of layers mapping [B, input...] to logits [B, C].
class Model {
 public:
  Tensor forward(const Tensor& batch);

  /// Learnable arrays named "<layer index>.<kind>.<name>", e.g. "0.scs.kernel".
  std::vector<Parameter> parameters() const;

  const ModelConfig& config() const { return config_; }
  const std::vector<std::unique_ptr<Layer>>& layers() const { return layers_; }
  /// Per-sample output shape of each layer.
  const std::vector<Shape>& shapes() const { return shapes_; }

 private:
  friend Model build_model(const ModelConfig& config, std::uint64_t seed);
  ModelConfig config_;
  std::vector<std::unique_ptr<Layer>> layers_;
  std::vector<Shape> shapes_;
};

/// Instantiates a model; layer i draws its initial weights from
/// SplitMix64::stream(seed, i). Throws ConfigError when adjacent shapes do
/// not compose (naming the layer pair), when an activation follows an SCS
/// stage, or when the output is not a vector of `classes` logits.
Model build_model(const ModelConfig& config, std::uint64_t seed);

struct LayerCount {
  std::size_t index = 0;
  std::string kind;
  Shape output;
  std::size_t parameters = 0;
};

struct ParameterCount {
  std::vector<LayerCount> layers;
  std::size_t total = 0;
};

/// Closed-form counts: scs U*kh*kw*Cin + U + 1, conv U*(kd*)kh*kw*Cin + U,
/// dense in*out + out, everything else 0.
ParameterCount count_parameters(const Model& model);

}  // namespace scsnet
