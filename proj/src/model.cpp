#include "scsnet/model.hpp"

#include <cmath>

#include "scsnet/error.hpp"
#include "scsnet/ops.hpp"

namespace scsnet {

namespace {

constexpr const char* kModule = "model-train";

std::string describe(std::size_t index, LayerKind kind) {
  return "layer " + std::to_string(index) + " (" + to_string(kind) + ")";
}

std::size_t image_channels(const Shape& sample) {
  std::size_t c = 1;
  for (std::size_t d = 2; d < sample.size(); ++d) c *= sample[d];
  return c;
}

}  // namespace

std::string to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::kScs: return "scs";
    case LayerKind::kConv2d: return "conv2d";
    case LayerKind::kConv3d: return "conv3d";
    case LayerKind::kPool: return "pool";
    case LayerKind::kFlatten: return "flatten";
    case LayerKind::kDense: return "dense";
    case LayerKind::kRelu: return "relu";
  }
  return "?";
}

DenseLayer::DenseLayer(std::size_t inputs, std::size_t outputs, Activation activation, SplitMix64& rng)
    : inputs_(inputs), outputs_(outputs), activation_(activation) {
  if (inputs == 0 || outputs == 0) throw ContractError(kModule, "dense layer needs inputs and outputs");
  const double bound = std::sqrt(6.0 / static_cast<double>(inputs + outputs));
  std::vector<double> w(inputs * outputs);
  for (double& x : w) x = rng.uniform(-bound, bound);
  weight_ = Tensor({inputs, outputs}, std::move(w), true);
  bias_ = Tensor::zeros({outputs}, true);
}

Shape DenseLayer::output_shape(const Shape& sample) const {
  if (sample.size() != 1 || sample[0] != inputs_) {
    throw DimensionError(kModule, "dense layer expects [" + std::to_string(inputs_) + "], got " + shape_str(sample));
  }
  return {outputs_};
}

Tensor DenseLayer::forward(const Tensor& batch) {
  if (batch.rank() != 2) throw DimensionError(kModule, "dense layer expects [B, n], got " + shape_str(batch.shape()));
  Tensor out = matmul(batch, weight_) + tile_rows(bias_, batch.shape()[0]);
  return activation_ == Activation::kRelu ? relu(out) : out;
}

Tensor FlattenLayer::forward(const Tensor& batch) {
  const std::size_t n = batch.shape()[0];
  return reshape(batch, {n, batch.numel() / n});
}

Tensor ReluLayer::forward(const Tensor& batch) { return relu(batch); }

Tensor Model::forward(const Tensor& batch) {
  Tensor x = batch;
  for (auto& layer : layers_) x = layer->forward(x);
  return x;
}

std::vector<Parameter> Model::parameters() const {
  std::vector<Parameter> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    for (auto& p : layers_[i]->parameters()) {
      out.push_back({std::to_string(i) + "." + layers_[i]->kind() + "." + p.name, p.value});
    }
  }
  return out;
}

Model build_model(const ModelConfig& config, std::uint64_t seed) {
  if (config.input.empty() || shape_numel(config.input) == 0) throw ConfigError(kModule, "model input shape is empty");
  if (config.classes == 0) throw ConfigError(kModule, "model needs at least one class");
  if (config.layers.empty()) throw ConfigError(kModule, "model has no layers");

  Model model;
  model.config_ = config;
  Shape shape = config.input;
  bool after_scs = false;
  for (std::size_t i = 0; i < config.layers.size(); ++i) {
    const LayerSpec& spec = config.layers[i];
    SplitMix64 rng = SplitMix64::stream(seed, i);
    const std::string here = describe(i, spec.kind);
    const std::string pair = i == 0 ? "input -> " + here : describe(i - 1, config.layers[i - 1].kind) + " -> " + here;

    std::unique_ptr<Layer> layer;
    try {
      switch (spec.kind) {
        case LayerKind::kScs: {
          ScsOptions o;
          o.units = spec.units;
          o.kernel = {spec.kernel.h, spec.kernel.w};
          o.stride = {spec.stride.h, spec.stride.w};
          o.q_floor = spec.q_floor;
          o.q_init = spec.q_init;
          if (shape.size() < 3) throw DimensionError(kModule, "SCS needs an image input, got " + shape_str(shape));
          layer = std::make_unique<ScsLayer>(o, image_channels(shape), rng);
          break;
        }
        case LayerKind::kConv2d:
        case LayerKind::kConv3d: {
          ConvOptions o;
          o.kind = spec.kind == LayerKind::kConv2d ? ConvKind::kConv2d : ConvKind::kConv3d;
          o.units = spec.units;
          o.kernel = spec.kernel;
          o.stride = spec.stride;
          o.activation = spec.activation;
          if (shape.size() < 3) throw DimensionError(kModule, "convolution needs an image input, got " + shape_str(shape));
          std::size_t channels = image_channels(shape);
          if (o.kind == ConvKind::kConv3d) channels = shape.size() == 3 ? 1 : shape.back();
          layer = std::make_unique<ConvLayer>(o, channels, rng);
          break;
        }
        case LayerKind::kPool: {
          PoolSpec p;
          p.window = {spec.kernel.h, spec.kernel.w};
          p.stride = {spec.stride.h, spec.stride.w};
          p.mode = spec.pool_mode;
          layer = std::make_unique<PoolLayer>(p);
          break;
        }
        case LayerKind::kFlatten: layer = std::make_unique<FlattenLayer>(); break;
        case LayerKind::kDense:
          if (shape.size() != 1) throw DimensionError(kModule, "dense needs a flat input (add flatten), got " + shape_str(shape));
          layer = std::make_unique<DenseLayer>(shape[0], spec.units, spec.activation, rng);
          break;
        case LayerKind::kRelu:
          if (after_scs) throw ConfigError(kModule, pair + ": no activation may follow an SCS stage");
          layer = std::make_unique<ReluLayer>();
          break;
      }
      shape = layer->output_shape(shape);
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(kModule, pair + ": " + e.what());
    }

    if (spec.kind == LayerKind::kScs) after_scs = true;
    if (spec.kind == LayerKind::kConv2d || spec.kind == LayerKind::kConv3d || spec.kind == LayerKind::kDense) {
      after_scs = false;
    }
    model.shapes_.push_back(shape);
    model.layers_.push_back(std::move(layer));
  }
  if (shape != Shape{config.classes}) {
    throw ConfigError(kModule, "model output " + shape_str(shape) + " is not [" + std::to_string(config.classes) + "] logits");
  }
  return model;
}

ParameterCount count_parameters(const Model& model) {
  ParameterCount out;
  for (std::size_t i = 0; i < model.layers().size(); ++i) {
    const auto& layer = model.layers()[i];
    out.layers.push_back({i, layer->kind(), model.shapes()[i], layer->parameter_count()});
    out.total += layer->parameter_count();
  }
  return out;
}

}  // namespace scsnet
