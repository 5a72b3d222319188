#pragma once

#include <map>

#include "scsnet/layer.hpp"
#include "scsnet/random.hpp"
#include "scsnet/window.hpp"

namespace scsnet {

enum class ConvKind { kConv2d, kConv3d };
enum class Activation { kNone, kRelu };

struct ConvOptions {
  ConvKind kind = ConvKind::kConv2d;
  std::size_t units = 1;
  Extent3 kernel{3, 3, 1};  // d is ignored for conv2d
  Extent3 stride{1, 1, 1};
  Activation activation = Activation::kRelu;
};

/// Plain convolution with bias and optional ReLU, 'valid' placement.
///
/// conv2d: samples [H, W, C], kernel [U, kh, kw, C].
/// conv3d: samples [H, W, D, C], kernel [U, kh, kw, kd, C]. D is the
/// spectral axis; a rank-3 sample [H, W, D] is read as having C = 1.
/// Weights start He-uniform, biases at zero.
class ConvLayer : public Layer {
 public:
  ConvLayer(const ConvOptions& options, std::size_t in_channels, SplitMix64& rng);

  std::string kind() const override { return options_.kind == ConvKind::kConv2d ? "conv2d" : "conv3d"; }
  Shape output_shape(const Shape& sample) const override;
  Tensor forward(const Tensor& batch) override;
  std::vector<Parameter> parameters() const override { return {{"kernel", kernel_}, {"bias", bias_}}; }
  std::size_t parameter_count() const override;

  const ConvOptions& options() const { return options_; }
  Tensor& kernel() { return kernel_; }
  Tensor& bias() { return bias_; }

 private:
  std::size_t window_size() const;

  ConvOptions options_;
  std::size_t in_channels_;
  Tensor kernel_;
  Tensor bias_;
  std::map<Shape, IndexTable> tables_;
};

}  // namespace scsnet
