#include "scsnet/conv.hpp"

#include <cmath>

#include "scsnet/error.hpp"
#include "scsnet/ops.hpp"

namespace scsnet {

namespace {

constexpr const char* kModule = "baseline-conv";

// Brings a batch to the layout the layer consumes: [B,H,W,C] for conv2d,
// [B,H,W,D,C] for conv3d.
Tensor arrange(const Tensor& batch, ConvKind kind) {
  const Shape& s = batch.shape();
  if (kind == ConvKind::kConv2d) return as_image_batch(batch);
  if (s.size() == 4) return reshape(batch, {s[0], s[1], s[2], s[3], 1});
  if (s.size() == 5) return batch;
  throw DimensionError(kModule, "conv3d expects [B,H,W,D] or [B,H,W,D,C], got " + shape_str(s));
}

Shape arrange_sample(const Shape& sample, ConvKind kind) {
  Shape batched{1};
  batched.insert(batched.end(), sample.begin(), sample.end());
  if (kind == ConvKind::kConv2d) {
    if (batched.size() < 4) throw DimensionError(kModule, "conv2d expects [H,W,C], got " + shape_str(sample));
    std::size_t channels = 1;
    for (std::size_t d = 3; d < batched.size(); ++d) channels *= batched[d];
    return {batched[1], batched[2], channels};
  }
  if (sample.size() == 3) return {sample[0], sample[1], sample[2], 1};
  if (sample.size() == 4) return sample;
  throw DimensionError(kModule, "conv3d expects [H,W,D] or [H,W,D,C], got " + shape_str(sample));
}

}  // namespace

ConvLayer::ConvLayer(const ConvOptions& options, std::size_t in_channels, SplitMix64& rng)
    : options_(options), in_channels_(in_channels) {
  if (options_.kind == ConvKind::kConv2d) {
    options_.kernel.d = 1;
    options_.stride.d = 1;
  }
  const Extent3& k = options_.kernel;
  const Extent3& st = options_.stride;
  if (options_.units == 0 || in_channels == 0 || k.h == 0 || k.w == 0 || k.d == 0 || st.h == 0 || st.w == 0 ||
      st.d == 0) {
    throw ContractError(kModule, "convolution units, channels, kernel and stride must be at least 1");
  }
  const std::size_t fan_in = window_size();
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
  std::vector<double> weights(options_.units * fan_in);
  for (double& w : weights) w = rng.uniform(-bound, bound);
  Shape kernel_shape = options_.kind == ConvKind::kConv2d
                           ? Shape{options_.units, k.h, k.w, in_channels}
                           : Shape{options_.units, k.h, k.w, k.d, in_channels};
  kernel_ = Tensor(std::move(kernel_shape), std::move(weights), true);
  bias_ = Tensor::zeros({options_.units}, true);
}

std::size_t ConvLayer::window_size() const {
  return options_.kernel.h * options_.kernel.w * options_.kernel.d * in_channels_;
}

std::size_t ConvLayer::parameter_count() const { return options_.units * window_size() + options_.units; }

Shape ConvLayer::output_shape(const Shape& sample) const {
  const Shape s = arrange_sample(sample, options_.kind);
  const std::size_t channels = s.back();
  if (channels != in_channels_) {
    throw DimensionError(kModule, kind() + " expects " + std::to_string(in_channels_) + " channels, got " +
                                      shape_str(sample));
  }
  const Extent3& k = options_.kernel;
  const Extent3& st = options_.stride;
  const std::size_t h = valid_positions(s[0], k.h, st.h, kModule);
  const std::size_t w = valid_positions(s[1], k.w, st.w, kModule);
  if (options_.kind == ConvKind::kConv2d) return {h, w, options_.units};
  return {h, w, valid_positions(s[2], k.d, st.d, kModule), options_.units};
}

Tensor ConvLayer::forward(const Tensor& batch) {
  const Tensor input = arrange(batch, options_.kind);
  const Shape& s = input.shape();
  if (s.back() != in_channels_) {
    throw DimensionError(kModule, kind() + " expects " + std::to_string(in_channels_) + " channels, got " +
                                      shape_str(s));
  }
  const Extent3& k = options_.kernel;
  const Extent3& st = options_.stride;
  Shape out_shape{s[0], valid_positions(s[1], k.h, st.h, kModule), valid_positions(s[2], k.w, st.w, kModule)};
  if (options_.kind == ConvKind::kConv3d) out_shape.push_back(valid_positions(s[3], k.d, st.d, kModule));
  out_shape.push_back(options_.units);

  auto& table = tables_[s];
  if (!table) {
    table = options_.kind == ConvKind::kConv2d ? window_table_2d(s, {k.h, k.w}, {st.h, st.w})
                                               : window_table_3d(s, k, st);
  }
  const std::size_t n = window_size();
  const std::size_t rows = shape_numel(out_shape) / options_.units;
  const Tensor windows = gather(input, table, {rows, n});
  Tensor out = matmul(windows, transpose(reshape(kernel_, {options_.units, n}))) + tile_rows(bias_, rows);
  if (options_.activation == Activation::kRelu) out = relu(out);
  return reshape(out, std::move(out_shape));
}

}  // namespace scsnet
