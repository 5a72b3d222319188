#include "scsnet/scs.hpp"

#include <cmath>

#include "scsnet/error.hpp"

namespace scsnet {

namespace {

constexpr const char* kModule = "scs-ops";

struct DotNorms {
  double dot = 0.0;
  double k_norm = 0.0;
  double x_norm = 0.0;
};

DotNorms dot_norms(std::span<const double> k, std::span<const double> x) {
  if (k.size() != x.size()) {
    throw DimensionError(kModule, "vector lengths differ: " + std::to_string(k.size()) + " vs " +
                                      std::to_string(x.size()));
  }
  DotNorms r;
  double kk = 0.0, xx = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    r.dot += k[i] * x[i];
    kk += k[i] * k[i];
    xx += x[i] * x[i];
  }
  r.k_norm = std::sqrt(kk);
  r.x_norm = std::sqrt(xx);
  return r;
}

Shape merged_image_shape(const Shape& sample) {
  if (sample.size() < 3) throw DimensionError(kModule, "expected an image sample [H,W,C], got " + shape_str(sample));
  std::size_t channels = 1;
  for (std::size_t d = 2; d < sample.size(); ++d) channels *= sample[d];
  return {sample[0], sample[1], channels};
}

}  // namespace

double cosine_similarity(std::span<const double> k, std::span<const double> x) {
  const DotNorms r = dot_norms(k, x);
  if (r.k_norm == 0.0 || r.x_norm == 0.0) throw DomainError(kModule, "cosine similarity of a zero vector");
  return r.dot / (r.k_norm * r.x_norm);
}

double scs_unit(std::span<const double> k, std::span<const double> x, double p, double q) {
  if (!(p > 0.0)) throw ContractError(kModule, "sharpening exponent must be positive, got " + std::to_string(p));
  if (!(q >= 0.0)) throw ContractError(kModule, "stabilizer must be nonnegative, got " + std::to_string(q));
  const DotNorms r = dot_norms(k, x);
  if (q == 0.0 && (r.k_norm == 0.0 || r.x_norm == 0.0)) {
    throw DomainError(kModule, "zero-norm operand with q = 0");
  }
  if (r.dot == 0.0) return 0.0;
  const double magnitude = std::fabs(r.dot) / ((r.k_norm + q) * (r.x_norm + q));
  const double sharpened = std::pow(magnitude, p);
  return r.dot > 0.0 ? sharpened : -sharpened;
}

Tensor sharpened_cosine(const Tensor& windows, const Tensor& kernels, const Tensor& p, const Tensor& q) {
  if (windows.rank() != 2 || kernels.rank() != 2 || windows.shape()[1] != kernels.shape()[1]) {
    throw DimensionError(kModule, "sharpened_cosine: windows " + shape_str(windows.shape()) + " vs kernels " +
                                      shape_str(kernels.shape()));
  }
  const std::size_t rows = windows.shape()[0];
  const std::size_t units = kernels.shape()[0];
  if (p.numel() != units || q.numel() != 1) {
    throw DimensionError(kModule, "sharpened_cosine: expected p[" + std::to_string(units) + "] and q[1]");
  }
  const Tensor dots = matmul(windows, transpose(kernels));
  const Tensor x_norms = row_norm(windows) + q;
  const Tensor k_norms = reshape(row_norm(kernels), {1, units}) + q;
  const Tensor cosine = dots / matmul(x_norms, k_norms);
  return signed_power(cosine, tile_rows(p, rows));
}

ScsLayer::ScsLayer(const ScsOptions& options, std::size_t in_channels, SplitMix64& rng)
    : options_(options), in_channels_(in_channels) {
  if (options.units == 0 || in_channels == 0) throw ContractError(kModule, "SCS layer needs units and channels");
  if (options.kernel.h == 0 || options.kernel.w == 0 || options.stride.h == 0 || options.stride.w == 0) {
    throw ContractError(kModule, "SCS kernel and stride extents must be at least 1");
  }
  if (!(options.q_floor > 0.0) || !(options.q_init > options.q_floor)) {
    throw ContractError(kModule, "need 0 < q_floor < q_init");
  }
  const std::size_t fan_in = options.kernel.h * options.kernel.w * in_channels;
  const double bound = std::sqrt(1.0 / static_cast<double>(fan_in));
  std::vector<double> weights(options.units * fan_in);
  for (double& w : weights) w = rng.uniform(-bound, bound);
  kernel_ = Tensor({options.units, options.kernel.h, options.kernel.w, in_channels}, std::move(weights), true);
  p_log_ = Tensor::zeros({options.units}, true);
  // Inverse softplus so that the initial q equals q_init.
  q_raw_ = Tensor::scalar(std::log(std::expm1(options.q_init - options.q_floor)), true);
}

Shape ScsLayer::output_shape(const Shape& sample) const {
  const Shape img = merged_image_shape(sample);
  if (img[2] != in_channels_) {
    throw DimensionError(kModule, "SCS layer expects " + std::to_string(in_channels_) + " channels, got " +
                                      shape_str(sample));
  }
  return {valid_positions(img[0], options_.kernel.h, options_.stride.h, kModule),
          valid_positions(img[1], options_.kernel.w, options_.stride.w, kModule), options_.units};
}

Tensor ScsLayer::apply(const Tensor& input) {
  if (input.rank() == 3) {
    const Shape& s = input.shape();
    const Tensor out = forward(reshape(input, {1, s[0], s[1], s[2]}));
    const Shape& o = out.shape();
    return reshape(out, {o[1], o[2], o[3]});
  }
  return forward(input);
}

Tensor ScsLayer::forward(const Tensor& batch) {
  const Tensor images = as_image_batch(batch);
  const Shape& s = images.shape();
  if (s[3] != in_channels_) {
    throw DimensionError(kModule, "SCS layer expects " + std::to_string(in_channels_) + " channels, got " +
                                      shape_str(s));
  }
  auto& table = tables_[s];
  if (!table) table = window_table_2d(s, options_.kernel, options_.stride);
  const std::size_t out_h = valid_positions(s[1], options_.kernel.h, options_.stride.h, kModule);
  const std::size_t out_w = valid_positions(s[2], options_.kernel.w, options_.stride.w, kModule);
  const std::size_t n = options_.kernel.h * options_.kernel.w * in_channels_;
  const std::size_t rows = s[0] * out_h * out_w;

  const Tensor windows = gather(images, table, {rows, n});
  const Tensor kernels = reshape(kernel_, {options_.units, n});
  const Tensor q = softplus(q_raw_) + options_.q_floor;
  const Tensor out = sharpened_cosine(windows, kernels, exp(p_log_), q);
  return reshape(out, {s[0], out_h, out_w, options_.units});
}

std::vector<Parameter> ScsLayer::parameters() const {
  return {{"kernel", kernel_}, {"p_log", p_log_}, {"q_raw", q_raw_}};
}

std::size_t ScsLayer::parameter_count() const {
  return options_.units * options_.kernel.h * options_.kernel.w * in_channels_ + options_.units + 1;
}

double ScsLayer::p(std::size_t unit) const { return std::exp(p_log_.data()[unit]); }

double ScsLayer::q() const {
  const double x = q_raw_.data()[0];
  return std::max(x, 0.0) + std::log1p(std::exp(-std::fabs(x))) + options_.q_floor;
}

Tensor pool2d(const Tensor& input, const PoolSpec& spec) {
  if (input.rank() == 3) {
    const Shape& s = input.shape();
    const Tensor out = pool2d(reshape(input, {1, s[0], s[1], s[2]}), spec);
    const Shape& o = out.shape();
    return reshape(out, {o[1], o[2], o[3]});
  }
  const Tensor images = as_image_batch(input);
  const Shape& s = images.shape();
  const std::size_t batch = s[0], height = s[1], width = s[2], channels = s[3];
  const std::size_t out_h = valid_positions(height, spec.window.h, spec.stride.h, kModule);
  const std::size_t out_w = valid_positions(width, spec.window.w, spec.stride.w, kModule);
  const auto values = images.data();
  const bool by_magnitude = spec.mode == PoolMode::kMaxAbs;

  auto selected = std::make_shared<std::vector<std::uint32_t>>();
  selected->reserve(batch * out_h * out_w * channels);
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t y = 0; y < out_h; ++y)
      for (std::size_t x = 0; x < out_w; ++x)
        for (std::size_t c = 0; c < channels; ++c) {
          std::size_t best = 0;
          double best_score = 0.0;
          bool first = true;
          for (std::size_t dy = 0; dy < spec.window.h; ++dy)
            for (std::size_t dx = 0; dx < spec.window.w; ++dx) {
              const std::size_t idx =
                  ((b * height + y * spec.stride.h + dy) * width + x * spec.stride.w + dx) * channels + c;
              const double score = by_magnitude ? std::fabs(values[idx]) : values[idx];
              if (first || score > best_score) {
                best = idx;
                best_score = score;
                first = false;
              }
            }
          selected->push_back(static_cast<std::uint32_t>(best));
        }
  return gather(images, std::move(selected), {batch, out_h, out_w, channels});
}

Shape PoolLayer::output_shape(const Shape& sample) const {
  const Shape img = merged_image_shape(sample);
  return {valid_positions(img[0], spec_.window.h, spec_.stride.h, kModule),
          valid_positions(img[1], spec_.window.w, spec_.stride.w, kModule), img[2]};
}

Tensor PoolLayer::forward(const Tensor& batch) { return pool2d(as_image_batch(batch), spec_); }

}  // namespace scsnet
