#pragma once

#include <cstddef>
#include <map>
#include <span>

#include "scsnet/layer.hpp"
#include "scsnet/random.hpp"
#include "scsnet/window.hpp"

namespace scsnet {

/// k.x / (|k| |x|). Both vectors must be nonzero (DomainError otherwise).
double cosine_similarity(std::span<const double> k, std::span<const double> x);

/// Sharpened cosine similarity of a single kernel/window pair:
///
///   sign(k.x) * ( |k.x| / ((|k| + q)(|x| + q)) )^p
///
/// p > 0 (ContractError otherwise), q >= 0. With q == 0 both vectors must be
/// nonzero (DomainError). At p = 1, q = 0 this is exactly the cosine.
double scs_unit(std::span<const double> k, std::span<const double> x, double p, double q);

/// Differentiable batched form used by the layer. windows [R x n],
/// kernels [U x n], p [U], q [1]; returns [R x U].
Tensor sharpened_cosine(const Tensor& windows, const Tensor& kernels, const Tensor& p, const Tensor& q);

struct ScsOptions {
  std::size_t units = 1;
  Extent2 kernel{3, 3};
  Extent2 stride{1, 1};
  double q_floor = 1e-6;
  double q_init = 0.1;
};

/// Sliding-window sharpened cosine similarity with 'valid' placement.
///
/// Parameters: kernel [U, kh, kw, Cin]; p_log [U] with p = exp(p_log);
/// q_raw [1] with q = softplus(q_raw) + q_floor. There is no bias, and the
/// output is never followed by an activation inside the layer.
class ScsLayer : public Layer {
 public:
  ScsLayer(const ScsOptions& options, std::size_t in_channels, SplitMix64& rng);

  std::string kind() const override { return "scs"; }
  Shape output_shape(const Shape& sample) const override;
  Tensor forward(const Tensor& batch) override;
  std::vector<Parameter> parameters() const override;
  std::size_t parameter_count() const override;

  /// Single image [H, W, Cin] -> [H', W', U], or batch [B, H, W, Cin] ->
  /// [B, H', W', U].
  Tensor apply(const Tensor& input);

  const ScsOptions& options() const { return options_; }
  std::size_t in_channels() const { return in_channels_; }
  Tensor& kernel() { return kernel_; }
  Tensor& p_log() { return p_log_; }
  Tensor& q_raw() { return q_raw_; }
  const Tensor& kernel() const { return kernel_; }
  const Tensor& p_log() const { return p_log_; }
  const Tensor& q_raw() const { return q_raw_; }

  double p(std::size_t unit) const;
  double q() const;

 private:
  ScsOptions options_;
  std::size_t in_channels_;
  Tensor kernel_;
  Tensor p_log_;
  Tensor q_raw_;
  std::map<Shape, IndexTable> tables_;
};

enum class PoolMode { kMaxAbs, kMax };

struct PoolSpec {
  Extent2 window{2, 2};
  Extent2 stride{2, 2};
  PoolMode mode = PoolMode::kMaxAbs;
};

/// Window pooling over [H, W, C] or [B, H, W, C]. kMaxAbs keeps the signed
/// value with the largest magnitude, kMax the largest signed value. Ties go
/// to the first element in (dy, dx) scan order. The gradient is routed to
/// the selected element only.
Tensor pool2d(const Tensor& input, const PoolSpec& spec);
inline Tensor maxabspool(const Tensor& input, PoolSpec spec) {
  spec.mode = PoolMode::kMaxAbs;
  return pool2d(input, spec);
}
inline Tensor maxpool(const Tensor& input, PoolSpec spec) {
  spec.mode = PoolMode::kMax;
  return pool2d(input, spec);
}

class PoolLayer : public Layer {
 public:
  explicit PoolLayer(const PoolSpec& spec) : spec_(spec) {}

  std::string kind() const override { return spec_.mode == PoolMode::kMaxAbs ? "pool:maxabs" : "pool:max"; }
  Shape output_shape(const Shape& sample) const override;
  Tensor forward(const Tensor& batch) override;
  const PoolSpec& spec() const { return spec_; }

 private:
  PoolSpec spec_;
};

}  // namespace scsnet
