#include "scsnet/cli/diagnostics.hpp"

#include <algorithm>
#include <functional>

#include "scsnet/conv.hpp"
#include "scsnet/gradcheck.hpp"
#include "scsnet/model.hpp"
#include "scsnet/ops.hpp"
#include "scsnet/scs.hpp"

namespace scsnet::cli {

namespace {

Tensor random_tensor(const Shape& shape, SplitMix64& rng, bool requires_grad) {
  std::vector<double> v(shape_numel(shape));
  for (double& x : v) x = rng.normal();
  return Tensor(shape, std::move(v), requires_grad);
}

std::size_t pick(SplitMix64& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
}

// Weighted sum of the output, so every output coordinate reaches the loss
// with a distinct coefficient.
GradcheckCase check(const std::string& name, const std::function<Tensor()>& out_fn, std::vector<Tensor> leaves,
                    SplitMix64& rng, double eps) {
  Tensor weights;
  {
    NoGradGuard no_grad;
    weights = random_tensor(out_fn().shape(), rng, false);
  }
  GradcheckCase c;
  c.name = name;
  c.shape = shape_str(leaves.front().shape());
  c.error = finite_difference_check([&] { return sum(mul(out_fn(), weights)); }, std::move(leaves), eps);
  return c;
}

GradcheckCase scs_case(SplitMix64 rng, std::uint64_t index, double eps) {
  const std::size_t cin = pick(rng, 1, 3);
  ScsOptions o;
  o.units = pick(rng, 1, 3);
  o.kernel = {pick(rng, 1, 3), pick(rng, 1, 3)};
  o.stride = {pick(rng, 1, 2), pick(rng, 1, 2)};
  ScsLayer layer(o, cin, rng);
  for (double& v : layer.p_log().mutable_data()) v = rng.uniform(-0.2, 0.5);
  layer.q_raw().mutable_data()[0] = rng.uniform(-3.0, 1.0);
  const Tensor x = random_tensor({pick(rng, 1, 2), o.kernel.h + pick(rng, 0, 3), o.kernel.w + pick(rng, 0, 3), cin},
                                 rng, true);
  return check("scs#" + std::to_string(index), [&] { return layer.apply(x); },
               {x, layer.kernel(), layer.p_log(), layer.q_raw()}, rng, eps);
}

GradcheckCase pool_case(SplitMix64 rng, std::uint64_t index, double eps) {
  PoolSpec spec;
  spec.window = {pick(rng, 1, 3), pick(rng, 1, 3)};
  spec.stride = {pick(rng, 1, 3), pick(rng, 1, 3)};
  const Tensor x = random_tensor(
      {pick(rng, 1, 2), spec.window.h + pick(rng, 0, 4), spec.window.w + pick(rng, 0, 4), pick(rng, 1, 3)}, rng, true);
  return check("maxabspool#" + std::to_string(index), [&] { return maxabspool(x, spec); }, {x}, rng, eps);
}

GradcheckCase conv_case(SplitMix64 rng, std::uint64_t index, ConvKind kind, double eps) {
  ConvOptions o;
  o.kind = kind;
  o.units = pick(rng, 1, 3);
  o.kernel = {pick(rng, 1, 3), pick(rng, 1, 3), pick(rng, 1, 3)};
  o.stride = {pick(rng, 1, 2), pick(rng, 1, 2), pick(rng, 1, 2)};
  o.activation = rng.below(2) == 0 ? Activation::kRelu : Activation::kNone;
  const std::size_t cin = pick(rng, 1, 2);
  ConvLayer layer(o, cin, rng);
  for (double& v : layer.bias().mutable_data()) v = rng.uniform(-0.5, 0.5);
  Shape shape{pick(rng, 1, 2), o.kernel.h + pick(rng, 0, 2), o.kernel.w + pick(rng, 0, 2)};
  if (kind == ConvKind::kConv3d) shape.push_back(o.kernel.d + pick(rng, 0, 2));
  shape.push_back(cin);
  const Tensor x = random_tensor(shape, rng, true);
  const std::string name = (kind == ConvKind::kConv2d ? "conv2d#" : "conv3d#") + std::to_string(index);
  return check(name, [&] { return layer.forward(x); }, {x, layer.kernel(), layer.bias()}, rng, eps);
}

GradcheckCase dense_case(SplitMix64 rng, std::uint64_t index, double eps) {
  const std::size_t in = pick(rng, 1, 6), out = pick(rng, 1, 4);
  DenseLayer layer(in, out, rng.below(2) == 0 ? Activation::kRelu : Activation::kNone, rng);
  auto params = layer.parameters();
  for (double& v : params[1].value.mutable_data()) v = rng.uniform(-0.5, 0.5);
  const Tensor x = random_tensor({pick(rng, 1, 3), in}, rng, true);
  return check("dense#" + std::to_string(index), [&] { return layer.forward(x); },
               {x, params[0].value, params[1].value}, rng, eps);
}

}  // namespace

GradcheckCase scs_gradcheck_case(std::uint64_t seed, std::uint64_t index, double eps) {
  return scs_case(SplitMix64::stream(seed, index), index, eps);
}

GradcheckSummary gradcheck_suite(std::uint64_t seed, std::size_t per_kind, double eps) {
  GradcheckSummary s;
  for (std::uint64_t i = 0; i < per_kind; ++i) {
    s.cases.push_back(scs_gradcheck_case(seed, i, eps));
    s.cases.push_back(pool_case(SplitMix64::stream(seed, 1000 + i), i, eps));
    s.cases.push_back(conv_case(SplitMix64::stream(seed, 2000 + i), i, ConvKind::kConv2d, eps));
    s.cases.push_back(conv_case(SplitMix64::stream(seed, 3000 + i), i, ConvKind::kConv3d, eps));
    s.cases.push_back(dense_case(SplitMix64::stream(seed, 4000 + i), i, eps));
  }
  for (const auto& c : s.cases) s.max_error = std::max(s.max_error, c.error);
  return s;
}

}  // namespace scsnet::cli
