#include "scsnet/loss.hpp"

#include <algorithm>
#include <cmath>

#include "autodiff_internal.hpp"
#include "scsnet/error.hpp"

namespace scsnet {

namespace {
constexpr const char* kModule = "model-train";
}

Tensor softmax_cross_entropy(const Tensor& logits, std::span<const int> targets) {
  if (logits.rank() != 2) throw DimensionError(kModule, "logits must be [B, C], got " + shape_str(logits.shape()));
  const std::size_t batch = logits.shape()[0], classes = logits.shape()[1];
  if (targets.size() != batch) throw DimensionError(kModule, "target count differs from batch size");
  for (int t : targets) {
    if (t < 1 || static_cast<std::size_t>(t) > classes) {
      throw ContractError(kModule, "target class " + std::to_string(t) + " outside 1.." + std::to_string(classes));
    }
  }

  const auto z = logits.data();
  std::vector<double> probs(batch * classes);
  double total = 0.0;
  for (std::size_t b = 0; b < batch; ++b) {
    const double* row = z.data() + b * classes;
    double peak = row[0];
    for (std::size_t c = 1; c < classes; ++c) peak = std::max(peak, row[c]);
    double norm = 0.0;
    for (std::size_t c = 0; c < classes; ++c) norm += std::exp(row[c] - peak);
    for (std::size_t c = 0; c < classes; ++c) probs[b * classes + c] = std::exp(row[c] - peak) / norm;
    total += std::log(norm) + peak - row[targets[b] - 1];
  }
  std::vector<int> owned(targets.begin(), targets.end());
  return detail::make_result(
      {1}, {total / static_cast<double>(batch)}, {logits},
      [probs = std::move(probs), owned = std::move(owned), batch, classes](detail::Node& self) {
        auto& g = self.inputs[0]->grad_buffer();
        const double scale = self.grad[0] / static_cast<double>(batch);
        for (std::size_t b = 0; b < batch; ++b) {
          for (std::size_t c = 0; c < classes; ++c) {
            const double onehot = static_cast<int>(c) + 1 == owned[b] ? 1.0 : 0.0;
            g[b * classes + c] += scale * (probs[b * classes + c] - onehot);
          }
        }
      });
}

std::vector<int> predict_classes(const Tensor& logits) {
  if (logits.rank() != 2) throw DimensionError(kModule, "logits must be [B, C], got " + shape_str(logits.shape()));
  const std::size_t batch = logits.shape()[0], classes = logits.shape()[1];
  const auto z = logits.data();
  std::vector<int> out(batch);
  for (std::size_t b = 0; b < batch; ++b) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < classes; ++c)
      if (z[b * classes + c] > z[b * classes + best]) best = c;
    out[b] = static_cast<int>(best) + 1;
  }
  return out;
}

}  // namespace scsnet
