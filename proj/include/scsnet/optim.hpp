#pragma once

#include <cstdint>
#include <vector>

#include "scsnet/layer.hpp"

namespace scsnet {

struct AdamConfig {
  double learning_rate = 0.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// First/second moment estimates per parameter, aligned with the parameter
/// list they were created for, plus the step counter.
struct OptimizerState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  std::uint64_t step = 0;

  static OptimizerState for_parameters(const std::vector<Parameter>& params);
};

/// One bias-corrected Adam update using the gradients currently stored on
/// the parameters (a parameter without a gradient counts as zero gradient).
/// Throws TrainingError naming the first parameter with a non-finite
/// gradient; nothing is modified in that case.
void adam_step(std::vector<Parameter>& params, OptimizerState& state, const AdamConfig& config);

}  // namespace scsnet
