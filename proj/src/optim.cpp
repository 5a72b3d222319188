#include "scsnet/optim.hpp"

#include <cmath>

#include "scsnet/error.hpp"

namespace scsnet {

namespace {
constexpr const char* kModule = "model-train";
}

OptimizerState OptimizerState::for_parameters(const std::vector<Parameter>& params) {
  OptimizerState s;
  for (const auto& p : params) {
    s.m.emplace_back(p.value.numel(), 0.0);
    s.v.emplace_back(p.value.numel(), 0.0);
  }
  return s;
}

void adam_step(std::vector<Parameter>& params, OptimizerState& state, const AdamConfig& config) {
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    throw DimensionError(kModule, "optimizer state does not match the parameter list");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (state.m[i].size() != params[i].value.numel() || state.v[i].size() != params[i].value.numel()) {
      throw DimensionError(kModule, "optimizer moments do not match parameter " + params[i].name);
    }
    for (double g : params[i].value.grad()) {
      if (!std::isfinite(g)) throw TrainingError(kModule, "non-finite gradient for parameter " + params[i].name);
    }
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(config.beta1, t);
  const double correction2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto grad = params[i].value.grad();
    auto values = params[i].value.mutable_data();
    auto& m = state.m[i];
    auto& v = state.v[i];
    for (std::size_t j = 0; j < values.size(); ++j) {
      const double g = grad.empty() ? 0.0 : grad[j];
      m[j] = config.beta1 * m[j] + (1.0 - config.beta1) * g;
      v[j] = config.beta2 * v[j] + (1.0 - config.beta2) * g * g;
      const double m_hat = m[j] / correction1;
      const double v_hat = v[j] / correction2;
      values[j] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
  }
}

}  // namespace scsnet
