#include "scsnet/train.hpp"

#include <algorithm>
#include <cmath>

#include "scsnet/error.hpp"
#include "scsnet/hsi.hpp"
#include "scsnet/loss.hpp"

namespace scsnet {

namespace {

constexpr const char* kModule = "model-train";

std::vector<int> labels_of(std::span<const LabeledPixel> pixels) {
  std::vector<int> out;
  out.reserve(pixels.size());
  for (const auto& p : pixels) out.push_back(p.label);
  return out;
}

void check_config(const TrainConfig& c) {
  if (c.batch_size == 0) throw ConfigError(kModule, "batch size must be positive");
  if (!(c.adam.learning_rate > 0.0)) throw ConfigError(kModule, "learning rate must be positive");
  if (!(c.adam.beta1 > 0.0 && c.adam.beta1 < 1.0 && c.adam.beta2 > 0.0 && c.adam.beta2 < 1.0)) {
    throw ConfigError(kModule, "Adam betas must lie in (0, 1)");
  }
  if (!(c.adam.epsilon > 0.0)) throw ConfigError(kModule, "Adam epsilon must be positive");
}

}  // namespace

Evaluation evaluate(Model& model, const PatchExtractor& patches, std::span<const LabeledPixel> pixels,
                    std::size_t batch_size) {
  Evaluation out;
  if (pixels.empty()) return out;
  NoGradGuard no_grad;
  double loss_sum = 0.0;
  std::size_t correct = 0;
  for (const auto& idx : sequential_batches(pixels.size(), batch_size)) {
    const auto chunk = pixels.subspan(idx.front(), idx.size());
    const Tensor logits = model.forward(patches.batch(chunk));
    const auto targets = labels_of(chunk);
    loss_sum += softmax_cross_entropy(logits, targets).item() * static_cast<double>(chunk.size());
    for (int p : predict_classes(logits)) out.predictions.push_back(p);
  }
  for (std::size_t i = 0; i < pixels.size(); ++i) correct += out.predictions[i] == pixels[i].label;
  out.loss = loss_sum / static_cast<double>(pixels.size());
  out.accuracy = 100.0 * static_cast<double>(correct) / static_cast<double>(pixels.size());
  return out;
}

double loss_and_gradients(Model& model, const Tensor& batch, std::span<const int> targets) {
  for (auto& p : model.parameters()) p.value.zero_grad();
  const Tensor loss = softmax_cross_entropy(model.forward(batch), targets);
  loss.backward();
  return loss.item();
}

std::vector<std::vector<double>> parameter_values(const Model& model) {
  std::vector<std::vector<double>> out;
  for (const auto& p : model.parameters()) out.emplace_back(p.value.data().begin(), p.value.data().end());
  return out;
}

void load_parameter_values(Model& model, const std::vector<std::vector<double>>& values) {
  auto params = model.parameters();
  if (params.size() != values.size()) throw DimensionError(kModule, "parameter count mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto dst = params[i].value.mutable_data();
    if (dst.size() != values[i].size()) throw DimensionError(kModule, "size mismatch for " + params[i].name);
    std::copy(values[i].begin(), values[i].end(), dst.begin());
  }
}

TrainState train(Model& model, const TrainData& data, const TrainConfig& config, TrainState state,
                 const std::function<void(const TrainState&)>& on_epoch) {
  check_config(config);
  if (!data.patches) throw ContractError(kModule, "training data has no patch source");
  if (data.train.empty() || data.val.empty()) throw ContractError(kModule, "train and validation sets must be nonempty");

  auto params = model.parameters();
  if (state.optimizer.m.empty()) state.optimizer = OptimizerState::for_parameters(params);
  const PatchExtractor& patches = *data.patches;

  while (state.epoch < config.epochs) {
    const std::size_t epoch = state.epoch + 1;
    double loss_sum = 0.0;
    std::size_t correct = 0;
    std::vector<LabeledPixel> chunk;
    for (const auto& idx : batch_iter(data.train.size(), config.batch_size, config.seed, epoch)) {
      chunk.clear();
      for (std::size_t i : idx) chunk.push_back(data.train[i]);
      const auto targets = labels_of(chunk);

      for (auto& p : params) p.value.zero_grad();
      const Tensor logits = model.forward(patches.batch(chunk));
      const Tensor loss = softmax_cross_entropy(logits, targets);
      if (!std::isfinite(loss.item())) {
        throw TrainingError(kModule, "loss diverged at epoch " + std::to_string(epoch));
      }
      loss.backward();
      adam_step(params, state.optimizer, config.adam);
      if (config.precision == Precision::kF32) {
        for (auto& p : params) {
          auto values = p.value.mutable_data();
          for (double& v : values) v = static_cast<double>(static_cast<float>(v));
        }
      }

      loss_sum += loss.item() * static_cast<double>(chunk.size());
      const auto predicted = predict_classes(logits);
      for (std::size_t i = 0; i < chunk.size(); ++i) correct += predicted[i] == targets[i];
    }

    const Evaluation val = evaluate(model, patches, data.val, config.batch_size);
    if (!std::isfinite(val.loss)) throw TrainingError(kModule, "validation loss diverged at epoch " + std::to_string(epoch));
    const double n = static_cast<double>(data.train.size());
    state.history.push_back({epoch, loss_sum / n, 100.0 * static_cast<double>(correct) / n, val.loss, val.accuracy});
    if (val.accuracy > state.best_val_acc) {
      state.best_val_acc = val.accuracy;
      state.best_epoch = epoch;
      state.best_params = parameter_values(model);
    }
    state.epoch = epoch;
    if (on_epoch) on_epoch(state);
  }
  return state;
}

}  // namespace scsnet
