#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "scsnet/dataset.hpp"
#include "scsnet/model.hpp"
#include "scsnet/optim.hpp"

namespace scsnet {

enum class Precision { kF64, kF32 };

/// Training hyperparameters. Every value must be set by the caller; the
/// experiment defaults live in the configuration layer.
struct TrainConfig {
  std::size_t epochs = 0;
  std::size_t batch_size = 0;
  AdamConfig adam;
  std::uint64_t seed = 0;
  /// kF32 keeps parameters rounded to single precision after every update.
  Precision precision = Precision::kF64;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double train_acc = 0.0;  // percent
  double val_loss = 0.0;
  double val_acc = 0.0;  // percent
};

/// Everything needed to continue a run: completed epochs, optimizer moments,
/// the best-validation snapshot and the history so far. Batch order is a
/// pure function of (TrainConfig::seed, epoch), so no generator state is
/// carried beyond the epoch counter.
struct TrainState {
  std::size_t epoch = 0;
  OptimizerState optimizer;
  double best_val_acc = -1.0;
  std::size_t best_epoch = 0;
  std::vector<std::vector<double>> best_params;
  std::vector<EpochRecord> history;
};

struct TrainData {
  const PatchExtractor* patches = nullptr;
  std::vector<LabeledPixel> train;
  std::vector<LabeledPixel> val;
};

struct Evaluation {
  std::vector<int> predictions;
  double loss = 0.0;
  double accuracy = 0.0;  // percent
};

/// Forward pass without recording, in fixed-size sequential batches.
Evaluation evaluate(Model& model, const PatchExtractor& patches, std::span<const LabeledPixel> pixels,
                    std::size_t batch_size);

/// Mean loss of one batch and its gradient on every parameter (previous
/// gradients are cleared first).
double loss_and_gradients(Model& model, const Tensor& batch, std::span<const int> targets);

/// Runs epochs state.epoch+1 .. config.epochs. Pass a fresh TrainState to
/// start from scratch, or one restored from a checkpoint to resume.
/// `on_epoch` fires after each epoch with the updated state. A non-finite
/// loss raises TrainingError with the epoch number.
TrainState train(Model& model, const TrainData& data, const TrainConfig& config, TrainState state = {},
                 const std::function<void(const TrainState&)>& on_epoch = {});

/// Copies parameter values into the model (same order as parameters()).
void load_parameter_values(Model& model, const std::vector<std::vector<double>>& values);
std::vector<std::vector<double>> parameter_values(const Model& model);

}  // namespace scsnet
