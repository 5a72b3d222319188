#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "scsnet/dataset.hpp"
#include "scsnet/model.hpp"
#include "scsnet/train.hpp"

namespace scsnet::cli {

/// A layer line from a config file. `units_from_classes` marks
/// "units=classes", resolved against the dataset's class count.
struct LayerEntry {
  LayerSpec spec;
  bool units_from_classes = false;
};

struct ExperimentConfig {
  std::filesystem::path cube;
  std::filesystem::path labels;
  std::size_t bands = 0;  // B' after PCA
  std::size_t patch = 0;  // k
  std::uint64_t split_seed = 0;
  SplitFractions fractions;
  std::size_t classes = 0;  // used when no dataset is at hand (paramcount)
  std::vector<LayerEntry> layers;
  TrainConfig train;
  std::filesystem::path output;
};

/// The experiment defaults: 15 PCA bands, 15 x 15 patches, 40/30/30 split,
/// 250 epochs of batch 256 at learning rate 0.001, 16 classes, and the
/// reference SCS network.
ExperimentConfig default_config();

/// Reference architectures by name: "scsnet", "cnn3d", "hybrid".
std::vector<LayerEntry> reference_layers(const std::string& name);

/// Parses the key=value format on top of `base`. Sections: [data], [split],
/// [model], [train], [output]. Repeated `layer =` lines in [model] replace
/// the base architecture. Throws ConfigError naming the line.
ExperimentConfig parse_config(const std::string& text, ExperimentConfig base);
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base);

/// Canonical text; parse_config(to_text(c), {}) reproduces c.
std::string to_text(const ExperimentConfig& config);

std::string format_layer(const LayerEntry& entry);
LayerEntry parse_layer(const std::string& text);

/// Model configuration for a given sample shape and class count.
ModelConfig model_config(const ExperimentConfig& config, std::size_t classes);
ModelConfig model_config(const std::vector<LayerEntry>& layers, Shape input, std::size_t classes);

/// Throws ConfigError for inconsistent values (even patch, fractions not
/// summing to 1, zero batch, ...).
void validate(const ExperimentConfig& config);

}  // namespace scsnet::cli
