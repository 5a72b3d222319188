#pragma once

#include <memory>
#include <string>
#include <vector>

#include "scsnet/cli/config.hpp"
#include "scsnet/hsi.hpp"
#include "scsnet/pca.hpp"

namespace scsnet::cli {

/// Data side of an experiment: normalized, PCA-reduced cube, labels, split
/// and the patch source built on them.
struct PreparedData {
  HsiCube reduced;
  LabelGrid labels;
  PcaModel pca;
  SplitAssignment split;
  std::size_t classes = 0;
  std::string dataset_digest;
  std::string split_digest;
  std::unique_ptr<PatchExtractor> patches;

  std::vector<LabeledPixel> pixels(Role role) const { return pixels_with_role(split, labels, role); }
};

/// Throws ConfigError naming the path when an input file does not exist.
void require_file(const std::filesystem::path& path, const std::string& what);

/// Loads cube and labels named by the config, then normalize -> PCA ->
/// patches. The split is computed from the config unless `split_file` is
/// given, in which case it is loaded and checked against the labels.
PreparedData prepare_data(const ExperimentConfig& config, const std::filesystem::path& split_file = {});

/// The configuration text stored in checkpoints: canonical, with the output
/// directory left out so that runs into different directories compare equal.
std::string checkpoint_config_text(const ExperimentConfig& config);

}  // namespace scsnet::cli
