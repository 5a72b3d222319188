#include "scsnet/cli/pipeline.hpp"

#include "scsnet/checkpoint.hpp"
#include "scsnet/error.hpp"

namespace scsnet::cli {

void require_file(const std::filesystem::path& path, const std::string& what) {
  if (path.empty()) throw ConfigError("cli", "no " + what + " path given");
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw ConfigError("cli", what + " file not found: " + path.string());
  }
}

PreparedData prepare_data(const ExperimentConfig& config, const std::filesystem::path& split_file) {
  validate(config);
  require_file(config.cube, "cube");
  require_file(config.labels, "labels");
  PreparedData d;
  const HsiCube raw = load_cube(config.cube);
  d.labels = load_labels(config.labels);
  if (raw.rows != d.labels.rows || raw.cols != d.labels.cols) {
    throw DataError("cli", "cube is " + std::to_string(raw.rows) + "x" + std::to_string(raw.cols) + " but labels are " +
                               std::to_string(d.labels.rows) + "x" + std::to_string(d.labels.cols));
  }
  d.classes = d.labels.num_classes();
  if (d.classes == 0) throw DataError("cli", "label grid has no labeled pixels");

  const HsiCube scaled = normalize(raw);
  d.pca = pca_fit(scaled, config.bands);
  d.reduced = pca_reduce(scaled, d.pca);
  if (config.train.precision == Precision::kF32) round_to_float(d.reduced.data);
  d.patches = std::make_unique<PatchExtractor>(d.reduced, config.patch);

  if (split_file.empty()) {
    d.split = split(d.labels, config.split_seed, config.fractions);
  } else {
    require_file(split_file, "split");
    d.split = load_split(split_file, d.labels.rows, d.labels.cols);
    validate_split(d.split, d.labels);
  }
  d.dataset_digest = dataset_digest(config.cube, config.labels);
  d.split_digest = split_digest(d.split);
  return d;
}

std::string checkpoint_config_text(const ExperimentConfig& config) {
  ExperimentConfig c = config;
  c.output.clear();
  return to_text(c);
}

}  // namespace scsnet::cli
