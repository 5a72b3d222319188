#include "scsnet/cli/commands.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <iomanip>
#include <optional>
#include <sstream>

#include "scsnet/checkpoint.hpp"
#include "scsnet/cli/config.hpp"
#include "scsnet/cli/diagnostics.hpp"
#include "scsnet/cli/pipeline.hpp"
#include "scsnet/error.hpp"
#include "scsnet/metrics.hpp"

namespace scsnet::cli {

namespace {

constexpr const char* kModule = "cli";
constexpr double kGradcheckTolerance = 1e-4;

struct GlobalOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string precision;
  std::string cube;
  std::string labels;
  std::optional<std::size_t> epochs;
};

ExperimentConfig resolve_config(const GlobalOptions& g) {
  ExperimentConfig c = default_config();
  if (!g.config.empty()) {
    require_file(g.config, "config");
    c = load_config(g.config, c);
  }
  if (g.seed) {
    c.split_seed = *g.seed;
    c.train.seed = *g.seed;
  }
  if (!g.out.empty()) c.output = g.out;
  if (g.precision == "f32") c.train.precision = Precision::kF32;
  if (g.precision == "f64") c.train.precision = Precision::kF64;
  if (!g.cube.empty()) c.cube = g.cube;
  if (!g.labels.empty()) c.labels = g.labels;
  if (g.epochs) c.train.epochs = *g.epochs;
  return c;
}

std::string num(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  write_file(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(kModule, "cannot create directory " + dir.string() + ": " + ec.message());
}

std::vector<int> labels_of(const std::vector<LabeledPixel>& pixels) {
  std::vector<int> out;
  out.reserve(pixels.size());
  for (const auto& p : pixels) out.push_back(p.label);
  return out;
}

std::string history_text(const TrainState& state) {
  std::ostringstream out;
  out << "epoch train_loss train_acc val_loss val_acc\n";
  for (const auto& r : state.history) {
    out << r.epoch << ' ' << num(r.train_loss) << ' ' << num(r.train_acc) << ' ' << num(r.val_loss) << ' '
        << num(r.val_acc) << '\n';
  }
  return out.str();
}

Model model_for(const ExperimentConfig& config, std::size_t classes) {
  return build_model(model_config(config, classes), config.train.seed);
}

// Best-validation parameters when training recorded any, else the current ones.
void use_best(Model& model, const TrainState& state) {
  if (!state.best_params.empty()) load_parameter_values(model, state.best_params);
}

MetricReport report_for(Model& model, const PreparedData& data, const std::vector<LabeledPixel>& pixels,
                        std::size_t batch_size) {
  if (pixels.empty()) throw DataError(kModule, "no pixels hold the requested role");
  const Evaluation e = evaluate(model, *data.patches, pixels, batch_size);
  const auto truth = labels_of(pixels);
  return make_report(confusion(truth, e.predictions, data.classes));
}

std::vector<int> predict_all(Model& model, const PreparedData& data, std::size_t batch_size) {
  const auto pixels = labeled_pixels(data.labels);
  const Evaluation e = evaluate(model, *data.patches, pixels, batch_size);
  std::vector<int> grid(data.labels.rows * data.labels.cols, 0);
  for (std::size_t i = 0; i < pixels.size(); ++i) grid[pixels[i].row * data.labels.cols + pixels[i].col] = e.predictions[i];
  return grid;
}

struct LoadedRun {
  ExperimentConfig config;
  Checkpoint checkpoint;
  PreparedData data;
};

// Reads a checkpoint, rebuilds its data pipeline and refuses to continue
// when the dataset (or the given split) differs from the one trained on.
LoadedRun load_run(const GlobalOptions& g, const std::string& checkpoint_path, const std::string& split_path) {
  require_file(checkpoint_path, "checkpoint");
  LoadedRun run;
  run.checkpoint = load_checkpoint(checkpoint_path);
  run.config = parse_config(run.checkpoint.config_text, default_config());
  if (!g.cube.empty()) run.config.cube = g.cube;
  if (!g.labels.empty()) run.config.labels = g.labels;
  require_file(run.config.cube, "cube");
  require_file(run.config.labels, "labels");
  // Checked before the split is validated against the labels, so a foreign
  // dataset is reported as such rather than as a split mismatch.
  const std::string digest = dataset_digest(run.config.cube, run.config.labels);
  if (digest != run.checkpoint.dataset_digest) {
    throw ConfigError(kModule, "dataset digest " + digest.substr(0, 12) +
                                   " does not match the checkpoint's " + run.checkpoint.dataset_digest.substr(0, 12) +
                                   "; refusing to evaluate on a different dataset");
  }
  run.data = prepare_data(run.config, split_path);
  if (!split_path.empty() && run.data.split_digest != run.checkpoint.split_digest) {
    throw ConfigError(kModule, "split " + split_path + " is not the split the checkpoint was trained with");
  }
  return run;
}

int cmd_inspect(const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  const ExperimentConfig c = resolve_config(g);
  require_file(c.cube, "cube");
  require_file(c.labels, "labels");
  const HsiCube cube = load_cube(c.cube);
  const LabelGrid labels = load_labels(c.labels);
  out << "cube: " << cube.rows << " x " << cube.cols << " x " << cube.bands << '\n';
  out << "labels: " << labels.rows << " x " << labels.cols << '\n';
  if (cube.rows != labels.rows || cube.cols != labels.cols) err << "warning: cube and label grid sizes differ\n";
  const auto hist = labels.histogram();
  std::size_t labeled = 0;
  for (std::size_t c_id = 1; c_id < hist.size(); ++c_id) labeled += hist[c_id];
  out << "classes: " << labels.num_classes() << '\n';
  out << "labeled pixels: " << labeled << '\n';
  for (std::size_t c_id = 1; c_id < hist.size(); ++c_id) out << "class " << c_id << ": " << hist[c_id] << '\n';
  if (labeled == 0) err << "warning: 0 labeled pixels\n";
  return 0;
}

int cmd_convert_help(std::ostream& out) {
  out << "Input files are little-endian binaries:\n"
         "  cube   \"HSIC\" u32 version=1, u32 rows, u32 cols, u32 bands, rows*cols*bands f32\n"
         "         (pixel-major: value (i, j, b) at index (i*cols + j)*bands + b)\n"
         "  labels \"HSIG\" u32 version=1, u32 rows, u32 cols, rows*cols u16 (0 = unlabeled)\n"
         "  split  \"HSIS\" u32 version=1, u64 seed, rows*cols u8 (0 none, 1 train, 2 val, 3 test)\n"
         "tools/mat_to_hsi.py converts the usual .mat distributions of Indian Pines and\n"
         "Salinas; see docs/converting.md.\n";
  return 0;
}

int cmd_pca(const GlobalOptions& g, std::optional<std::size_t> bands, std::ostream& out) {
  ExperimentConfig c = resolve_config(g);
  if (bands) c.bands = *bands;
  require_file(c.cube, "cube");
  const HsiCube scaled = normalize(load_cube(c.cube));
  const PcaModel model = pca_fit(scaled, c.bands);
  const PcaModel full = pca_fit(scaled, scaled.bands);
  double total = 0.0;
  for (double l : full.eigenvalues) total += l;
  std::ostringstream table;
  table << "component eigenvalue explained cumulative\n";
  double cumulative = 0.0;
  for (std::size_t i = 0; i < model.components; ++i) {
    const double share = total > 0.0 ? model.eigenvalues[i] / total : 0.0;
    cumulative += share;
    table << i + 1 << ' ' << num(model.eigenvalues[i]) << ' ' << fixed(share, 6) << ' ' << fixed(cumulative, 6) << '\n';
  }
  out << table.str();
  ensure_dir(c.output);
  write_text(c.output / "pca.txt", table.str());
  save_cube(c.output / "reduced.hsic", pca_reduce(scaled, model));
  out << "wrote " << (c.output / "reduced.hsic").string() << '\n';
  return 0;
}

int cmd_split(const GlobalOptions& g, std::ostream& out) {
  const ExperimentConfig c = resolve_config(g);
  validate(c);
  require_file(c.labels, "labels");
  const LabelGrid labels = load_labels(c.labels);
  const SplitAssignment s = split(labels, c.split_seed, c.fractions);
  std::vector<std::array<std::size_t, 3>> counts(labels.num_classes() + 1, {0, 0, 0});
  for (std::size_t i = 0; i < s.roles.size(); ++i) {
    if (s.roles[i] != Role::kNone) ++counts[labels.labels[i]][static_cast<int>(s.roles[i]) - 1];
  }
  out << "class train val test\n";
  for (std::size_t c_id = 1; c_id < counts.size(); ++c_id) {
    out << c_id << ' ' << counts[c_id][0] << ' ' << counts[c_id][1] << ' ' << counts[c_id][2] << '\n';
  }
  ensure_dir(c.output);
  save_split(c.output / "split.hsis", s);
  out << "wrote " << (c.output / "split.hsis").string() << '\n';
  return 0;
}

int cmd_train(const GlobalOptions& g, bool resume, std::ostream& out) {
  const ExperimentConfig c = resolve_config(g);
  const PreparedData data = prepare_data(c);
  Model model = model_for(c, data.classes);
  TrainData train_data{data.patches.get(), data.pixels(Role::kTrain), data.pixels(Role::kVal)};
  const std::filesystem::path checkpoint_path = c.output / "model.hsck";

  TrainState state;
  if (resume) {
    require_file(checkpoint_path, "checkpoint");
    const Checkpoint previous = load_checkpoint(checkpoint_path);
    ExperimentConfig stored = parse_config(previous.config_text, default_config());
    stored.train.epochs = c.train.epochs;
    if (checkpoint_config_text(stored) != checkpoint_config_text(c)) {
      throw ConfigError(kModule, "cannot resume: configuration differs from the checkpoint beyond the epoch count");
    }
    if (previous.dataset_digest != data.dataset_digest || previous.split_digest != data.split_digest) {
      throw ConfigError(kModule, "cannot resume: dataset or split differs from the checkpoint");
    }
    restore_parameters(model, previous);
    state = previous.state;
    out << "resuming after epoch " << state.epoch << '\n';
  }

  ensure_dir(c.output);
  const std::string config_text = checkpoint_config_text(c);
  auto save = [&](const TrainState& s) {
    Checkpoint ck = make_checkpoint(model, s);
    ck.config_text = config_text;
    ck.config_digest = sha256_hex(config_text);
    ck.dataset_digest = data.dataset_digest;
    ck.split_digest = data.split_digest;
    ck.train_seed = c.train.seed;
    save_checkpoint(checkpoint_path, ck);
  };

  out << "train " << train_data.train.size() << " / val " << train_data.val.size() << " / test "
      << data.pixels(Role::kTest).size() << " pixels, " << data.classes << " classes, "
      << count_parameters(model).total << " parameters\n";
  state = train(model, train_data, c.train, std::move(state), [&](const TrainState& s) {
    const auto& r = s.history.back();
    out << "epoch " << r.epoch << '/' << c.train.epochs << " loss " << fixed(r.train_loss, 4) << " acc "
        << fixed(r.train_acc, 2) << " val_loss " << fixed(r.val_loss, 4) << " val_acc " << fixed(r.val_acc, 2) << '\n';
    save(s);
  });
  save(state);

  write_text(c.output / "history.txt", history_text(state));
  write_text(c.output / "config.cfg", to_text(c));
  save_split(c.output / "split.hsis", data.split);

  use_best(model, state);
  const MetricReport report = report_for(model, data, train_data.val, c.train.batch_size);
  write_text(c.output / "report_val.txt", format_report_text(report));
  write_text(c.output / "report_val.kv", format_report_kv(report));
  out << "validation report (best epoch " << state.best_epoch << ")\n" << format_report_text(report);
  return 0;
}

int cmd_eval(const GlobalOptions& g, const std::string& checkpoint, const std::string& split_path,
             const std::string& role_name, const std::string& map_path, std::ostream& out) {
  if (split_path.empty()) throw ConfigError(kModule, "eval needs --split");
  LoadedRun run = load_run(g, checkpoint, split_path);
  Model model = model_for(run.config, run.data.classes);
  restore_parameters(model, run.checkpoint);
  use_best(model, run.checkpoint.state);
  const Role role = role_name == "test" ? Role::kTest : Role::kVal;
  const MetricReport report = report_for(model, run.data, run.data.pixels(role), run.config.train.batch_size);
  out << format_report_text(report);
  if (!g.out.empty()) {
    ensure_dir(g.out);
    write_text(std::filesystem::path(g.out) / ("report_" + role_name + ".txt"), format_report_text(report));
    write_text(std::filesystem::path(g.out) / ("report_" + role_name + ".kv"), format_report_kv(report));
  }
  if (!map_path.empty()) {
    emit_map(map_path, run.data.labels, predict_all(model, run.data, run.config.train.batch_size));
    out << "wrote " << map_path << '\n';
  }
  return 0;
}

int cmd_map(const GlobalOptions& g, const std::string& checkpoint, const std::string& image, std::ostream& out) {
  if (image.empty()) throw ConfigError(kModule, "map needs --image");
  LoadedRun run = load_run(g, checkpoint, "");
  Model model = model_for(run.config, run.data.classes);
  restore_parameters(model, run.checkpoint);
  use_best(model, run.checkpoint.state);
  emit_map(image, run.data.labels, predict_all(model, run.data, run.config.train.batch_size));
  out << "wrote " << image << '\n';
  return 0;
}

int cmd_paramcount(const GlobalOptions& g, std::ostream& out) {
  const ExperimentConfig c = resolve_config(g);
  validate(c);
  const Shape input{c.patch, c.patch, c.bands};
  std::vector<std::pair<std::string, std::vector<LayerEntry>>> models;
  if (!g.config.empty()) models.emplace_back("config", c.layers);
  for (const char* name : {"scsnet", "cnn3d", "hybrid"}) models.emplace_back(name, reference_layers(name));

  std::vector<std::size_t> totals;
  for (const auto& [name, layers] : models) {
    const Model m = build_model(model_config(layers, input, c.classes), 0);
    const ParameterCount count = count_parameters(m);
    out << name << " on " << shape_str(input) << " with " << c.classes << " classes\n";
    for (const auto& l : count.layers) {
      out << "  " << std::left << std::setw(4) << l.index << std::setw(14) << l.kind << std::setw(18)
          << shape_str(l.output) << std::right << std::setw(10) << l.parameters << '\n';
    }
    out << "  total " << count.total << '\n';
    totals.push_back(count.total);
  }
  out << "summary";
  for (std::size_t i = 0; i < models.size(); ++i) out << ' ' << models[i].first << '=' << totals[i];
  out << '\n';
  const std::size_t scs = totals[totals.size() - 3], cnn = totals[totals.size() - 2];
  out << "scsnet / cnn3d = " << fixed(static_cast<double>(scs) / static_cast<double>(cnn), 4) << '\n';
  return 0;
}

int cmd_gradcheck(const GlobalOptions& g, std::size_t cases, std::ostream& out) {
  const std::uint64_t seed = g.seed.value_or(0);
  const GradcheckSummary s = gradcheck_suite(seed, cases);
  for (const auto& c : s.cases) out << std::left << std::setw(16) << c.name << std::setw(18) << c.shape << num(c.error) << '\n';
  const bool pass = s.max_error <= kGradcheckTolerance;
  out << "max relative error " << num(s.max_error) << " over " << s.cases.size() << " cases: "
      << (pass ? "PASS" : "FAIL") << '\n';
  return pass ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sharpened cosine similarity networks for hyperspectral image classification", "scsnet"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--config", g.config, "Experiment config file");
  app.add_option("--seed", g.seed, "Seed for the split and training (gradcheck: case seed)");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--precision", g.precision, "Training precision")->check(CLI::IsMember({"f32", "f64"}));
  app.add_option("--cube", g.cube, "Cube file (overrides the config)");
  app.add_option("--labels", g.labels, "Label file (overrides the config)");

  auto* inspect = app.add_subcommand("inspect", "Print cube dimensions and the class histogram");
  app.add_subcommand("convert-help", "Describe the input file formats");
  std::optional<std::size_t> bands;
  auto* pca = app.add_subcommand("pca", "Fit PCA and write the reduced cube");
  pca->add_option("--bands", bands, "Components to keep");
  auto* split_cmd = app.add_subcommand("split", "Write a stratified train/val/test split");
  bool resume = false;
  auto* train_cmd = app.add_subcommand("train", "Train a model and write its artifacts");
  train_cmd->add_flag("--resume", resume, "Continue from <out>/model.hsck");
  train_cmd->add_option("--epochs", g.epochs, "Override the epoch count");
  std::string checkpoint, split_path, role = "test", map_path, image;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on the val or test pixels of a split");
  eval_cmd->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
  eval_cmd->add_option("--split", split_path, "Split file")->required();
  eval_cmd->add_option("--role", role, "val or test")->check(CLI::IsMember({"val", "test"}));
  eval_cmd->add_option("--map", map_path, "Also write a P6 classification map");
  auto* map_cmd = app.add_subcommand("map", "Write the classification map of a checkpoint");
  map_cmd->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
  map_cmd->add_option("--image", image, "Output P6 image")->required();
  auto* paramcount = app.add_subcommand("paramcount", "Per-layer parameter counts of the reference models");
  std::size_t cases = 20;
  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference check of the layer gradients");
  gradcheck->add_option("--cases", cases, "Cases per layer kind");
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (inspect->parsed()) return cmd_inspect(g, out, err);
    if (app.got_subcommand("convert-help")) return cmd_convert_help(out);
    if (pca->parsed()) return cmd_pca(g, bands, out);
    if (split_cmd->parsed()) return cmd_split(g, out);
    if (train_cmd->parsed()) return cmd_train(g, resume, out);
    if (eval_cmd->parsed()) return cmd_eval(g, checkpoint, split_path, role, map_path, out);
    if (map_cmd->parsed()) return cmd_map(g, checkpoint, image, out);
    if (paramcount->parsed()) return cmd_paramcount(g, out);
    if (gradcheck->parsed()) return cmd_gradcheck(g, cases, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace scsnet::cli
