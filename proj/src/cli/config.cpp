#include "scsnet/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "scsnet/error.hpp"

namespace scsnet::cli {

namespace {

constexpr const char* kModule = "cli";

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v)) {
    throw ConfigError(kModule, where + ": expected a number, got \"" + s + "\"");
  }
  return v;
}

std::uint64_t parse_uint(const std::string& s, const std::string& where) {
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw ConfigError(kModule, where + ": expected a nonnegative integer, got \"" + s + "\"");
  }
  return v;
}

std::vector<std::size_t> parse_extent(const std::string& s, const std::string& where) {
  std::vector<std::size_t> out;
  std::stringstream in(s);
  std::string part;
  while (std::getline(in, part, 'x')) out.push_back(parse_uint(part, where));
  if (out.empty() || out.size() > 3) throw ConfigError(kModule, where + ": bad extent \"" + s + "\"");
  return out;
}

Extent3 to_extent(const std::vector<std::size_t>& v) {
  Extent3 e{v[0], v.size() > 1 ? v[1] : v[0], v.size() > 2 ? v[2] : 1};
  return e;
}

std::string format_extent(const Extent3& e, bool three) {
  std::string s = std::to_string(e.h) + "x" + std::to_string(e.w);
  if (three) s += "x" + std::to_string(e.d);
  return s;
}

LayerKind parse_kind(const std::string& s) {
  static const std::map<std::string, LayerKind> kinds{
      {"scs", LayerKind::kScs},         {"conv2d", LayerKind::kConv2d}, {"conv3d", LayerKind::kConv3d},
      {"pool", LayerKind::kPool},       {"flatten", LayerKind::kFlatten}, {"dense", LayerKind::kDense},
      {"relu", LayerKind::kRelu},
  };
  const auto it = kinds.find(s);
  if (it == kinds.end()) throw ConfigError(kModule, "unknown layer kind \"" + s + "\"");
  return it->second;
}

LayerEntry layer(const std::string& text) { return parse_layer(text); }

}  // namespace

LayerEntry parse_layer(const std::string& text) {
  std::istringstream in(text);
  std::string kind_name;
  in >> kind_name;
  LayerEntry entry;
  LayerSpec& s = entry.spec;
  s.kind = parse_kind(kind_name);
  s.activation = Activation::kNone;
  if (s.kind == LayerKind::kPool) s.stride = {2, 2, 1};
  if (s.kind == LayerKind::kPool) s.kernel = {2, 2, 1};
  bool stride_given = false;
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw ConfigError(kModule, "layer option \"" + token + "\" is not key=value");
    const std::string key = token.substr(0, eq), value = token.substr(eq + 1);
    const std::string where = "layer " + kind_name + " " + key;
    if (key == "units") {
      if (value == "classes") {
        entry.units_from_classes = true;
      } else {
        s.units = parse_uint(value, where);
      }
    } else if (key == "kernel" || key == "window") {
      s.kernel = to_extent(parse_extent(value, where));
    } else if (key == "stride") {
      s.stride = to_extent(parse_extent(value, where));
      stride_given = true;
    } else if (key == "mode") {
      if (value == "maxabs") {
        s.pool_mode = PoolMode::kMaxAbs;
      } else if (value == "max") {
        s.pool_mode = PoolMode::kMax;
      } else {
        throw ConfigError(kModule, where + ": expected maxabs or max");
      }
    } else if (key == "activation") {
      if (value == "relu") {
        s.activation = Activation::kRelu;
      } else if (value == "none") {
        s.activation = Activation::kNone;
      } else {
        throw ConfigError(kModule, where + ": expected relu or none");
      }
    } else if (key == "q_floor") {
      s.q_floor = parse_double(value, where);
    } else if (key == "q_init") {
      s.q_init = parse_double(value, where);
    } else {
      throw ConfigError(kModule, "unknown layer option \"" + key + "\" for " + kind_name);
    }
  }
  if (s.kind == LayerKind::kPool && !stride_given) s.stride = s.kernel;
  if (s.kind == LayerKind::kScs && s.activation != Activation::kNone) {
    throw ConfigError(kModule, "scs layers take no activation");
  }
  return entry;
}

std::string format_layer(const LayerEntry& entry) {
  const LayerSpec& s = entry.spec;
  std::string out = to_string(s.kind);
  const std::string units = entry.units_from_classes ? "classes" : std::to_string(s.units);
  const bool three = s.kind == LayerKind::kConv3d;
  switch (s.kind) {
    case LayerKind::kScs:
      out += " units=" + units + " kernel=" + format_extent(s.kernel, false) + " stride=" +
             format_extent(s.stride, false) + " q_floor=" + format_double(s.q_floor) + " q_init=" +
             format_double(s.q_init);
      break;
    case LayerKind::kConv2d:
    case LayerKind::kConv3d:
      out += " units=" + units + " kernel=" + format_extent(s.kernel, three) + " stride=" +
             format_extent(s.stride, three) + " activation=" + (s.activation == Activation::kRelu ? "relu" : "none");
      break;
    case LayerKind::kPool:
      out += std::string(" mode=") + (s.pool_mode == PoolMode::kMaxAbs ? "maxabs" : "max") + " window=" +
             format_extent(s.kernel, false) + " stride=" + format_extent(s.stride, false);
      break;
    case LayerKind::kDense:
      out += " units=" + units + " activation=" + (s.activation == Activation::kRelu ? "relu" : "none");
      break;
    case LayerKind::kFlatten:
    case LayerKind::kRelu: break;
  }
  return out;
}

std::vector<LayerEntry> reference_layers(const std::string& name) {
  if (name == "scsnet") {
    return {layer("scs units=8 kernel=3x3 stride=1x1"), layer("pool mode=maxabs window=2x2 stride=2x2"),
            layer("scs units=16 kernel=3x3 stride=1x1"), layer("pool mode=maxabs window=2x2 stride=2x2"),
            layer("flatten"), layer("dense units=classes")};
  }
  if (name == "cnn3d") {
    return {layer("conv3d units=8 kernel=3x3x7 activation=relu"), layer("conv3d units=16 kernel=3x3x5 activation=relu"),
            layer("pool mode=max window=2x2 stride=2x2"), layer("flatten"), layer("dense units=64 activation=relu"),
            layer("dense units=classes")};
  }
  if (name == "hybrid") {
    return {layer("conv3d units=8 kernel=3x3x7 activation=relu"), layer("conv2d units=16 kernel=3x3 activation=relu"),
            layer("pool mode=max window=2x2 stride=2x2"), layer("flatten"), layer("dense units=64 activation=relu"),
            layer("dense units=classes")};
  }
  throw ConfigError(kModule, "unknown reference architecture \"" + name + "\"");
}

ExperimentConfig default_config() {
  ExperimentConfig c;
  c.bands = 15;
  c.patch = 15;
  c.split_seed = 42;
  c.fractions = {0.4, 0.3, 0.3};
  c.classes = 16;
  c.layers = reference_layers("scsnet");
  c.train.epochs = 250;
  c.train.batch_size = 256;
  c.train.adam.learning_rate = 0.001;
  c.train.seed = 1;
  c.output = "runs/default";
  return c;
}

ExperimentConfig parse_config(const std::string& text, ExperimentConfig c) {
  std::istringstream in(text);
  std::string line, section;
  bool layers_reset = false;
  for (int number = 1; std::getline(in, line); ++number) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(number);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(kModule, where + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "data" && section != "split" && section != "model" && section != "train" && section != "output") {
        throw ConfigError(kModule, where + ": unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(kModule, where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    const std::string at = where + " (" + section + "." + key + ")";
    try {
      if (section == "data" && key == "cube") {
        c.cube = value;
      } else if (section == "data" && key == "labels") {
        c.labels = value;
      } else if (section == "data" && key == "bands") {
        c.bands = parse_uint(value, at);
      } else if (section == "data" && key == "patch") {
        c.patch = parse_uint(value, at);
      } else if (section == "split" && key == "seed") {
        c.split_seed = parse_uint(value, at);
      } else if (section == "split" && key == "train") {
        c.fractions.train = parse_double(value, at);
      } else if (section == "split" && key == "val") {
        c.fractions.val = parse_double(value, at);
      } else if (section == "split" && key == "test") {
        c.fractions.test = parse_double(value, at);
      } else if (section == "model" && key == "classes") {
        c.classes = parse_uint(value, at);
      } else if (section == "model" && key == "layer") {
        if (!layers_reset) {
          c.layers.clear();
          layers_reset = true;
        }
        c.layers.push_back(parse_layer(value));
      } else if (section == "model" && key == "reference") {
        c.layers = reference_layers(value);
        layers_reset = true;
      } else if (section == "train" && key == "epochs") {
        c.train.epochs = parse_uint(value, at);
      } else if (section == "train" && key == "batch_size") {
        c.train.batch_size = parse_uint(value, at);
      } else if (section == "train" && key == "learning_rate") {
        c.train.adam.learning_rate = parse_double(value, at);
      } else if (section == "train" && key == "beta1") {
        c.train.adam.beta1 = parse_double(value, at);
      } else if (section == "train" && key == "beta2") {
        c.train.adam.beta2 = parse_double(value, at);
      } else if (section == "train" && key == "epsilon") {
        c.train.adam.epsilon = parse_double(value, at);
      } else if (section == "train" && key == "seed") {
        c.train.seed = parse_uint(value, at);
      } else if (section == "train" && key == "precision") {
        if (value == "f64") {
          c.train.precision = Precision::kF64;
        } else if (value == "f32") {
          c.train.precision = Precision::kF32;
        } else {
          throw ConfigError(kModule, at + ": expected f32 or f64");
        }
      } else if (section == "output" && key == "dir") {
        c.output = value;
      } else {
        throw ConfigError(kModule, at + ": unknown key");
      }
    } catch (const ConfigError& e) {
      const std::string msg = e.what();
      if (msg.find(where) != std::string::npos) throw;
      throw ConfigError(kModule, at + ": " + msg);
    }
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError(kModule, "cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), std::move(base));
}

std::string to_text(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "[data]\n";
  out << "cube = " << c.cube.string() << '\n';
  out << "labels = " << c.labels.string() << '\n';
  out << "bands = " << c.bands << '\n';
  out << "patch = " << c.patch << '\n';
  out << "\n[split]\n";
  out << "seed = " << c.split_seed << '\n';
  out << "train = " << format_double(c.fractions.train) << '\n';
  out << "val = " << format_double(c.fractions.val) << '\n';
  out << "test = " << format_double(c.fractions.test) << '\n';
  out << "\n[model]\n";
  out << "classes = " << c.classes << '\n';
  for (const auto& l : c.layers) out << "layer = " << format_layer(l) << '\n';
  out << "\n[train]\n";
  out << "epochs = " << c.train.epochs << '\n';
  out << "batch_size = " << c.train.batch_size << '\n';
  out << "learning_rate = " << format_double(c.train.adam.learning_rate) << '\n';
  out << "beta1 = " << format_double(c.train.adam.beta1) << '\n';
  out << "beta2 = " << format_double(c.train.adam.beta2) << '\n';
  out << "epsilon = " << format_double(c.train.adam.epsilon) << '\n';
  out << "seed = " << c.train.seed << '\n';
  out << "precision = " << (c.train.precision == Precision::kF32 ? "f32" : "f64") << '\n';
  out << "\n[output]\n";
  out << "dir = " << c.output.string() << '\n';
  return out.str();
}

ModelConfig model_config(const std::vector<LayerEntry>& layers, Shape input, std::size_t classes) {
  ModelConfig m;
  m.classes = classes;
  m.input = std::move(input);
  for (const auto& l : layers) {
    LayerSpec s = l.spec;
    if (l.units_from_classes) s.units = classes;
    m.layers.push_back(s);
  }
  return m;
}

ModelConfig model_config(const ExperimentConfig& config, std::size_t classes) {
  return model_config(config.layers, {config.patch, config.patch, config.bands}, classes);
}

void validate(const ExperimentConfig& c) {
  if (c.patch == 0 || c.patch % 2 == 0) throw ConfigError(kModule, "patch size must be odd, got " + std::to_string(c.patch));
  if (c.bands == 0) throw ConfigError(kModule, "bands must be at least 1");
  const double sum = c.fractions.train + c.fractions.val + c.fractions.test;
  if (!(c.fractions.train > 0.0) || c.fractions.val < 0.0 || c.fractions.test < 0.0 || std::fabs(sum - 1.0) > 1e-9) {
    throw ConfigError(kModule, "split fractions must be nonnegative, train positive, and sum to 1");
  }
  if (c.train.batch_size == 0) throw ConfigError(kModule, "batch_size must be positive");
  if (!(c.train.adam.learning_rate > 0.0)) throw ConfigError(kModule, "learning_rate must be positive");
  if (c.layers.empty()) throw ConfigError(kModule, "model has no layers");
}

}  // namespace scsnet::cli
