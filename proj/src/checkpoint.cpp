#include "scsnet/checkpoint.hpp"

#include <openssl/evp.h>

#include <array>
#include <memory>

#include "bytes.hpp"
#include "scsnet/error.hpp"
#include "scsnet/hsi.hpp"

namespace scsnet {

namespace {

constexpr const char* kModule = "model-train";
constexpr std::uint32_t kVersion = 1;

struct Sha256 {
  Sha256() : ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free) {
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
      throw Error("digest", "cannot initialise SHA-256");
    }
  }
  void update(std::span<const std::uint8_t> bytes) { EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()); }
  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
      out.push_back(kHex[md[i] >> 4]);
      out.push_back(kHex[md[i] & 15]);
    }
    return out;
  }
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx;
};

}  // namespace

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  Sha256 h;
  h.update(bytes);
  return h.hex();
}

std::string sha256_hex(std::string_view text) {
  return sha256_hex(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string dataset_digest(const std::filesystem::path& cube, const std::filesystem::path& labels) {
  const std::string joined = sha256_hex(read_file(cube)) + ":" + sha256_hex(read_file(labels));
  return sha256_hex(joined);
}

std::string split_digest(const SplitAssignment& split) {
  std::vector<std::uint8_t> roles;
  roles.reserve(split.roles.size());
  for (Role r : split.roles) roles.push_back(static_cast<std::uint8_t>(r));
  return sha256_hex(roles);
}

Checkpoint make_checkpoint(const Model& model, const TrainState& state) {
  Checkpoint c;
  for (const auto& p : model.parameters()) {
    c.parameters.push_back({p.name, p.value.shape(), {p.value.data().begin(), p.value.data().end()}});
  }
  c.state = state;
  if (c.state.optimizer.m.empty()) c.state.optimizer = OptimizerState::for_parameters(model.parameters());
  return c;
}

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& c) {
  const auto& opt = c.state.optimizer;
  if (opt.m.size() != c.parameters.size() || opt.v.size() != c.parameters.size()) {
    throw ContractError(kModule, "checkpoint optimizer state does not match its parameters");
  }
  const bool has_best = !c.state.best_params.empty();
  bytes::Writer out;
  out.magic("HSCK");
  out.u32(kVersion);
  out.str(c.config_text);
  out.str(c.config_digest);
  out.str(c.dataset_digest);
  out.str(c.split_digest);
  out.u64(c.train_seed);
  out.u64(c.state.epoch);
  out.u64(c.state.optimizer.step);
  out.f64(c.state.best_val_acc);
  out.u64(c.state.best_epoch);
  out.u64(c.parameters.size());
  for (std::size_t i = 0; i < c.parameters.size(); ++i) {
    const auto& p = c.parameters[i];
    out.str(p.name);
    out.u32(static_cast<std::uint32_t>(p.shape.size()));
    for (std::size_t d : p.shape) out.u64(d);
    for (double v : p.values) out.f64(v);
    for (double v : opt.m[i]) out.f64(v);
    for (double v : opt.v[i]) out.f64(v);
    out.u8(has_best ? 1 : 0);
    if (has_best) {
      for (double v : c.state.best_params[i]) out.f64(v);
    }
  }
  out.u64(c.state.history.size());
  for (const auto& r : c.state.history) {
    out.u64(r.epoch);
    out.f64(r.train_loss);
    out.f64(r.train_acc);
    out.f64(r.val_loss);
    out.f64(r.val_acc);
  }
  return std::move(out.buffer());
}

Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& raw) {
  bytes::Reader in(raw, kModule);
  in.magic("HSCK");
  const std::size_t version_at = in.position();
  if (const auto v = in.u32(); v != kVersion) {
    throw FormatError(kModule, "unsupported checkpoint version " + std::to_string(v), version_at);
  }
  Checkpoint c;
  c.config_text = in.str();
  c.config_digest = in.str();
  c.dataset_digest = in.str();
  c.split_digest = in.str();
  c.train_seed = in.u64();
  c.state.epoch = in.u64();
  c.state.optimizer.step = in.u64();
  c.state.best_val_acc = in.f64();
  c.state.best_epoch = in.u64();
  const std::uint64_t count = in.u64();
  bool any_best = false;
  for (std::uint64_t i = 0; i < count; ++i) {
    NamedArray p;
    p.name = in.str();
    const std::uint32_t rank = in.u32();
    std::uint64_t n = 1;
    for (std::uint32_t d = 0; d < rank; ++d) {
      const std::size_t at = in.position();
      p.shape.push_back(in.u64());
      n *= p.shape.back();
      if (p.shape.back() == 0 || n > (std::uint64_t{1} << 32)) throw FormatError(kModule, "bad parameter shape", at);
    }
    in.need(n * 8 * 3, "parameter arrays");
    auto read_array = [&] {
      std::vector<double> values(n);
      for (auto& v : values) v = in.f64();
      return values;
    };
    p.values = read_array();
    c.state.optimizer.m.push_back(read_array());
    c.state.optimizer.v.push_back(read_array());
    if (in.u8() != 0) {
      any_best = true;
      c.state.best_params.push_back(read_array());
    }
    c.parameters.push_back(std::move(p));
  }
  if (any_best && c.state.best_params.size() != c.parameters.size()) {
    throw FormatError(kModule, "best-parameter snapshot is incomplete", in.position());
  }
  const std::uint64_t epochs = in.u64();
  for (std::uint64_t i = 0; i < epochs; ++i) {
    EpochRecord r;
    r.epoch = in.u64();
    r.train_loss = in.f64();
    r.train_acc = in.f64();
    r.val_loss = in.f64();
    r.val_acc = in.f64();
    c.state.history.push_back(r);
  }
  in.expect_end();
  return c;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  write_file(path, encode_checkpoint(checkpoint));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(read_file(path)); }

void restore_parameters(Model& model, const Checkpoint& checkpoint) {
  auto params = model.parameters();
  if (params.size() != checkpoint.parameters.size()) {
    throw ConfigError(kModule, "checkpoint has " + std::to_string(checkpoint.parameters.size()) +
                                   " parameters, model has " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& src = checkpoint.parameters[i];
    if (src.name != params[i].name || src.shape != params[i].value.shape()) {
      throw ConfigError(kModule, "checkpoint parameter " + src.name + " " + shape_str(src.shape) +
                                     " does not match model parameter " + params[i].name + " " +
                                     shape_str(params[i].value.shape()));
    }
    auto dst = params[i].value.mutable_data();
    std::copy(src.values.begin(), src.values.end(), dst.begin());
  }
}

}  // namespace scsnet
