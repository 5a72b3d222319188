#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scsnet/model.hpp"
#include "scsnet/train.hpp"

namespace scsnet {

/// Lowercase hex SHA-256.
std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(std::string_view text);
/// Digest binding a cube file and a label file together.
std::string dataset_digest(const std::filesystem::path& cube, const std::filesystem::path& labels);
/// Digest of the roles of a split (seed excluded).
std::string split_digest(const SplitAssignment& split);

struct NamedArray {
  std::string name;
  Shape shape;
  std::vector<double> values;
};

/// Training snapshot. Binary layout (little endian), version 1:
///   "HSCK" u32 version
///   str config_text, str config_digest, str dataset_digest, str split_digest
///   u64 train_seed, u64 epoch, u64 adam_step, f64 best_val_acc, u64 best_epoch
///   u64 P, then per parameter: str name, u32 rank, u64 dims[rank],
///     f64 values[n], f64 m[n], f64 v[n], u8 has_best, [f64 best[n]]
///   u64 H, then per epoch: u64 epoch, f64 train_loss, f64 train_acc,
///     f64 val_loss, f64 val_acc
/// where str is u64 length + bytes.
struct Checkpoint {
  std::string config_text;
  std::string config_digest;
  std::string dataset_digest;
  std::string split_digest;
  std::uint64_t train_seed = 0;
  std::vector<NamedArray> parameters;
  TrainState state;
};

Checkpoint make_checkpoint(const Model& model, const TrainState& state);
std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& checkpoint);
Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Copies checkpoint parameters into a model built from the same
/// architecture; names and shapes must match exactly (ConfigError).
void restore_parameters(Model& model, const Checkpoint& checkpoint);

}  // namespace scsnet
