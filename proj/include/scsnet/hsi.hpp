#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace scsnet {

/// Hyperspectral cube of rows x cols pixels with `bands` values each,
/// stored at ((i * cols) + j) * bands + b.
struct HsiCube {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t bands = 0;
  std::vector<double> data;

  double at(std::size_t i, std::size_t j, std::size_t b) const { return data[(i * cols + j) * bands + b]; }
  const double* pixel(std::size_t i, std::size_t j) const { return data.data() + (i * cols + j) * bands; }
};

/// Class per pixel, 0 = unlabeled, classes 1..C.
struct LabelGrid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint16_t> labels;

  std::uint16_t at(std::size_t i, std::size_t j) const { return labels[i * cols + j]; }
  /// Largest class id present (C).
  std::size_t num_classes() const;
  /// Pixel count per class id; index 0 counts unlabeled pixels.
  std::vector<std::size_t> histogram() const;
};

enum class Role : std::uint8_t { kNone = 0, kTrain = 1, kVal = 2, kTest = 3 };

struct SplitAssignment {
  std::uint64_t seed = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Role> roles;
};

// Binary formats, all little endian:
//   cube   "HSIC" u32 version=1, u32 M, u32 N, u32 B, M*N*B f32
//   labels "HSIG" u32 version=1, u32 M, u32 N, M*N u16
//   split  "HSIS" u32 version=1, u64 seed, M*N u8 role
// Readers throw FormatError with the failing byte offset and IoError when
// the file cannot be opened.
HsiCube load_cube(const std::filesystem::path& path);
void save_cube(const std::filesystem::path& path, const HsiCube& cube);
LabelGrid load_labels(const std::filesystem::path& path);
void save_labels(const std::filesystem::path& path, const LabelGrid& labels);
/// The split file carries no dimensions; the paired label grid supplies them.
SplitAssignment load_split(const std::filesystem::path& path, std::size_t rows, std::size_t cols);
void save_split(const std::filesystem::path& path, const SplitAssignment& split);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

/// Per-band min-max scaling to [0, 1]; constant bands become 0.
HsiCube normalize(const HsiCube& cube);

/// Rounds every value to the nearest float, as if stored in single precision.
void round_to_float(std::vector<double>& values);

}  // namespace scsnet
