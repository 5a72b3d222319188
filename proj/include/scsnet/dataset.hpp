#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "scsnet/hsi.hpp"
#include "scsnet/tensor.hpp"

namespace scsnet {

struct LabeledPixel {
  std::size_t row = 0;
  std::size_t col = 0;
  int label = 0;  // 1..C
};

/// One k x k x B' patch centred on (row, col), stored [y][x][band].
struct Sample {
  std::vector<double> patch;
  int label = 0;
  std::size_t row = 0;
  std::size_t col = 0;
};

/// Labeled pixels in row-major order.
std::vector<LabeledPixel> labeled_pixels(const LabelGrid& labels);

/// Cuts k x k windows out of a cube zero-padded by k/2 on every side.
class PatchExtractor {
 public:
  /// k must be odd (ContractError otherwise).
  PatchExtractor(const HsiCube& cube, std::size_t k);

  std::size_t k() const { return k_; }
  std::size_t bands() const { return bands_; }
  std::size_t patch_size() const { return k_ * k_ * bands_; }
  Shape sample_shape() const { return {k_, k_, bands_}; }

  void copy_patch(std::size_t row, std::size_t col, std::span<double> out) const;
  /// Batch tensor [n, k, k, B'] for the given pixels.
  Tensor batch(std::span<const LabeledPixel> pixels) const;

 private:
  std::size_t k_;
  std::size_t bands_;
  std::size_t padded_cols_;
  std::vector<double> padded_;
};

/// One Sample per labeled pixel, row-major.
std::vector<Sample> extract_patches(const HsiCube& cube, const LabelGrid& labels, std::size_t k);

struct SplitFractions {
  double train = 0.0;
  double val = 0.0;
  double test = 0.0;
};

/// Stratified split. For a class with n pixels (visited row-major, then
/// shuffled with SplitMix64::stream(seed, class)): the first
/// ceil(train * n) go to train, the next min(ceil(val * n), rest) to val,
/// the remainder to test. Fractions must be positive and sum to 1.
SplitAssignment split(const LabelGrid& labels, std::uint64_t seed, const SplitFractions& fractions);

/// Throws DataError unless the split covers exactly the labeled pixels.
void validate_split(const SplitAssignment& split, const LabelGrid& labels);

/// Labeled pixels holding the given role, row-major.
std::vector<LabeledPixel> pixels_with_role(const SplitAssignment& split, const LabelGrid& labels, Role role);

/// Batches of sample indices for one epoch. The order is a shuffle seeded
/// by (seed, epoch); the last batch may be short.
std::vector<std::vector<std::size_t>> batch_iter(std::size_t count, std::size_t batch_size, std::uint64_t seed,
                                                 std::uint64_t epoch);

/// Unshuffled batches in index order.
std::vector<std::vector<std::size_t>> sequential_batches(std::size_t count, std::size_t batch_size);

}  // namespace scsnet
