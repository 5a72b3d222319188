#include "scsnet/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "scsnet/error.hpp"
#include "scsnet/random.hpp"

namespace scsnet {

namespace {

constexpr const char* kModule = "data-pipeline";

// ceil(f * n) tolerant of representation error in f (0.3 * 20 must be 6).
std::size_t fraction_ceil(double f, std::size_t n) {
  return static_cast<std::size_t>(std::ceil(f * static_cast<double>(n) - 1e-9));
}

}  // namespace

std::vector<LabeledPixel> labeled_pixels(const LabelGrid& labels) {
  std::vector<LabeledPixel> out;
  for (std::size_t i = 0; i < labels.rows; ++i)
    for (std::size_t j = 0; j < labels.cols; ++j)
      if (const int l = labels.at(i, j); l != 0) out.push_back({i, j, l});
  return out;
}

PatchExtractor::PatchExtractor(const HsiCube& cube, std::size_t k) : k_(k), bands_(cube.bands) {
  if (k % 2 == 0) throw ContractError(kModule, "patch size must be odd, got " + std::to_string(k));
  const std::size_t pad = k / 2;
  padded_cols_ = cube.cols + 2 * pad;
  padded_.assign((cube.rows + 2 * pad) * padded_cols_ * bands_, 0.0);
  for (std::size_t i = 0; i < cube.rows; ++i)
    std::copy_n(cube.pixel(i, 0), cube.cols * bands_,
                padded_.begin() + static_cast<long>(((i + pad) * padded_cols_ + pad) * bands_));
}

void PatchExtractor::copy_patch(std::size_t row, std::size_t col, std::span<double> out) const {
  // The window centred on (row, col) starts at (row, col) in padded coordinates.
  const std::size_t span = k_ * bands_;
  for (std::size_t dy = 0; dy < k_; ++dy) {
    const auto src = padded_.begin() + static_cast<long>(((row + dy) * padded_cols_ + col) * bands_);
    std::copy_n(src, span, out.begin() + static_cast<long>(dy * span));
  }
}

Tensor PatchExtractor::batch(std::span<const LabeledPixel> pixels) const {
  if (pixels.empty()) throw ContractError(kModule, "empty batch");
  std::vector<double> values(pixels.size() * patch_size());
  for (std::size_t s = 0; s < pixels.size(); ++s) {
    copy_patch(pixels[s].row, pixels[s].col, std::span<double>(values).subspan(s * patch_size(), patch_size()));
  }
  return Tensor({pixels.size(), k_, k_, bands_}, std::move(values));
}

std::vector<Sample> extract_patches(const HsiCube& cube, const LabelGrid& labels, std::size_t k) {
  if (cube.rows != labels.rows || cube.cols != labels.cols) {
    throw DimensionError(kModule, "cube and label grid dimensions differ");
  }
  const PatchExtractor extractor(cube, k);
  std::vector<Sample> samples;
  for (const auto& px : labeled_pixels(labels)) {
    Sample s;
    s.patch.resize(extractor.patch_size());
    extractor.copy_patch(px.row, px.col, s.patch);
    s.label = px.label;
    s.row = px.row;
    s.col = px.col;
    samples.push_back(std::move(s));
  }
  return samples;
}

SplitAssignment split(const LabelGrid& labels, std::uint64_t seed, const SplitFractions& fractions) {
  if (!(fractions.train > 0.0) || !(fractions.val >= 0.0) || !(fractions.test >= 0.0) ||
      std::fabs(fractions.train + fractions.val + fractions.test - 1.0) > 1e-9) {
    throw ContractError(kModule, "split fractions must be nonnegative with positive train and sum to 1");
  }
  SplitAssignment out;
  out.seed = seed;
  out.rows = labels.rows;
  out.cols = labels.cols;
  out.roles.assign(labels.labels.size(), Role::kNone);

  const std::size_t classes = labels.num_classes();
  std::vector<std::vector<std::size_t>> members(classes + 1);
  for (std::size_t p = 0; p < labels.labels.size(); ++p) {
    if (labels.labels[p] != 0) members[labels.labels[p]].push_back(p);
  }
  for (std::size_t c = 1; c <= classes; ++c) {
    auto& idx = members[c];
    if (idx.empty()) continue;
    SplitMix64 rng = SplitMix64::stream(seed, c);
    shuffle(idx, rng);
    const std::size_t n = idx.size();
    const std::size_t n_train = std::min(n, std::max<std::size_t>(1, fraction_ceil(fractions.train, n)));
    const std::size_t n_val = std::min(n - n_train, fraction_ceil(fractions.val, n));
    for (std::size_t i = 0; i < n; ++i) {
      out.roles[idx[i]] = i < n_train ? Role::kTrain : (i < n_train + n_val ? Role::kVal : Role::kTest);
    }
  }
  return out;
}

void validate_split(const SplitAssignment& split, const LabelGrid& labels) {
  if (split.rows != labels.rows || split.cols != labels.cols || split.roles.size() != labels.labels.size()) {
    throw DataError(kModule, "split dimensions do not match the label grid");
  }
  for (std::size_t p = 0; p < labels.labels.size(); ++p) {
    if ((labels.labels[p] == 0) != (split.roles[p] == Role::kNone)) {
      throw DataError(kModule, "split role at pixel " + std::to_string(p) + " disagrees with its label");
    }
  }
}

std::vector<LabeledPixel> pixels_with_role(const SplitAssignment& split, const LabelGrid& labels, Role role) {
  validate_split(split, labels);
  std::vector<LabeledPixel> out;
  for (const auto& px : labeled_pixels(labels)) {
    if (split.roles[px.row * labels.cols + px.col] == role) out.push_back(px);
  }
  return out;
}

std::vector<std::vector<std::size_t>> sequential_batches(std::size_t count, std::size_t batch_size) {
  if (batch_size == 0) throw ContractError(kModule, "batch size must be at least 1");
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start < count; start += batch_size) {
    auto& b = batches.emplace_back();
    for (std::size_t i = start; i < std::min(count, start + batch_size); ++i) b.push_back(i);
  }
  return batches;
}

std::vector<std::vector<std::size_t>> batch_iter(std::size_t count, std::size_t batch_size, std::uint64_t seed,
                                                 std::uint64_t epoch) {
  if (batch_size == 0) throw ContractError(kModule, "batch size must be at least 1");
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  SplitMix64 rng = SplitMix64::stream(seed, epoch);
  shuffle(order, rng);
  auto batches = sequential_batches(count, batch_size);
  for (auto& b : batches)
    for (auto& i : b) i = order[i];
  return batches;
}

}  // namespace scsnet
