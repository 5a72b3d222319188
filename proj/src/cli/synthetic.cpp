#include "scsnet/cli/synthetic.hpp"

#include <cmath>

#include "scsnet/random.hpp"

namespace scsnet::cli {

namespace {

constexpr std::size_t kSide = 32;
constexpr std::size_t kBands = 20;
constexpr double kNoise = 0.05;

// Gaussian bump over the bands on a sloped baseline.
double signature(int label, std::size_t band) {
  static constexpr double kCentre[] = {0.0, 3.0, 10.0, 16.0};
  static constexpr double kSlope[] = {0.0, 0.01, -0.01, 0.02};
  const double b = static_cast<double>(band);
  if (label == 0) return 0.3;
  const double d = (b - kCentre[label]) / 2.5;
  return 0.2 + kSlope[label] * b + 0.7 * std::exp(-0.5 * d * d);
}

}  // namespace

SyntheticScene synthetic_scene(std::uint64_t seed) {
  SyntheticScene s;
  s.cube = {kSide, kSide, kBands, std::vector<double>(kSide * kSide * kBands)};
  s.labels = {kSide, kSide, std::vector<std::uint16_t>(kSide * kSide)};
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < kSide; ++i) {
    for (std::size_t j = 0; j < kSide; ++j) {
      int label = i < kSide / 2 ? (j < kSide / 2 ? 1 : 2) : 3;
      if (rng.uniform() < 0.15) label = 0;
      s.labels.labels[i * kSide + j] = static_cast<std::uint16_t>(label);
      for (std::size_t b = 0; b < kBands; ++b) {
        // The cube file stores f32; round here so the in-memory scene and
        // the shipped file agree exactly.
        const double v = signature(label, b) + kNoise * rng.normal();
        s.cube.data[(i * kSide + j) * kBands + b] = static_cast<double>(static_cast<float>(v));
      }
    }
  }
  return s;
}

}  // namespace scsnet::cli
