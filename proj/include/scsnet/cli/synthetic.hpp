#pragma once

#include <cstdint>

#include "scsnet/hsi.hpp"

namespace scsnet::cli {

struct SyntheticScene {
  HsiCube cube;
  LabelGrid labels;
};

/// 32 x 32 scene with 20 bands and three classes laid out in blocks (top
/// left, top right, bottom). Each class has its own smooth spectral
/// signature plus Gaussian noise; about 15% of the pixels are unlabeled
/// background with a flat spectrum.
SyntheticScene synthetic_scene(std::uint64_t seed);

}  // namespace scsnet::cli
