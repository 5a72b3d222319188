#pragma once

#include <cstddef>

#include "scsnet/ops.hpp"

namespace scsnet {

struct Extent2 {
  std::size_t h = 1;
  std::size_t w = 1;
  bool operator==(const Extent2&) const = default;
};

struct Extent3 {
  std::size_t h = 1;
  std::size_t w = 1;
  std::size_t d = 1;
  bool operator==(const Extent3&) const = default;
};

/// Number of 'valid' window placements along one axis; throws
/// DimensionError when the window does not fit.
std::size_t valid_positions(std::size_t input, std::size_t window, std::size_t stride, const char* module);

/// Index table turning a batch [B, H, W, C] into window rows
/// [B*H'*W', kh*kw*C]. Rows are ordered (b, oy, ox); columns (dy, dx, c).
IndexTable window_table_2d(const Shape& batch_shape, Extent2 window, Extent2 stride);

/// Same for volumes [B, H, W, D, C] -> [B*H'*W'*D', kh*kw*kd*C], columns
/// ordered (dy, dx, dz, c).
IndexTable window_table_3d(const Shape& batch_shape, Extent3 window, Extent3 stride);

/// Views any batch of rank > 4 as images [B, H, W, rest] by merging the
/// trailing axes into channels; rank-4 input is returned unchanged.
Tensor as_image_batch(const Tensor& batch);

}  // namespace scsnet
