#include "scsnet/window.hpp"

#include <limits>
#include <string>

#include "scsnet/error.hpp"

namespace scsnet {

std::size_t valid_positions(std::size_t input, std::size_t window, std::size_t stride, const char* module) {
  if (window == 0 || stride == 0) throw ContractError(module, "window and stride must be at least 1");
  if (window > input) {
    throw DimensionError(module, "window of " + std::to_string(window) + " does not fit input extent " +
                                     std::to_string(input));
  }
  return (input - window) / stride + 1;
}

namespace {

void check_index_range(const Shape& shape, const char* module) {
  if (shape_numel(shape) > std::numeric_limits<std::uint32_t>::max()) {
    throw DimensionError(module, "tensor too large for 32-bit window indices: " + shape_str(shape));
  }
}

}  // namespace

IndexTable window_table_2d(const Shape& s, Extent2 window, Extent2 stride) {
  constexpr const char* kModule = "scs-ops";
  if (s.size() != 4) throw DimensionError(kModule, "expected a batch [B,H,W,C], got " + shape_str(s));
  check_index_range(s, kModule);
  const std::size_t batch = s[0], height = s[1], width = s[2], channels = s[3];
  const std::size_t oh = valid_positions(height, window.h, stride.h, kModule);
  const std::size_t ow = valid_positions(width, window.w, stride.w, kModule);
  auto table = std::make_shared<std::vector<std::uint32_t>>();
  table->reserve(batch * oh * ow * window.h * window.w * channels);
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t y = 0; y < oh; ++y)
      for (std::size_t x = 0; x < ow; ++x)
        for (std::size_t dy = 0; dy < window.h; ++dy)
          for (std::size_t dx = 0; dx < window.w; ++dx) {
            const std::size_t base = ((b * height + y * stride.h + dy) * width + x * stride.w + dx) * channels;
            for (std::size_t c = 0; c < channels; ++c) table->push_back(static_cast<std::uint32_t>(base + c));
          }
  return table;
}

IndexTable window_table_3d(const Shape& s, Extent3 window, Extent3 stride) {
  constexpr const char* kModule = "baseline-conv";
  if (s.size() != 5) throw DimensionError(kModule, "expected a batch [B,H,W,D,C], got " + shape_str(s));
  check_index_range(s, kModule);
  const std::size_t batch = s[0], height = s[1], width = s[2], depth = s[3], channels = s[4];
  const std::size_t oh = valid_positions(height, window.h, stride.h, kModule);
  const std::size_t ow = valid_positions(width, window.w, stride.w, kModule);
  const std::size_t od = valid_positions(depth, window.d, stride.d, kModule);
  auto table = std::make_shared<std::vector<std::uint32_t>>();
  table->reserve(batch * oh * ow * od * window.h * window.w * window.d * channels);
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t y = 0; y < oh; ++y)
      for (std::size_t x = 0; x < ow; ++x)
        for (std::size_t z = 0; z < od; ++z)
          for (std::size_t dy = 0; dy < window.h; ++dy)
            for (std::size_t dx = 0; dx < window.w; ++dx)
              for (std::size_t dz = 0; dz < window.d; ++dz) {
                const std::size_t base =
                    (((b * height + y * stride.h + dy) * width + x * stride.w + dx) * depth + z * stride.d + dz) *
                    channels;
                for (std::size_t c = 0; c < channels; ++c) table->push_back(static_cast<std::uint32_t>(base + c));
              }
  return table;
}

Tensor as_image_batch(const Tensor& batch) {
  const Shape& s = batch.shape();
  if (s.size() < 4) throw DimensionError("scs-ops", "expected an image batch, got " + shape_str(s));
  if (s.size() == 4) return batch;
  std::size_t channels = 1;
  for (std::size_t d = 3; d < s.size(); ++d) channels *= s[d];
  return reshape(batch, {s[0], s[1], s[2], channels});
}

}  // namespace scsnet
