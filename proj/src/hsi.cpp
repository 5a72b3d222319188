#include "scsnet/hsi.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>

#include "bytes.hpp"
#include "scsnet/error.hpp"

namespace scsnet {

namespace {

constexpr const char* kModule = "data-pipeline";
constexpr std::uint32_t kVersion = 1;
// Keeps every element count addressable and far from u64 overflow.
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 34;

void read_version(bytes::Reader& in) {
  const std::size_t at = in.position();
  const std::uint32_t version = in.u32();
  if (version != kVersion) throw FormatError(kModule, "unsupported version " + std::to_string(version), at);
}

std::uint64_t checked_count(std::initializer_list<std::uint32_t> dims, std::size_t offset) {
  std::uint64_t count = 1;
  for (std::uint32_t d : dims) {
    if (d == 0) throw FormatError(kModule, "zero dimension in header", offset);
    count *= d;
    if (count > kMaxElements) throw FormatError(kModule, "declared dimensions overflow", offset);
  }
  return count;
}

}  // namespace

std::size_t LabelGrid::num_classes() const {
  return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end());
}

std::vector<std::size_t> LabelGrid::histogram() const {
  std::vector<std::size_t> counts(num_classes() + 1, 0);
  for (std::uint16_t l : labels) ++counts[l];
  return counts;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(kModule, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(kModule, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError(kModule, "write failed for " + path.string());
}

HsiCube load_cube(const std::filesystem::path& path) {
  const auto raw = read_file(path);
  bytes::Reader in(raw, kModule);
  in.magic("HSIC");
  read_version(in);
  const std::size_t dims_at = in.position();
  HsiCube cube;
  const std::uint32_t m = in.u32(), n = in.u32(), b = in.u32();
  const std::uint64_t count = checked_count({m, n, b}, dims_at);
  in.need(count * 4, "cube payload");
  cube.rows = m;
  cube.cols = n;
  cube.bands = b;
  cube.data.resize(count);
  for (auto& v : cube.data) {
    const std::size_t at = in.position();
    v = in.f32();
    if (!std::isfinite(v)) throw FormatError(kModule, "non-finite reflectance", at);
  }
  in.expect_end();
  return cube;
}

void save_cube(const std::filesystem::path& path, const HsiCube& cube) {
  bytes::Writer out;
  out.magic("HSIC");
  out.u32(kVersion);
  out.u32(static_cast<std::uint32_t>(cube.rows));
  out.u32(static_cast<std::uint32_t>(cube.cols));
  out.u32(static_cast<std::uint32_t>(cube.bands));
  for (double v : cube.data) out.f32(static_cast<float>(v));
  write_file(path, out.buffer());
}

LabelGrid load_labels(const std::filesystem::path& path) {
  const auto raw = read_file(path);
  bytes::Reader in(raw, kModule);
  in.magic("HSIG");
  read_version(in);
  const std::size_t dims_at = in.position();
  const std::uint32_t m = in.u32(), n = in.u32();
  const std::uint64_t count = checked_count({m, n}, dims_at);
  in.need(count * 2, "label payload");
  LabelGrid grid;
  grid.rows = m;
  grid.cols = n;
  grid.labels.resize(count);
  for (auto& l : grid.labels) l = in.u16();
  in.expect_end();
  return grid;
}

void save_labels(const std::filesystem::path& path, const LabelGrid& labels) {
  bytes::Writer out;
  out.magic("HSIG");
  out.u32(kVersion);
  out.u32(static_cast<std::uint32_t>(labels.rows));
  out.u32(static_cast<std::uint32_t>(labels.cols));
  for (std::uint16_t l : labels.labels) out.u16(l);
  write_file(path, out.buffer());
}

SplitAssignment load_split(const std::filesystem::path& path, std::size_t rows, std::size_t cols) {
  const auto raw = read_file(path);
  bytes::Reader in(raw, kModule);
  in.magic("HSIS");
  read_version(in);
  SplitAssignment split;
  split.seed = in.u64();
  split.rows = rows;
  split.cols = cols;
  in.need(rows * cols, "split payload");
  split.roles.resize(rows * cols);
  for (auto& r : split.roles) {
    const std::size_t at = in.position();
    const std::uint8_t v = in.u8();
    if (v > 3) throw FormatError(kModule, "invalid role " + std::to_string(v), at);
    r = static_cast<Role>(v);
  }
  in.expect_end();
  return split;
}

void save_split(const std::filesystem::path& path, const SplitAssignment& split) {
  bytes::Writer out;
  out.magic("HSIS");
  out.u32(kVersion);
  out.u64(split.seed);
  for (Role r : split.roles) out.u8(static_cast<std::uint8_t>(r));
  write_file(path, out.buffer());
}

HsiCube normalize(const HsiCube& cube) {
  HsiCube out = cube;
  const std::size_t pixels = cube.rows * cube.cols;
  for (std::size_t b = 0; b < cube.bands; ++b) {
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t p = 0; p < pixels; ++p) {
      lo = std::min(lo, cube.data[p * cube.bands + b]);
      hi = std::max(hi, cube.data[p * cube.bands + b]);
    }
    const double range = hi - lo;
    for (std::size_t p = 0; p < pixels; ++p) {
      double& v = out.data[p * cube.bands + b];
      v = range > 0.0 ? (v - lo) / range : 0.0;
    }
  }
  return out;
}

void round_to_float(std::vector<double>& values) {
  for (double& v : values) v = static_cast<double>(static_cast<float>(v));
}

}  // namespace scsnet
