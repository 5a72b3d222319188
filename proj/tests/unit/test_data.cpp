#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <map>
#include <set>

#include "scsnet/cli/synthetic.hpp"
#include "scsnet/dataset.hpp"
#include "scsnet/error.hpp"
#include "scsnet/hsi.hpp"
#include "scsnet/pca.hpp"
#include "scsnet/random.hpp"

using namespace scsnet;
namespace fs = std::filesystem;

namespace {

using Bytes = std::vector<std::uint8_t>;

fs::path temp_path(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "scsnet_test_data";
  fs::create_directories(dir);
  return dir / name;
}

void put_u32(Bytes& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f32(Bytes& b, float f) {
  std::uint32_t v;
  std::memcpy(&v, &f, 4);
  put_u32(b, v);
}

Bytes cube_header(std::uint32_t m, std::uint32_t n, std::uint32_t bands) {
  Bytes b{'H', 'S', 'I', 'C'};
  put_u32(b, 1);
  put_u32(b, m);
  put_u32(b, n);
  put_u32(b, bands);
  return b;
}

HsiCube random_cube(std::size_t rows, std::size_t cols, std::size_t bands, std::uint64_t seed) {
  SplitMix64 rng(seed);
  HsiCube c{rows, cols, bands, std::vector<double>(rows * cols * bands)};
  for (double& v : c.data) v = rng.normal();
  return c;
}

LabelGrid grid_with_class_sizes(const std::vector<std::size_t>& sizes) {
  std::size_t total = 0;
  for (auto s : sizes) total += s;
  LabelGrid g{1, total + 3, std::vector<std::uint16_t>(total + 3, 0)};
  std::size_t at = 1;
  for (std::size_t c = 0; c < sizes.size(); ++c)
    for (std::size_t i = 0; i < sizes[c]; ++i) g.labels[at++] = static_cast<std::uint16_t>(c + 1);
  return g;
}

std::map<int, std::array<std::size_t, 4>> role_counts(const SplitAssignment& s, const LabelGrid& g) {
  std::map<int, std::array<std::size_t, 4>> out;
  for (std::size_t i = 0; i < s.roles.size(); ++i) ++out[g.labels[i]][static_cast<int>(s.roles[i])];
  return out;
}

}  // namespace

TEST(CubeFile, RoundTripKeepsOrder) {
  Bytes raw = cube_header(2, 2, 3);
  for (int i = 0; i < 12; ++i) put_f32(raw, 0.5f * static_cast<float>(i) - 1.0f);
  const fs::path p = temp_path("order.hsic");
  write_file(p, raw);
  const HsiCube c = load_cube(p);
  ASSERT_EQ(c.rows, 2u);
  ASSERT_EQ(c.cols, 2u);
  ASSERT_EQ(c.bands, 3u);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t b = 0; b < 3; ++b) EXPECT_EQ(c.at(i, j, b), 0.5 * static_cast<double>((i * 2 + j) * 3 + b) - 1.0);
  save_cube(temp_path("again.hsic"), c);
  EXPECT_EQ(read_file(temp_path("again.hsic")), raw);
}

TEST(CubeFile, TruncatedPayloadReportsOffset) {
  Bytes raw = cube_header(4, 4, 2);
  for (int i = 0; i < 31; ++i) put_f32(raw, 1.0f);
  write_file(temp_path("short.hsic"), raw);
  try {
    load_cube(temp_path("short.hsic"));
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.offset(), raw.size());
    EXPECT_NE(std::string(e.what()).find("data-pipeline"), std::string::npos);
  }
}

TEST(CubeFile, RejectsBadMagicTrailingBytesAndNonFinite) {
  Bytes raw = cube_header(1, 1, 1);
  put_f32(raw, 1.0f);
  Bytes bad_magic = raw;
  bad_magic[0] = 'X';
  write_file(temp_path("magic.hsic"), bad_magic);
  EXPECT_THROW(load_cube(temp_path("magic.hsic")), FormatError);
  Bytes trailing = raw;
  trailing.push_back(0);
  write_file(temp_path("trailing.hsic"), trailing);
  EXPECT_THROW(load_cube(temp_path("trailing.hsic")), FormatError);
  Bytes nan = cube_header(1, 1, 1);
  put_f32(nan, std::nanf(""));
  write_file(temp_path("nan.hsic"), nan);
  EXPECT_THROW(load_cube(temp_path("nan.hsic")), FormatError);
  Bytes huge = cube_header(0xFFFFFFFF, 0xFFFFFFFF, 0xFFFFFFFF);
  write_file(temp_path("huge.hsic"), huge);
  EXPECT_THROW(load_cube(temp_path("huge.hsic")), FormatError);
  EXPECT_THROW(load_cube(temp_path("missing.hsic")), IoError);
}

TEST(LabelAndSplitFiles, RoundTrip) {
  LabelGrid g{2, 3, {0, 1, 2, 3, 0, 65535}};
  save_labels(temp_path("g.hsig"), g);
  const LabelGrid back = load_labels(temp_path("g.hsig"));
  EXPECT_EQ(back.labels, g.labels);
  EXPECT_EQ(back.num_classes(), 65535u);

  SplitAssignment s{99, 2, 3, {Role::kNone, Role::kTrain, Role::kVal, Role::kTest, Role::kNone, Role::kTrain}};
  save_split(temp_path("s.hsis"), s);
  const Bytes raw = read_file(temp_path("s.hsis"));
  ASSERT_EQ(raw.size(), 4u + 4 + 8 + 6);
  EXPECT_EQ(raw[8], 99);
  const SplitAssignment back_split = load_split(temp_path("s.hsis"), 2, 3);
  EXPECT_EQ(back_split.seed, 99u);
  EXPECT_EQ(back_split.roles, s.roles);
  EXPECT_THROW(load_split(temp_path("s.hsis"), 3, 3), FormatError);
}

TEST(Normalize, Examples) {
  const HsiCube c{1, 3, 3, {10, 5, 0, 20, 5, 0.5, 30, 5, 1}};
  const HsiCube n = normalize(c);
  EXPECT_EQ(n.at(0, 0, 0), 0.0);
  EXPECT_EQ(n.at(0, 1, 0), 0.5);
  EXPECT_EQ(n.at(0, 2, 0), 1.0);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(n.at(0, j, 1), 0.0);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(n.at(0, j, 2), c.at(0, j, 2));
}

TEST(Pca, RankOneLine) {
  HsiCube c{1, 5, 2, {}};
  for (double t : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
    c.data.push_back(t);
    c.data.push_back(2 * t);
  }
  const PcaModel m = pca_fit(c, 2);
  EXPECT_NEAR(m.eigenvalues[0], 2.0 * 5.0, 1e-12);
  EXPECT_NEAR(m.eigenvalues[1], 0.0, 1e-12);
}

TEST(Pca, AxisAlignedToySet) {
  const HsiCube c{1, 4, 2, {1, 0, -1, 0, 0, 0.5, 0, -0.5}};
  const PcaModel m = pca_fit(c, 2);
  EXPECT_NEAR(m.eigenvalues[0], 0.5, 1e-15);
  EXPECT_NEAR(m.eigenvalues[1], 0.125, 1e-15);
  EXPECT_NEAR(m.component(0)[0], 1.0, 1e-15);
  EXPECT_NEAR(m.component(0)[1], 0.0, 1e-15);
  EXPECT_NEAR(m.component(1)[0], 0.0, 1e-15);
  EXPECT_NEAR(m.component(1)[1], 1.0, 1e-15);
}

TEST(Pca, Errors) {
  const HsiCube c = random_cube(3, 3, 4, 1);
  EXPECT_THROW(pca_fit(c, 5), ContractError);
  EXPECT_THROW(pca_fit(c, 0), ContractError);
  EXPECT_THROW(pca_fit(random_cube(1, 1, 4, 2), 2), ContractError);
}

TEST(Pca, EigenpairsOrthonormalityAndVariance) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const HsiCube c = random_cube(6, 7, 10, 100 + seed);
    const PcaModel m = pca_fit(c, 10);
    for (std::size_t a = 0; a < 10; ++a) {
      double residual = 0.0;
      for (std::size_t i = 0; i < 10; ++i) {
        double sv = 0.0;
        for (std::size_t j = 0; j < 10; ++j) sv += m.covariance[i * 10 + j] * m.component(a)[j];
        residual += std::pow(sv - m.eigenvalues[a] * m.component(a)[i], 2);
      }
      EXPECT_LE(std::sqrt(residual), 1e-8 * std::max(1.0, m.eigenvalues[a]));
      for (std::size_t b = 0; b < 10; ++b) {
        double dot = 0.0;
        for (std::size_t i = 0; i < 10; ++i) dot += m.component(a)[i] * m.component(b)[i];
        EXPECT_NEAR(dot, a == b ? 1.0 : 0.0, 1e-8);
      }
      if (a > 0) {
        EXPECT_LE(m.eigenvalues[a], m.eigenvalues[a - 1]);
      }
      EXPECT_GE(m.eigenvalues[a], 0.0);
    }
    // Total variance: trace of the covariance vs. variance of the projection.
    double trace = 0.0;
    for (std::size_t i = 0; i < 10; ++i) trace += m.covariance[i * 10 + i];
    const HsiCube r = pca_reduce(c, m);
    const std::size_t n = r.rows * r.cols;
    double projected = 0.0;
    for (std::size_t b = 0; b < 10; ++b) {
      double mean = 0.0, sq = 0.0;
      for (std::size_t p = 0; p < n; ++p) mean += r.data[p * 10 + b];
      mean /= static_cast<double>(n);
      for (std::size_t p = 0; p < n; ++p) sq += std::pow(r.data[p * 10 + b] - mean, 2);
      projected += sq / static_cast<double>(n);
    }
    EXPECT_NEAR(projected, trace, 1e-8);
  }
}

TEST(Pca, RefitOnReducedDataKeepsTopEigenvalues) {
  const HsiCube c = random_cube(8, 8, 9, 7);
  const PcaModel full = pca_fit(c, 9);
  const PcaModel top = pca_fit(c, 4);
  const PcaModel again = pca_fit(pca_reduce(c, top), 4);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(again.eigenvalues[i], full.eigenvalues[i], 1e-6);
}

TEST(Patches, DegenerateSizeIsPixelSpectrum) {
  const HsiCube c = random_cube(3, 4, 5, 8);
  LabelGrid g{3, 4, std::vector<std::uint16_t>(12, 1)};
  g.labels[5] = 0;
  const auto samples = extract_patches(c, g, 1);
  ASSERT_EQ(samples.size(), 11u);
  for (const auto& s : samples) {
    EXPECT_EQ(s.patch, std::vector<double>(c.pixel(s.row, s.col), c.pixel(s.row, s.col) + 5));
  }
}

TEST(Patches, CornerPaddingAndCentre) {
  HsiCube c{4, 4, 2, std::vector<double>(32, 1.0)};
  const PatchExtractor ex(c, 3);
  std::vector<double> patch(ex.patch_size());
  ex.copy_patch(0, 0, patch);
  std::size_t zero_positions = 0;
  for (std::size_t p = 0; p < 9; ++p) zero_positions += patch[p * 2] == 0.0 && patch[p * 2 + 1] == 0.0;
  EXPECT_EQ(zero_positions, 5u);
  EXPECT_THROW(PatchExtractor(c, 4), ContractError);
  EXPECT_EQ(PatchExtractor(c, 15).sample_shape(), (Shape{15, 15, 2}));
}

TEST(Patches, CentreEqualsPixelExactly) {
  const HsiCube c = random_cube(6, 5, 3, 9);
  LabelGrid g{6, 5, std::vector<std::uint16_t>(30, 2)};
  for (std::size_t k : {1u, 3u, 5u, 7u}) {
    for (const auto& s : extract_patches(c, g, k)) {
      const std::size_t centre = ((k / 2) * k + k / 2) * 3;
      for (std::size_t b = 0; b < 3; ++b) EXPECT_EQ(s.patch[centre + b], c.at(s.row, s.col, b));
    }
  }
}

TEST(Patches, BatchMatchesCopyPatch) {
  const HsiCube c = random_cube(5, 5, 2, 10);
  const PatchExtractor ex(c, 3);
  const std::vector<LabeledPixel> pixels{{0, 0, 1}, {2, 3, 2}, {4, 4, 1}};
  const Tensor batch = ex.batch(pixels);
  EXPECT_EQ(batch.shape(), (Shape{3, 3, 3, 2}));
  std::vector<double> patch(ex.patch_size());
  for (std::size_t i = 0; i < 3; ++i) {
    ex.copy_patch(pixels[i].row, pixels[i].col, patch);
    for (std::size_t j = 0; j < patch.size(); ++j) EXPECT_EQ(batch.data()[i * patch.size() + j], patch[j]);
  }
}

TEST(Split, ClassCountsFollowRoundUpRule) {
  const LabelGrid g = grid_with_class_sizes({100, 20, 1, 2, 3, 7});
  const SplitAssignment s = split(g, 5, {0.4, 0.3, 0.3});
  auto counts = role_counts(s, g);
  EXPECT_EQ(counts[1], (std::array<std::size_t, 4>{0, 40, 30, 30}));
  EXPECT_EQ(counts[2], (std::array<std::size_t, 4>{0, 8, 6, 6}));
  EXPECT_EQ(counts[3][1], 1u);
  for (int c = 1; c <= 6; ++c) EXPECT_GE(counts[c][1], 1u);
  EXPECT_EQ(counts[0][0], 3u);
}

TEST(Split, DeterministicAndSeedSensitive) {
  const LabelGrid g = grid_with_class_sizes({50, 30, 25});
  const SplitAssignment a = split(g, 1, {0.4, 0.3, 0.3});
  const SplitAssignment b = split(g, 1, {0.4, 0.3, 0.3});
  const SplitAssignment c = split(g, 2, {0.4, 0.3, 0.3});
  EXPECT_EQ(a.roles, b.roles);
  EXPECT_NE(a.roles, c.roles);
  EXPECT_EQ(role_counts(a, g), role_counts(c, g));
}

TEST(Split, PartitionAndStratificationProperty) {
  SplitMix64 rng(77);
  for (int t = 0; t < 50; ++t) {
    LabelGrid g{7, 9, std::vector<std::uint16_t>(63)};
    for (auto& l : g.labels) l = static_cast<std::uint16_t>(rng.below(5));
    if (g.num_classes() == 0) continue;
    const SplitAssignment s = split(g, t, {0.4, 0.3, 0.3});
    validate_split(s, g);
    for (std::size_t i = 0; i < 63; ++i) EXPECT_EQ(s.roles[i] == Role::kNone, g.labels[i] == 0);
    const auto hist = g.histogram();
    for (const auto& [label, counts] : role_counts(s, g)) {
      if (label == 0) continue;
      const double n = static_cast<double>(hist[label]);
      const double frac = static_cast<double>(counts[1]) / n;
      EXPECT_GE(frac, 0.4);
      EXPECT_LE(frac, 0.4 + 1.0 / n + 1e-12);
    }
  }
}

TEST(Split, Errors) {
  const LabelGrid g = grid_with_class_sizes({10});
  EXPECT_THROW(split(g, 1, {0.5, 0.3, 0.3}), ContractError);
  SplitAssignment s = split(g, 1, {0.4, 0.3, 0.3});
  s.roles[0] = Role::kTrain;
  EXPECT_THROW(validate_split(s, g), DataError);
}

TEST(BatchIter, Examples) {
  const auto batches = batch_iter(10, 4, 3, 1);
  ASSERT_EQ(batches.size(), 3u);
  EXPECT_EQ(batches[0].size(), 4u);
  EXPECT_EQ(batches[1].size(), 4u);
  EXPECT_EQ(batches[2].size(), 2u);
  EXPECT_EQ(batch_iter(10, 4, 3, 1), batches);
  EXPECT_NE(batch_iter(10, 4, 3, 2), batches);
  std::multiset<std::size_t> all;
  for (const auto& b : batches) all.insert(b.begin(), b.end());
  std::multiset<std::size_t> expected;
  for (std::size_t i = 0; i < 10; ++i) expected.insert(i);
  EXPECT_EQ(all, expected);
  EXPECT_THROW(batch_iter(10, 0, 3, 1), ContractError);
}

TEST(Pipeline, StagesAreBitReproducible) {
  const HsiCube c = random_cube(9, 9, 6, 11);
  const HsiCube a = pca_reduce(normalize(c), pca_fit(normalize(c), 3));
  const HsiCube b = pca_reduce(normalize(c), pca_fit(normalize(c), 3));
  EXPECT_EQ(a.data, b.data);
}

TEST(Fixture, ShippedFilesMatchGenerator) {
  const auto scene = cli::synthetic_scene(20240611);
  const HsiCube cube = load_cube(fs::path(SCSNET_TEST_DATA) / "synthetic.hsic");
  const LabelGrid labels = load_labels(fs::path(SCSNET_TEST_DATA) / "synthetic.hsig");
  EXPECT_EQ(cube.data, scene.cube.data);
  EXPECT_EQ(labels.labels, scene.labels.labels);
  EXPECT_EQ(cube.rows, 32u);
  EXPECT_EQ(cube.bands, 20u);
  EXPECT_EQ(labels.num_classes(), 3u);
  EXPECT_GT(labels.histogram()[0], 0u);
}
