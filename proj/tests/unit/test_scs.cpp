#include <gtest/gtest.h>

#include <cmath>

#include "scsnet/cli/diagnostics.hpp"
#include "scsnet/error.hpp"
#include "scsnet/gradcheck.hpp"
#include "scsnet/ops.hpp"
#include "scsnet/scs.hpp"

using namespace scsnet;

namespace {

using Vec = std::vector<double>;

Vec random_vec(SplitMix64& rng, std::size_t n) {
  Vec v(n);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

Tensor random_tensor(const Shape& shape, SplitMix64& rng, bool requires_grad = false) {
  return Tensor(shape, random_vec(rng, shape_numel(shape)), requires_grad);
}

double sgn(double v) { return (v > 0) - (v < 0); }

// Window (oy, ox) of image b copied out of a [B, H, W, C] buffer in (dy, dx, c) order.
Vec window(const Tensor& img, std::size_t b, std::size_t oy, std::size_t ox, Extent2 k, Extent2 stride) {
  const Shape& s = img.shape();
  Vec w;
  for (std::size_t dy = 0; dy < k.h; ++dy)
    for (std::size_t dx = 0; dx < k.w; ++dx)
      for (std::size_t c = 0; c < s[3]; ++c)
        w.push_back(img.data()[((b * s[1] + oy * stride.h + dy) * s[2] + ox * stride.w + dx) * s[3] + c]);
  return w;
}

}  // namespace

TEST(Cosine, Examples) {
  EXPECT_EQ(cosine_similarity(Vec{2, 0}, Vec{2, 0}), 1.0);
  EXPECT_EQ(cosine_similarity(Vec{1, 0}, Vec{0, 1}), 0.0);
  EXPECT_NEAR(cosine_similarity(Vec{1, 0}, Vec{1, 1}), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_THROW(cosine_similarity(Vec{0, 0}, Vec{1, 1}), DomainError);
  EXPECT_THROW(cosine_similarity(Vec{1}, Vec{1, 1}), DimensionError);
}

TEST(ScsUnit, Examples) {
  EXPECT_DOUBLE_EQ(scs_unit(Vec{3, 4}, Vec{3, 4}, 1, 0), 1.0);
  EXPECT_NEAR(scs_unit(Vec{1, 0}, Vec{1, 1}, 2, 0), 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(scs_unit(Vec{1, 0}, Vec{-1, 0}, 3, 0), -1.0);
  EXPECT_EQ(scs_unit(Vec{1, 0}, Vec{0, 0}, 1, 0.1), 0.0);
}

TEST(ScsUnit, Errors) {
  EXPECT_THROW(scs_unit(Vec{1, 0}, Vec{0, 0}, 1, 0), DomainError);
  EXPECT_THROW(scs_unit(Vec{1, 0}, Vec{1, 0}, 0, 0.1), ContractError);
  EXPECT_THROW(scs_unit(Vec{1, 0}, Vec{1, 0}, -1, 0.1), ContractError);
  EXPECT_THROW(scs_unit(Vec{1, 0}, Vec{1, 0}, 1, -0.1), ContractError);
}

TEST(ScsUnit, ReducesToCosine) {
  SplitMix64 rng(1);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t n = 1 + rng.below(64);
    const Vec k = random_vec(rng, n), x = random_vec(rng, n);
    EXPECT_NEAR(scs_unit(k, x, 1, 0), cosine_similarity(k, x), 1e-12);
  }
}

TEST(ScsUnit, BoundAndSign) {
  SplitMix64 rng(2);
  for (int t = 0; t < 5000; ++t) {
    const std::size_t n = 1 + rng.below(16);
    const Vec k = random_vec(rng, n), x = random_vec(rng, n);
    const double p = rng.uniform(1.0, 5.0), q = rng.uniform(0.0, 1.0);
    const double s = scs_unit(k, x, p, q);
    double dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) dot += k[i] * x[i];
    EXPECT_LE(std::fabs(s), 1.0);
    EXPECT_EQ(sgn(s), sgn(dot));
  }
}

TEST(ScsUnit, ScaleInvarianceAtZeroStabilizer) {
  SplitMix64 rng(3);
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 1 + rng.below(8);
    const Vec k = random_vec(rng, n), x = random_vec(rng, n);
    const double p = rng.uniform(0.5, 3.0), c = rng.uniform(0.1, 10.0);
    Vec pos = x, negv = x;
    for (std::size_t i = 0; i < n; ++i) {
      pos[i] *= c;
      negv[i] *= -c;
    }
    const double base = scs_unit(k, x, p, 0);
    EXPECT_NEAR(scs_unit(k, pos, p, 0), base, 1e-12);
    EXPECT_NEAR(scs_unit(k, negv, p, 0), -base, 1e-12);
  }
}

TEST(ScsUnit, MonotoneSharpening) {
  SplitMix64 rng(4);
  for (int t = 0; t < 500; ++t) {
    const Vec k = random_vec(rng, 4), x = random_vec(rng, 4);
    const double q = rng.uniform(0.01, 0.5);
    double previous = std::fabs(scs_unit(k, x, 0.5, q));
    for (double p = 0.75; p <= 4.0; p += 0.25) {
      const double now = std::fabs(scs_unit(k, x, p, q));
      EXPECT_LT(now, previous);
      previous = now;
    }
  }
  // |c| = 1 needs q = 0 and parallel vectors; the value is then 1 for every p.
  for (double p : {0.5, 1.0, 2.0, 7.0}) EXPECT_DOUBLE_EQ(scs_unit(Vec{3, 4}, Vec{6, 8}, p, 0), 1.0);
}

TEST(SharpenedCosine, ExponentGradient) {
  // k = [1,0], x = [1,1], p = 2, q = 0: d out / dp = c^p ln c with c = 1/sqrt 2.
  const Tensor w({1, 2}, {1, 1});
  const Tensor k({1, 2}, {1, 0});
  const Tensor p({1}, {2.0}, true);
  const Tensor q({1}, {0.0});
  const Tensor out = sharpened_cosine(w, k, p, q);
  EXPECT_NEAR(out.item(), 0.5, 1e-15);
  sum(out).backward();
  EXPECT_NEAR(p.grad()[0], 0.5 * std::log(1.0 / std::sqrt(2.0)), 1e-15);
  EXPECT_NEAR(p.grad()[0], -0.17329, 1e-5);
}

TEST(SharpenedCosine, OrthogonalGivesZeroExponentGradient) {
  const Tensor w({1, 2}, {0, 1});
  const Tensor k({1, 2}, {1, 0});
  const Tensor p({1}, {1.7}, true);
  const Tensor q({1}, {0.1});
  const Tensor out = sharpened_cosine(w, k, p, q);
  EXPECT_EQ(out.item(), 0.0);
  sum(out).backward();
  EXPECT_EQ(p.grad()[0], 0.0);
}

TEST(ScsLayer, Initialisation) {
  SplitMix64 rng(5);
  ScsOptions o;
  o.units = 4;
  ScsLayer layer(o, 2, rng);
  EXPECT_EQ(layer.kernel().shape(), (Shape{4, 3, 3, 2}));
  const double bound = std::sqrt(1.0 / 18.0);
  for (double v : layer.kernel().data()) EXPECT_LE(std::fabs(v), bound);
  for (std::size_t u = 0; u < 4; ++u) EXPECT_EQ(layer.p(u), 1.0);
  EXPECT_NEAR(layer.q(), 0.1, 1e-12);
  EXPECT_EQ(layer.parameter_count(), 77u);
  EXPECT_EQ(layer.parameters().size(), 3u);
}

TEST(ScsLayer, StabilizerStaysAboveFloor) {
  SplitMix64 rng(6);
  ScsLayer layer(ScsOptions{}, 1, rng);
  layer.q_raw().mutable_data()[0] = -800.0;
  EXPECT_GE(layer.q(), 1e-6);
}

TEST(ScsLayer, KernelTileMatchesItsUnit) {
  SplitMix64 rng(7);
  ScsOptions o;
  o.units = 3;
  o.q_floor = 1e-300;
  o.q_init = 2e-300;
  ScsLayer layer(o, 2, rng);
  // The input is unit 1's kernel scaled by 2.5; at q ~ 0 that unit reads 1.
  const auto k = layer.kernel().data();
  Vec tile(k.begin() + 18, k.begin() + 36);
  for (double& v : tile) v *= 2.5;
  const Tensor out = layer.apply(Tensor({3, 3, 2}, tile));
  EXPECT_EQ(out.shape(), (Shape{1, 1, 3}));
  EXPECT_NEAR(out.data()[1], 1.0, 1e-12);
}

TEST(ScsLayer, OutputShapes) {
  SplitMix64 rng(8);
  ScsOptions o;
  o.units = 5;
  ScsLayer layer(o, 1, rng);
  EXPECT_EQ(layer.apply(Tensor::full({4, 4, 1}, 0.5)).shape(), (Shape{2, 2, 5}));
  EXPECT_EQ(layer.output_shape({4, 4, 1}), (Shape{2, 2, 5}));
  EXPECT_THROW(layer.apply(Tensor::full({2, 4, 1}, 0.5)), DimensionError);
  EXPECT_THROW(layer.apply(Tensor::full({4, 4, 2}, 0.5)), DimensionError);
}

TEST(ScsLayer, MatchesPerWindowOracle) {
  SplitMix64 rng(9);
  for (int t = 0; t < 50; ++t) {
    ScsOptions o;
    o.units = 1 + rng.below(4);
    o.kernel = {1 + rng.below(3), 1 + rng.below(3)};
    o.stride = {1 + rng.below(2), 1 + rng.below(2)};
    const std::size_t cin = 1 + rng.below(3);
    ScsLayer layer(o, cin, rng);
    for (double& v : layer.p_log().mutable_data()) v = rng.uniform(-0.5, 0.8);
    const Tensor x = random_tensor({2, o.kernel.h + rng.below(4), o.kernel.w + rng.below(4), cin}, rng);
    const Tensor out = layer.forward(x);
    const Shape& s = out.shape();
    const std::size_t n = o.kernel.h * o.kernel.w * cin;
    for (std::size_t b = 0; b < s[0]; ++b)
      for (std::size_t oy = 0; oy < s[1]; ++oy)
        for (std::size_t ox = 0; ox < s[2]; ++ox) {
          const Vec w = window(x, b, oy, ox, o.kernel, o.stride);
          for (std::size_t u = 0; u < o.units; ++u) {
            const Vec k(layer.kernel().data().begin() + u * n, layer.kernel().data().begin() + (u + 1) * n);
            const double expected = scs_unit(k, w, layer.p(u), layer.q());
            EXPECT_NEAR(out.data()[((b * s[1] + oy) * s[2] + ox) * s[3] + u], expected, 1e-12);
          }
        }
  }
}

TEST(ScsLayer, Random5x5x2WithThreeUnits) {
  SplitMix64 rng(10);
  ScsOptions o;
  o.units = 3;
  ScsLayer layer(o, 2, rng);
  const Tensor x = random_tensor({5, 5, 2}, rng);
  const Tensor out = layer.apply(x);
  ASSERT_EQ(out.shape(), (Shape{3, 3, 3}));
  const Tensor batch = reshape(x, {1, 5, 5, 2});
  for (std::size_t oy = 0; oy < 3; ++oy)
    for (std::size_t ox = 0; ox < 3; ++ox)
      for (std::size_t u = 0; u < 3; ++u) {
        const Vec k(layer.kernel().data().begin() + u * 18, layer.kernel().data().begin() + (u + 1) * 18);
        EXPECT_NEAR(out.data()[(oy * 3 + ox) * 3 + u],
                    scs_unit(k, window(batch, 0, oy, ox, {3, 3}, {1, 1}), 1.0, layer.q()), 1e-12);
      }
}

TEST(ScsLayer, GradientsMatchFiniteDifferences) {
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 100; ++i) worst = std::max(worst, cli::scs_gradcheck_case(17, i).error);
  EXPECT_LE(worst, 1e-4);
}

TEST(ScsLayer, GradientOnRandom3x3Patch) {
  SplitMix64 rng(11);
  ScsLayer layer(ScsOptions{}, 1, rng);
  const Tensor x = random_tensor({3, 3, 1}, rng);
  EXPECT_LE(finite_difference_check([&](const Tensor& t) { return sum(layer.apply(t)); }, x, 1e-6), 1e-4);
}

TEST(MaxAbsPool, Examples) {
  const PoolSpec spec;
  EXPECT_EQ(maxabspool(Tensor({2, 2, 1}, {1, -5, 3, 2}), spec).item(), -5.0);
  EXPECT_EQ(maxabspool(Tensor({2, 2, 1}, {2, 2, 2, 2}), spec).item(), 2.0);
  const Tensor x({2, 2, 1}, {1, -5, 3, 2}, true);
  sum(maxabspool(x, spec)).backward();
  EXPECT_EQ(Vec(x.grad().begin(), x.grad().end()), (Vec{0, 1, 0, 0}));
}

TEST(MaxAbsPool, TieGoesToFirstElement) {
  const Tensor x({2, 2, 1}, {3, -3, 3, -3}, true);
  const Tensor y = maxabspool(x, PoolSpec{});
  EXPECT_EQ(y.item(), 3.0);
  sum(y).backward();
  EXPECT_EQ(Vec(x.grad().begin(), x.grad().end()), (Vec{1, 0, 0, 0}));
  const Tensor z({2, 2, 1}, {-3, 3, 3, -3});
  EXPECT_EQ(maxabspool(z, PoolSpec{}).item(), -3.0);
}

TEST(MaxPool, Examples) {
  const PoolSpec spec;
  EXPECT_EQ(maxpool(Tensor({2, 2, 1}, {1, -5, 3, 2}), spec).item(), 3.0);
  PoolSpec pair;
  pair.window = {1, 2};
  pair.stride = {1, 2};
  EXPECT_EQ(maxpool(Tensor({1, 2, 1}, {-1, -2}), pair).item(), -1.0);
  SplitMix64 rng(12);
  Vec v(4 * 6 * 3);
  for (double& x : v) x = rng.uniform(0.0, 1.0);
  const Tensor nonneg({4, 6, 3}, v);
  const Tensor a = maxpool(nonneg, spec), b = maxabspool(nonneg, spec);
  EXPECT_EQ(Vec(a.data().begin(), a.data().end()), Vec(b.data().begin(), b.data().end()));
}

TEST(MaxAbsPool, UnderflowIsDimensionError) {
  PoolSpec spec;
  spec.window = {3, 3};
  EXPECT_THROW(maxabspool(Tensor::zeros({2, 2, 1}), spec), DimensionError);
}

TEST(PoolLayer, ShapesAndKind) {
  PoolLayer layer(PoolSpec{});
  EXPECT_EQ(layer.kind(), "pool:maxabs");
  EXPECT_EQ(layer.output_shape({13, 13, 8}), (Shape{6, 6, 8}));
  EXPECT_EQ(layer.parameter_count(), 0u);
}
