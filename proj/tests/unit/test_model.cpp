#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "scsnet/checkpoint.hpp"
#include "scsnet/error.hpp"
#include "scsnet/gradcheck.hpp"
#include "scsnet/loss.hpp"
#include "scsnet/model.hpp"
#include "scsnet/ops.hpp"
#include "scsnet/optim.hpp"
#include "scsnet/train.hpp"

using namespace scsnet;

namespace {

LayerSpec scs(std::size_t units, std::size_t k) {
  LayerSpec s;
  s.kind = LayerKind::kScs;
  s.units = units;
  s.kernel = {k, k, 1};
  return s;
}

LayerSpec pool() {
  LayerSpec s;
  s.kind = LayerKind::kPool;
  s.kernel = {2, 2, 1};
  s.stride = {2, 2, 1};
  return s;
}

LayerSpec of_kind(LayerKind kind) {
  LayerSpec s;
  s.kind = kind;
  return s;
}

LayerSpec dense(std::size_t units, Activation a = Activation::kNone) {
  LayerSpec s;
  s.kind = LayerKind::kDense;
  s.units = units;
  s.activation = a;
  return s;
}

ModelConfig small_scs(std::size_t classes = 3) {
  return {{scs(3, 3), pool(), of_kind(LayerKind::kFlatten), dense(classes)}, classes, {6, 6, 2}};
}

// Two well-separated spectral directions plus noise on a 6 x 8 scene.
struct Toy {
  HsiCube cube;
  LabelGrid labels;
};

Toy separable_toy(std::uint64_t seed) {
  SplitMix64 rng(seed);
  Toy t{{6, 8, 2, {}}, {6, 8, {}}};
  for (std::size_t p = 0; p < 48; ++p) {
    const int label = 1 + static_cast<int>(rng.below(2));
    const double a = label == 1 ? 1.0 : 0.2, b = label == 1 ? 0.2 : 1.0;
    t.cube.data.push_back(a + 0.05 * rng.normal());
    t.cube.data.push_back(b + 0.05 * rng.normal());
    t.labels.labels.push_back(static_cast<std::uint16_t>(label));
  }
  return t;
}

ModelConfig toy_model() { return {{scs(4, 1), of_kind(LayerKind::kFlatten), dense(2)}, 2, {1, 1, 2}}; }

TrainConfig toy_train(std::size_t epochs) {
  TrainConfig c;
  c.epochs = epochs;
  c.batch_size = 8;
  c.adam.learning_rate = 0.01;
  c.seed = 4;
  return c;
}

Tensor random_batch(const Shape& shape, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<double> v(shape_numel(shape));
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return Tensor(shape, std::move(v));
}

}  // namespace

TEST(BuildModel, ShapesAndNames) {
  Model m = build_model(small_scs(), 1);
  EXPECT_EQ(m.shapes()[0], (Shape{4, 4, 3}));
  EXPECT_EQ(m.shapes()[1], (Shape{2, 2, 3}));
  EXPECT_EQ(m.shapes()[2], (Shape{12}));
  EXPECT_EQ(m.shapes()[3], (Shape{3}));
  const auto params = m.parameters();
  ASSERT_EQ(params.size(), 5u);
  EXPECT_EQ(params[0].name, "0.scs.kernel");
  EXPECT_EQ(m.forward(random_batch({2, 6, 6, 2}, 1)).shape(), (Shape{2, 3}));
}

TEST(BuildModel, RejectsActivationAfterScs) {
  ModelConfig c = small_scs();
  c.layers.insert(c.layers.begin() + 1, of_kind(LayerKind::kRelu));
  EXPECT_THROW(build_model(c, 1), ConfigError);
  ModelConfig dense_only{{of_kind(LayerKind::kFlatten), dense(4, Activation::kRelu), of_kind(LayerKind::kRelu), dense(3)},
                         3,
                         {2, 2, 1}};
  EXPECT_NO_THROW(build_model(dense_only, 1));
}

TEST(BuildModel, ShapeMismatchNamesLayerPair) {
  ModelConfig c{{scs(2, 5), of_kind(LayerKind::kFlatten), dense(3)}, 3, {4, 4, 1}};
  try {
    build_model(c, 1);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("->"), std::string::npos) << e.what();
  }
  ModelConfig missing_flatten{{scs(2, 3), dense(3)}, 3, {4, 4, 1}};
  EXPECT_THROW(build_model(missing_flatten, 1), ConfigError);
  ModelConfig wrong_classes{{of_kind(LayerKind::kFlatten), dense(4)}, 3, {2, 2, 1}};
  EXPECT_THROW(build_model(wrong_classes, 1), ConfigError);
}

TEST(BuildModel, SameSeedSameWeights) {
  EXPECT_EQ(parameter_values(build_model(small_scs(), 9)), parameter_values(build_model(small_scs(), 9)));
  EXPECT_NE(parameter_values(build_model(small_scs(), 9)), parameter_values(build_model(small_scs(), 10)));
}

TEST(ParameterCount, ClosedFormMatchesParameterWalk) {
  const ModelConfig configs[] = {
      small_scs(),
      {{scs(7, 3), of_kind(LayerKind::kFlatten), dense(5)}, 5, {3, 3, 1}},
      {{of_kind(LayerKind::kFlatten), dense(6, Activation::kRelu), dense(2)}, 2, {3, 3, 4}},
  };
  for (const auto& c : configs) {
    const Model m = build_model(c, 2);
    std::size_t walked = 0;
    for (const auto& p : m.parameters()) walked += p.value.numel();
    EXPECT_EQ(count_parameters(m).total, walked);
  }
  const Model single = build_model(configs[1], 2);
  EXPECT_EQ(count_parameters(single).layers[0].parameters, 7u * 9 + 7 + 1);
  EXPECT_EQ(count_parameters(single).layers[2].parameters, 7u * 5 + 5);
}

TEST(Loss, Examples) {
  const std::vector<int> first{1};
  EXPECT_NEAR(softmax_cross_entropy(Tensor({1, 2}, {0, 0}), first).item(), std::log(2.0), 1e-15);
  EXPECT_NEAR(softmax_cross_entropy(Tensor({1, 2}, {100, 0}), first).item(), 0.0, 1e-40);
  const std::vector<int> third{3};
  EXPECT_NEAR(softmax_cross_entropy(Tensor({1, 3}, {1, 2, 3}), third).item(), 0.40760596444438, 1e-12);
  const double stable = softmax_cross_entropy(Tensor({1, 2}, {1000, 0}), std::vector<int>{2}).item();
  EXPECT_NEAR(stable, 1000.0, 1e-9);
}

TEST(Loss, BatchMeanAndGradient) {
  const Tensor logits({2, 3}, {0.5, -1.0, 2.0, 0.0, 0.0, 0.0}, true);
  const std::vector<int> targets{3, 1};
  const Tensor loss = softmax_cross_entropy(logits, targets);
  const double z = std::exp(0.5) + std::exp(-1.0) + std::exp(2.0);
  EXPECT_NEAR(loss.item(), 0.5 * (-std::log(std::exp(2.0) / z) + std::log(3.0)), 1e-14);
  loss.backward();
  EXPECT_NEAR(logits.grad()[0], 0.5 * std::exp(0.5) / z, 1e-14);
  EXPECT_NEAR(logits.grad()[2], 0.5 * (std::exp(2.0) / z - 1.0), 1e-14);
  EXPECT_NEAR(logits.grad()[3], 0.5 * (1.0 / 3.0 - 1.0), 1e-14);
  EXPECT_THROW(softmax_cross_entropy(logits, std::vector<int>{4, 1}), ContractError);
}

TEST(Loss, PredictionTiesGoToLowerClass) {
  EXPECT_EQ(predict_classes(Tensor({2, 3}, {1, 5, 5, 0, -1, -2})), (std::vector<int>{2, 1}));
}

TEST(Adam, ZeroGradientLeavesParameterAndOneStepMatchesHand) {
  Tensor still = Tensor::full({2}, 0.7, true);
  Tensor moving = Tensor::full({1}, 0.0, true);
  sum(moving).backward();
  std::vector<Parameter> params{{"still", still}, {"moving", moving}};
  OptimizerState state = OptimizerState::for_parameters(params);
  AdamConfig config;
  config.learning_rate = 1e-3;
  adam_step(params, state, config);
  EXPECT_EQ(still.data()[0], 0.7);
  EXPECT_EQ(still.data()[1], 0.7);
  EXPECT_NEAR(moving.data()[0], -1e-3 / (1.0 + 1e-8), 1e-18);
  EXPECT_EQ(state.step, 1u);
}

TEST(Adam, Deterministic) {
  auto run = [] {
    Tensor w({3}, {0.1, -0.2, 0.3}, true);
    std::vector<Parameter> params{{"w", w}};
    OptimizerState state = OptimizerState::for_parameters(params);
    AdamConfig config;
    config.learning_rate = 0.01;
    for (int i = 0; i < 10; ++i) {
      w.zero_grad();
      sum(w * w * w).backward();
      adam_step(params, state, config);
    }
    return std::vector<double>(w.data().begin(), w.data().end());
  };
  EXPECT_EQ(run(), run());
}

TEST(Adam, NonFiniteGradientNamesParameter) {
  Tensor ok = Tensor::full({1}, 1.0, true);
  Tensor bad = Tensor::full({2}, 1.0, true);
  sum(ok).backward();
  sum(bad * std::numeric_limits<double>::infinity()).backward();
  std::vector<Parameter> params{{"ok", ok}, {"1.dense.weight", bad}};
  OptimizerState state = OptimizerState::for_parameters(params);
  AdamConfig config;
  config.learning_rate = 1e-3;
  try {
    adam_step(params, state, config);
    FAIL() << "expected TrainingError";
  } catch (const TrainingError& e) {
    EXPECT_NE(std::string(e.what()).find("1.dense.weight"), std::string::npos);
  }
  EXPECT_EQ(ok.data()[0], 1.0);
  EXPECT_EQ(state.step, 0u);
}

TEST(Training, LossDecreasesOnFixedBatch) {
  Model m = build_model(small_scs(), 5);
  const Tensor batch = random_batch({4, 6, 6, 2}, 6);
  const std::vector<int> targets{1, 2, 3, 1};
  auto params = m.parameters();
  OptimizerState state = OptimizerState::for_parameters(params);
  AdamConfig config;
  config.learning_rate = 1e-3;
  double previous = std::numeric_limits<double>::infinity();
  for (int step = 0; step < 5; ++step) {
    const double loss = loss_and_gradients(m, batch, targets);
    EXPECT_LT(loss, previous) << "step " << step;
    previous = loss;
    adam_step(params, state, config);
  }
}

TEST(Training, EndToEndGradientMatchesFiniteDifferences) {
  Model m = build_model(small_scs(), 7);
  const Tensor batch = random_batch({2, 6, 6, 2}, 8);
  const std::vector<int> targets{2, 3};
  std::vector<Tensor> leaves;
  for (const auto& p : m.parameters()) leaves.push_back(p.value);
  const double err =
      finite_difference_check([&] { return softmax_cross_entropy(m.forward(batch), targets); }, leaves, 1e-6);
  EXPECT_LE(err, 1e-4);
}

TEST(Training, ZeroEpochsGivesEmptyHistory) {
  const Toy toy = separable_toy(1);
  const PatchExtractor patches(toy.cube, 1);
  Model m = build_model(toy_model(), 1);
  const auto before = parameter_values(m);
  const auto pixels = labeled_pixels(toy.labels);
  TrainData data{&patches, pixels, pixels};
  const TrainState s = train(m, data, toy_train(0));
  EXPECT_TRUE(s.history.empty());
  EXPECT_EQ(s.epoch, 0u);
  EXPECT_EQ(parameter_values(m), before);
}

TEST(Training, SeparableToyIsFitted) {
  const Toy toy = separable_toy(2);
  const PatchExtractor patches(toy.cube, 1);
  Model m = build_model(toy_model(), 3);
  const auto pixels = labeled_pixels(toy.labels);
  TrainData data{&patches, pixels, pixels};
  const TrainState s = train(m, data, toy_train(150));
  ASSERT_EQ(s.history.size(), 150u);
  EXPECT_EQ(s.history.back().train_acc, 100.0);
  EXPECT_EQ(evaluate(m, patches, pixels, 16).accuracy, 100.0);
}

TEST(Checkpoint, EncodeDecodeRoundTrip) {
  const Toy toy = separable_toy(3);
  const PatchExtractor patches(toy.cube, 1);
  Model m = build_model(toy_model(), 3);
  const auto pixels = labeled_pixels(toy.labels);
  const TrainState s = train(m, {&patches, pixels, pixels}, toy_train(3));
  Checkpoint c = make_checkpoint(m, s);
  c.config_text = "x = 1\n";
  c.config_digest = sha256_hex(c.config_text);
  c.dataset_digest = "d";
  c.split_digest = "s";
  c.train_seed = 4;
  const auto bytes = encode_checkpoint(c);
  const Checkpoint back = decode_checkpoint(bytes);
  EXPECT_EQ(encode_checkpoint(back), bytes);
  EXPECT_EQ(back.state.history.size(), 3u);
  EXPECT_EQ(back.state.best_params, s.best_params);
  EXPECT_EQ(back.parameters[0].name, "0.scs.kernel");

  auto truncated = bytes;
  truncated.resize(bytes.size() - 3);
  EXPECT_THROW(decode_checkpoint(truncated), FormatError);
  Model other = build_model(small_scs(), 1);
  EXPECT_THROW(restore_parameters(other, back), ConfigError);
}

TEST(Checkpoint, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex(std::string_view("abc")),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Checkpoint, ResumeIsBitIdentical) {
  const Toy toy = separable_toy(4);
  const PatchExtractor patches(toy.cube, 1);
  const auto pixels = labeled_pixels(toy.labels);
  const TrainData data{&patches, pixels, pixels};

  Model straight = build_model(toy_model(), 5);
  const TrainState full = train(straight, data, toy_train(8));

  Model first = build_model(toy_model(), 5);
  const TrainState partial = train(first, data, toy_train(3));
  const Checkpoint saved = decode_checkpoint(encode_checkpoint(make_checkpoint(first, partial)));
  Model resumed = build_model(toy_model(), 99);
  restore_parameters(resumed, saved);
  const TrainState finished = train(resumed, data, toy_train(8), saved.state);

  EXPECT_EQ(parameter_values(resumed), parameter_values(straight));
  EXPECT_EQ(finished.optimizer.m, full.optimizer.m);
  EXPECT_EQ(finished.optimizer.v, full.optimizer.v);
  EXPECT_EQ(finished.best_params, full.best_params);
  ASSERT_EQ(finished.history.size(), full.history.size());
  for (std::size_t i = 0; i < full.history.size(); ++i) {
    EXPECT_EQ(finished.history[i].train_loss, full.history[i].train_loss);
    EXPECT_EQ(finished.history[i].val_acc, full.history[i].val_acc);
  }
}

TEST(Training, Float32ModeKeepsParametersRepresentable) {
  const Toy toy = separable_toy(5);
  const PatchExtractor patches(toy.cube, 1);
  Model m = build_model(toy_model(), 6);
  auto cfg = toy_train(2);
  cfg.precision = Precision::kF32;
  const auto pixels = labeled_pixels(toy.labels);
  train(m, {&patches, pixels, pixels}, cfg);
  for (const auto& values : parameter_values(m))
    for (double v : values) EXPECT_EQ(v, static_cast<double>(static_cast<float>(v)));
}
