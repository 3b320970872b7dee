#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "excitnet/net/checkpoint.hpp"
#include "excitnet/net/config.hpp"
#include "excitnet/net/generate.hpp"
#include "excitnet/net/network.hpp"
#include "excitnet/net/train.hpp"
#include "support/net_checks.hpp"

namespace excitnet::net {
namespace {

using testing::random_codes;
using testing::random_conditions;
using testing::tiny_config;

const double kLn256 = std::log(256.0);

NetConfig small_config(std::uint64_t seed = 3) {
  NetConfig c;
  c.n_blocks = 2;
  c.layers_per_block = 3;
  c.residual_channels = c.gate_channels = c.skip_channels = c.head_channels = 16;
  c.seed = seed;
  return c;
}

// --- config ----------------------------------------------------------------

TEST(NetConfig, ReceptiveField) {
  EXPECT_EQ(receptive_field(NetConfig::full()), 3070u);
  NetConfig c;
  c.n_blocks = 1;
  c.layers_per_block = 3;
  EXPECT_EQ(receptive_field(c), 8u);
  c.layers_per_block = 1;
  EXPECT_EQ(receptive_field(c), 2u);
  EXPECT_EQ(receptive_field(NetConfig::toy()), 127u);
}

TEST(NetConfig, FullConfigurationMatchesReferenceHyperparameters) {
  // Three blocks of ten layers, 512 residual/gate channels, 256-wide head
  // before the softmax, 256 mu-law classes, 79-dim conditions.
  const auto c = NetConfig::full();
  EXPECT_EQ(c.n_blocks, 3u);
  EXPECT_EQ(c.layers_per_block, 10u);
  EXPECT_EQ(c.residual_channels, 512u);
  EXPECT_EQ(c.gate_channels, 512u);
  EXPECT_EQ(c.head_channels, 256u);
  EXPECT_EQ(c.n_classes, 256u);
  EXPECT_EQ(c.cond_dim, 40u + 32u + 4u + 3u);
}

TEST(NetConfig, DilationSchedule) {
  auto d = NetConfig::full().dilations();
  ASSERT_EQ(d.size(), 30u);
  EXPECT_EQ(d[0], 1u);
  EXPECT_EQ(d[9], 512u);
  EXPECT_EQ(d[10], 1u);
  for (std::size_t i = 1; i < d.size(); ++i)
    if (i % 10 != 0) {
      EXPECT_EQ(d[i], 2 * d[i - 1]);
    }
}

TEST(NetConfig, FullAndToyShapes) {
  auto p = NetConfig::full();
  EXPECT_EQ(p.residual_channels, 512u);
  EXPECT_EQ(p.gate_channels, 512u);
  EXPECT_EQ(p.head_channels, 256u);
  EXPECT_EQ(p.n_classes, 256u);
  EXPECT_EQ(p.cond_dim, 79u);
  auto t = NetConfig::toy();
  EXPECT_EQ(t.n_blocks, 2u);
  EXPECT_EQ(t.layers_per_block, 6u);
  EXPECT_EQ(t.residual_channels, 64u);
}

TEST(NetConfig, InvalidRejected) {
  NetConfig c;
  c.gate_channels = 0;
  EXPECT_THROW(c.validate(), Error);
  EXPECT_THROW(NetParams<float>::zeros(c), Error);
}

// --- init ------------------------------------------------------------------

TEST(Init, SameSeedIdentical) {
  EXPECT_EQ(init_network<float>(small_config(5)), init_network<float>(small_config(5)));
}

TEST(Init, DifferentSeedsDiffer) {
  EXPECT_NE(init_network<float>(small_config(5)).embed,
            init_network<float>(small_config(6)).embed);
}

TEST(Init, XavierVarianceAndZeroBiases) {
  auto p = init_network<double>(NetConfig::toy());
  std::size_t big = 0;
  p.for_each([&](const Tensor<double>& t) {
    if (t.dims.size() == 1) {
      for (double v : t.data) EXPECT_EQ(v, 0.0) << t.name;
      return;
    }
    auto [fi, fo] = xavier_fans(t.dims);
    const double bound = std::sqrt(6.0 / double(fi + fo));
    double mean = 0.0, var = 0.0;
    for (double v : t.data) {
      EXPECT_LE(std::abs(v), bound);
      mean += v;
    }
    mean /= double(t.size());
    for (double v : t.data) var += (v - mean) * (v - mean);
    var /= double(t.size() - 1);
    if (t.size() >= 10000) {
      ++big;
      EXPECT_NEAR(var, 2.0 / double(fi + fo), 0.2 * 2.0 / double(fi + fo)) << t.name;
    }
  });
  EXPECT_GE(big, 3u);
}

TEST(Init, FanConventions) {
  EXPECT_EQ(xavier_fans({10, 20}), (std::pair<std::size_t, std::size_t>{10, 20}));
  EXPECT_EQ(xavier_fans({2, 10, 20}), (std::pair<std::size_t, std::size_t>{20, 40}));
}

// --- forward / loss --------------------------------------------------------

TEST(Forward, ShapeAndConditionMismatch) {
  auto p = init_network<float>(small_config());
  auto codes = random_codes(50, 1);
  auto logits = forward(p, codes, random_conditions<float>(50, 79, 2));
  EXPECT_EQ(logits.rows, 50u);
  EXPECT_EQ(logits.cols, 256u);
  EXPECT_THROW(forward(p, codes, random_conditions<float>(49, 79, 2)), Error);
  EXPECT_THROW(forward(p, codes, random_conditions<float>(50, 78, 2)), Error);
  codes[3] = 256;
  EXPECT_THROW(forward(p, codes, random_conditions<float>(50, 79, 2)), Error);
}

TEST(Forward, ZeroHeadGivesUniformLogits) {
  auto p = init_network<float>(small_config());
  for (auto& v : p.out2_w.data) v = 0.0f;
  auto codes = random_codes(40, 3);
  auto logits = forward(p, codes, random_conditions<float>(40, 79, 4));
  for (float v : logits.data) EXPECT_EQ(v, 0.0f);
  EXPECT_NEAR(loss_nll(logits, codes), kLn256, 1e-12);
  EXPECT_NEAR(kLn256, 5.5452, 1e-4);
}

TEST(Forward, Causality) {
  auto p = init_network<float>(small_config());
  const std::size_t T = 200, rf = receptive_field(p.config);
  auto codes = random_codes(T, 5);
  auto cond = random_conditions<float>(T, 79, 6);
  auto base = forward(p, codes, cond);
  for (std::size_t t : {0u, 17u, 100u, 150u}) {
    auto perturbed = codes;
    perturbed[t] = (codes[t] + 97) % 256;
    auto span = testing::changed_rows(base, forward(p, perturbed, cond));
    EXPECT_EQ(span.first_changed, static_cast<std::ptrdiff_t>(t + 1)) << t;
    EXPECT_EQ(span.last_changed, static_cast<std::ptrdiff_t>(std::min(t + rf, T - 1))) << t;
  }
  for (std::size_t t : {0u, 60u, 199u}) {
    auto c2 = cond;
    c2(t, 11) += 0.5f;
    auto span = testing::changed_rows(base, forward(p, codes, c2));
    EXPECT_EQ(span.first_changed, static_cast<std::ptrdiff_t>(t)) << t;
  }
}

TEST(Forward, RepeatedConditionRowsShareProjection) {
  Matrix<float> cond(12, 2, 0.0f);
  for (std::size_t r = 0; r < 12; ++r) cond(r, 0) = static_cast<float>(r / 5);
  auto runs = find_condition_runs(cond);
  EXPECT_EQ(runs.first_row, (std::vector<std::size_t>{0, 5, 10}));
  EXPECT_EQ(runs.run_of_row[4], 0u);
  EXPECT_EQ(runs.run_of_row[5], 1u);
}

TEST(Forward, ShiftInputs) {
  std::vector<int> codes{5, 6, 7};
  EXPECT_EQ(shift_inputs(codes), (std::vector<int>{128, 5, 6}));
}

TEST(Loss, SaturatedTargetIsNearZero) {
  Matrix<float> logits(3, 256, 0.0f);
  std::vector<int> targets{0, 128, 255};
  for (std::size_t t = 0; t < 3; ++t) logits(t, targets[t]) = 1000.0f;
  EXPECT_NEAR(loss_nll(logits, targets), 0.0, 1e-12);
}

TEST(Loss, MatchesHighPrecisionOracle) {
  auto logits = random_conditions<double>(20, 256, 7);
  for (auto& v : logits.data) v *= 4.0;
  auto targets = random_codes(20, 8);
  long double total = 0.0L;
  for (std::size_t t = 0; t < 20; ++t) {
    long double z = 0.0L;
    for (std::size_t k = 0; k < 256; ++k) z += std::exp(static_cast<long double>(logits(t, k)));
    total += std::log(z) - logits(t, targets[t]);
  }
  EXPECT_NEAR(loss_nll(logits, targets), static_cast<double>(total / 20), 1e-10);
}

TEST(Loss, RespectsBeginOffset) {
  Matrix<double> logits(4, 256, 0.0);
  logits(0, 3) = 50.0;
  std::vector<int> targets{7, 1, 2, 3};
  EXPECT_NEAR(loss_nll(logits, targets, 1), kLn256, 1e-12);
  EXPECT_THROW(loss_nll(logits, targets, 4), Error);
}

TEST(Loss, SoftmaxRowsSumToOne) {
  auto logits = random_conditions<float>(10, 256, 9);
  for (std::size_t t = 0; t < 10; ++t) {
    auto p = softmax_row(std::span<const float>(logits.row(t), 256));
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-6);
  }
}

// --- backward --------------------------------------------------------------

TEST(Backward, MatchesFiniteDifferences) {
  auto p = init_network<double>(tiny_config(11));
  testing::jitter(p, 0.05, 12);
  auto codes = random_codes(32, 13);
  auto cond = random_conditions<double>(32, 79, 14);
  for (const auto& e : testing::gradient_check(p, codes, cond)) {
    EXPECT_GT(e.checked, 0u);
    EXPECT_LE(e.max_relative, 1e-4) << e.name;
  }
}

TEST(Backward, LossOffsetExcludesContextRows) {
  auto p = init_network<double>(tiny_config(15));
  auto codes = random_codes(20, 16);
  auto cond = random_conditions<double>(20, 79, 17);
  ForwardCache<double> cache;
  forward_inputs(p, shift_inputs(codes), cond, cache);
  auto g = NetParams<double>::zeros(p.config);
  const double loss = backward(p, cache, codes, 5, g);
  EXPECT_NEAR(loss, loss_nll(cache.logits, codes, 5), 1e-12);
}

TEST(Backward, FloatAndDoubleAgree) {
  auto pd = init_network<double>(small_config(18));
  auto pf = cast_params<float>(pd);
  auto codes = random_codes(64, 19);
  auto cd = random_conditions<double>(64, 79, 20);
  Matrix<float> cf(64, 79);
  for (std::size_t i = 0; i < cd.data.size(); ++i) cf.data[i] = static_cast<float>(cd.data[i]);
  ForwardCache<double> cache_d;
  ForwardCache<float> cache_f;
  forward_inputs(pd, shift_inputs(codes), cd, cache_d);
  forward_inputs(pf, shift_inputs(codes), cf, cache_f);
  auto gd = NetParams<double>::zeros(pd.config);
  auto gf = NetParams<float>::zeros(pd.config);
  EXPECT_NEAR(backward(pd, cache_d, codes, 0, gd), backward(pf, cache_f, codes, 0, gf), 1e-5);
  EXPECT_NEAR(gd.out2_w.data[7], gf.out2_w.data[7], 1e-5);
  EXPECT_NEAR(gd.layers[0].cond_w.data[3], gf.layers[0].cond_w.data[3], 1e-5);
}

// --- training --------------------------------------------------------------

TrainingBatch<float> whole_clip(std::span<const int> codes, const Matrix<float>& cond) {
  return make_window<float>(codes, cond, 0, codes.size(), 1);
}

TEST(Train, ZeroLearningRateLeavesParams) {
  auto p = init_network<float>(small_config());
  const auto before = p;
  auto state = AdamState<float>::zeros(p.config);
  auto codes = random_codes(100, 21);
  auto cond = random_conditions<float>(100, 79, 22);
  AdamConfig cfg;
  cfg.learning_rate = 0.0;
  const double loss = train_step(p, state, whole_clip(codes, cond), cfg);
  EXPECT_TRUE(std::isfinite(loss));
  EXPECT_EQ(p, before);
  EXPECT_EQ(state.step, 1u);
}

TEST(Train, LossDecreasesOnFixedClip) {
  auto p = init_network<float>(small_config());
  auto state = AdamState<float>::zeros(p.config);
  std::vector<int> codes(300);
  for (std::size_t i = 0; i < codes.size(); ++i) codes[i] = 100 + static_cast<int>(i % 7) * 8;
  Matrix<float> cond(300, 79, 0.0f);
  AdamConfig cfg;
  cfg.learning_rate = 1e-3;
  const auto batch = whole_clip(codes, cond);
  const double first = train_step(p, state, batch, cfg);
  double last = first;
  for (int i = 0; i < 40; ++i) last = train_step(p, state, batch, cfg);
  EXPECT_LT(last, 0.8 * first);
}

TEST(Train, DeterministicUnderFixedSeed) {
  auto run = [] {
    auto p = init_network<float>(small_config(23));
    auto state = AdamState<float>::zeros(p.config);
    auto codes = random_codes(400, 24);
    auto cond = random_conditions<float>(400, 79, 25);
    WindowSampler sampler({codes.size()}, 100, 26);
    for (int i = 0; i < 5; ++i) {
      auto pick = sampler.next();
      train_step(p, state,
                 make_window<float>(codes, cond, pick.start, pick.length,
                                    receptive_field(p.config)),
                 AdamConfig{});
    }
    return std::pair{p, state};
  };
  EXPECT_EQ(run(), run());
}

TEST(Train, ReusedWorkspaceMatchesFreshBuffers) {
  auto run = [](bool reuse) {
    auto p = init_network<float>(small_config(31));
    auto state = AdamState<float>::zeros(p.config);
    auto codes = random_codes(500, 32);
    auto cond = random_conditions<float>(500, 79, 33);
    WindowSampler sampler({codes.size()}, 120, 34);
    TrainWorkspace<float> work;
    std::vector<double> losses;
    for (int i = 0; i < 6; ++i) {
      auto pick = sampler.next();
      // Varying window lengths exercise buffer reshaping.
      const auto batch = make_window<float>(codes, cond, pick.start, pick.length - 10 * i,
                                            receptive_field(p.config));
      losses.push_back(reuse ? train_step(p, state, batch, AdamConfig{}, work)
                             : train_step(p, state, batch, AdamConfig{}));
    }
    return std::tuple{p, state, losses};
  };
  EXPECT_EQ(run(true), run(false));
}

TEST(Train, NonFiniteLossThrowsAndKeepsParams) {
  auto p = init_network<float>(small_config());
  p.out2_b.data[0] = std::numeric_limits<float>::infinity();
  const auto before = p;
  auto state = AdamState<float>::zeros(p.config);
  auto codes = random_codes(30, 27);
  auto cond = random_conditions<float>(30, 79, 28);
  try {
    train_step(p, state, whole_clip(codes, cond), AdamConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "training diverged");
  }
  EXPECT_EQ(p, before);
  EXPECT_EQ(state.step, 0u);
}

TEST(Train, AdamFirstStepMovesByLearningRate) {
  // With bias correction the first update is lr * g / (|g| + eps) per element.
  auto p = init_network<double>(tiny_config(29));
  auto g = NetParams<double>::zeros(p.config);
  g.out2_b.data[0] = 0.5;
  g.out2_b.data[1] = -2.0;
  auto state = AdamState<double>::zeros(p.config);
  const auto before = p;
  adam_update(p, g, state, AdamConfig{});
  EXPECT_NEAR(p.out2_b.data[0] - before.out2_b.data[0], -1e-4 * 0.5 / (0.5 + 1e-8), 1e-15);
  EXPECT_NEAR(p.out2_b.data[1] - before.out2_b.data[1], 1e-4 * 2.0 / (2.0 + 1e-8), 1e-15);
  EXPECT_EQ(p.out2_b.data[2], before.out2_b.data[2]);
}

TEST(Train, WindowCarriesContext) {
  std::vector<int> codes(50);
  std::iota(codes.begin(), codes.end(), 0);
  Matrix<float> cond(50, 1);
  for (std::size_t r = 0; r < 50; ++r) cond(r, 0) = static_cast<float>(r);
  auto b = make_window<float>(codes, cond, 20, 10, 8);
  EXPECT_EQ(b.loss_begin, 7u);
  ASSERT_EQ(b.inputs.size(), 17u);
  EXPECT_EQ(b.inputs.front(), 12);
  EXPECT_EQ(b.targets.front(), 13);
  EXPECT_EQ(b.targets[b.loss_begin], 20);
  EXPECT_EQ(b.conditions(b.loss_begin, 0), 20.0f);
  auto head = make_window<float>(codes, cond, 0, 5, 8);
  EXPECT_EQ(head.loss_begin, 0u);
  EXPECT_EQ(head.inputs.front(), kZeroAmplitudeCode);
  EXPECT_THROW(make_window<float>(codes, cond, 45, 10, 8), Error);
}

TEST(Train, SamplerStaysInRange) {
  WindowSampler s({500, 80, 1200}, 100, 30);
  for (int i = 0; i < 200; ++i) {
    auto pick = s.next();
    const std::size_t len = std::vector<std::size_t>{500, 80, 1200}[pick.utterance];
    EXPECT_EQ(pick.length, std::min<std::size_t>(100, len));
    EXPECT_LE(pick.start + pick.length, len);
  }
  EXPECT_THROW(WindowSampler({}, 10, 1), Error);
}

// --- generation ------------------------------------------------------------

TEST(Generate, EmptyConditions) {
  auto p = init_network<float>(small_config());
  Matrix<float> cond(0, 79);
  EXPECT_TRUE(generate_naive(p, cond, SamplingMode::argmax()).codes.empty());
  EXPECT_TRUE(generate_fast(p, cond, SamplingMode::argmax()).codes.empty());
}

TEST(Generate, FastMatchesNaive) {
  for (std::uint64_t seed : {31u, 32u}) {
    auto p = init_network<float>(small_config(seed));
    testing::jitter(p, 0.05, seed);
    auto cond = random_conditions<float>(120, 79, seed + 1);
    for (auto mode : {SamplingMode::argmax(), SamplingMode::sample(seed + 2)}) {
      auto naive = generate_naive(p, cond, mode, true);
      auto fast = generate_fast(p, cond, mode, true);
      EXPECT_EQ(naive.codes, fast.codes);
      ASSERT_EQ(naive.logits.rows, 120u);
      double worst = 0.0;
      for (std::size_t i = 0; i < naive.logits.data.size(); ++i)
        worst = std::max(worst, double(std::abs(naive.logits.data[i] - fast.logits.data[i])));
      EXPECT_LE(worst, 1e-5);
    }
  }
}

TEST(Generate, ArgmaxIgnoresSeedAndSamplingIsReproducible) {
  auto p = init_network<float>(small_config(33));
  testing::jitter(p, 0.1, 34);
  auto cond = random_conditions<float>(80, 79, 35);
  auto a = generate_fast(p, cond, SamplingMode::argmax()).codes;
  auto argmax_with_seed = SamplingMode::argmax();
  argmax_with_seed.seed = 99;
  EXPECT_EQ(a, generate_fast(p, cond, argmax_with_seed).codes);
  auto s1 = generate_fast(p, cond, SamplingMode::sample(7)).codes;
  EXPECT_EQ(s1, generate_fast(p, cond, SamplingMode::sample(7)).codes);
  EXPECT_NE(s1, generate_fast(p, cond, SamplingMode::sample(8)).codes);
}

TEST(Generate, ChooseCode) {
  std::vector<float> logits(256, 0.0f);
  logits[10] = 5.0f;
  logits[20] = 5.0f;
  std::mt19937_64 rng(1);
  EXPECT_EQ(choose_code(logits, SamplingMode::argmax(), rng), 10);
  std::vector<float> peaked(256, -1000.0f);
  peaked[42] = 0.0f;
  for (int i = 0; i < 20; ++i) EXPECT_EQ(choose_code(peaked, SamplingMode::sample(3), rng), 42);
}

TEST(Generate, SamplingFollowsSoftmax) {
  std::vector<float> logits(256, -1000.0f);
  logits[1] = std::log(0.25f);
  logits[2] = std::log(0.75f);
  std::mt19937_64 rng(5);
  int ones = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) ones += choose_code(logits, SamplingMode::sample(0), rng) == 1;
  EXPECT_NEAR(double(ones) / n, 0.25, 0.015);
}

TEST(Generate, GenStateMatchesForward) {
  auto p = init_network<float>(small_config(36));
  testing::jitter(p, 0.05, 37);
  auto codes = random_codes(60, 38);
  auto cond = random_conditions<float>(60, 79, 39);
  auto logits = forward(p, codes, cond);
  GenState state(p);
  for (std::size_t t = 0; t < 60; ++t) {
    auto out = state.step(t == 0 ? kZeroAmplitudeCode : codes[t - 1],
                          std::span<const float>(cond.row(t), 79));
    for (std::size_t k = 0; k < 256; ++k) ASSERT_NEAR(out[k], logits(t, k), 1e-5);
  }
  EXPECT_EQ(state.steps(), 60u);
}

// --- checkpoint ------------------------------------------------------------

Checkpoint sample_checkpoint() {
  Checkpoint c;
  c.params = init_network<float>(small_config(40));
  c.adam = AdamState<float>::zeros(c.params.config);
  testing::jitter(c.adam->m, 0.01, 41);
  c.adam->step = 17;
  c.step = 17;
  c.attributes["vocoder.kind"] = "excitnet";
  c.attributes["note"] = "tab\tand\nnewline";
  Tensor<float> aux("scale", {1});
  aux.data[0] = 0.25f;
  c.aux.push_back(aux);
  return c;
}

std::filesystem::path ckpt_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("excitnet_net_" + name);
}

TEST(Checkpoint, RoundTripBitExact) {
  auto c = sample_checkpoint();
  const auto path = ckpt_path("roundtrip.exnm");
  save_checkpoint(c, path);
  auto back = load_checkpoint(path);
  EXPECT_EQ(back, c);
  ASSERT_NE(back.find_aux("scale"), nullptr);
  EXPECT_EQ(back.find_aux("scale")->data[0], 0.25f);
  EXPECT_EQ(back.find_aux("missing"), nullptr);
  EXPECT_EQ(serialize_checkpoint(back), serialize_checkpoint(c));
  std::filesystem::remove(path);
}

TEST(Checkpoint, WithoutAdamState) {
  auto c = sample_checkpoint();
  c.adam.reset();
  auto back = deserialize_checkpoint(serialize_checkpoint(c));
  EXPECT_FALSE(back.adam.has_value());
  EXPECT_EQ(back, c);
}

TEST(Checkpoint, ConfigReloadRebuildsShapes) {
  auto c = sample_checkpoint();
  auto back = deserialize_checkpoint(serialize_checkpoint(c));
  auto fresh = NetParams<float>::zeros(back.config());
  std::vector<std::vector<std::uint32_t>> a, b;
  fresh.for_each([&](const Tensor<float>& t) { a.push_back(t.dims); });
  c.params.for_each([&](const Tensor<float>& t) { b.push_back(t.dims); });
  EXPECT_EQ(a, b);
}

TEST(Checkpoint, TruncationAndCorruptionRejected) {
  const auto bytes = serialize_checkpoint(sample_checkpoint());
  for (std::size_t cut : {std::size_t{0}, std::size_t{3}, std::size_t{40}, bytes.size() / 2,
                          bytes.size() - 1})
    EXPECT_THROW(deserialize_checkpoint(std::string_view(bytes).substr(0, cut)), Error) << cut;
  auto flipped = bytes;
  flipped[bytes.size() / 3] ^= 0x10;
  EXPECT_THROW(deserialize_checkpoint(flipped), Error);
  auto magic = bytes;
  magic[0] = 'X';
  EXPECT_THROW(deserialize_checkpoint(magic), Error);
  auto version = bytes;
  version[4] = 2;
  EXPECT_THROW(deserialize_checkpoint(version), Error);
}

TEST(Checkpoint, TruncatedFileOnDisk) {
  const auto path = ckpt_path("truncated.exnm");
  save_checkpoint(sample_checkpoint(), path);
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 10);
  EXPECT_THROW(load_checkpoint(path), Error);
  EXPECT_THROW(load_checkpoint(ckpt_path("does_not_exist.exnm")), Error);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace excitnet::net
