#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "excitnet/binary_io.hpp"
#include "excitnet/vocoder/metrics.hpp"
#include "excitnet/vocoder/vocoder.hpp"
#include "excitnet/vocoder/wav.hpp"
#include "support/net_checks.hpp"
#include "support/test_signals.hpp"

namespace excitnet::vocoder {
namespace {

constexpr double kPi = std::numbers::pi;

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("excitnet_vocoder_" + name);
}

std::vector<Utterance> vowel_utterances() {
  std::vector<Utterance> out;
  int i = 0;
  for (auto& s : testing::synthetic_vowel_corpus()) out.push_back({"v" + std::to_string(i++), s});
  return out;
}

std::vector<Utterance> first_utterances(std::size_t n) {
  auto all = vowel_utterances();
  all.resize(n);
  return all;
}

Signal aligned_to(const Signal& s, const features::AcousticFeatureSequence& seq) {
  return features::align_to_frames(s, seq.size(), seq.shift);
}

double rms(const std::vector<double>& x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return std::sqrt(e / static_cast<double>(x.size()));
}

// Naive DFT log-spectral distortion on the same grid, for oracle use.
double oracle_lsd(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t frame = 480, shift = 120, nfft = 1024;
  const std::size_t len = std::min(x.size(), y.size());
  std::vector<double> w(frame);
  for (std::size_t i = 0; i < frame; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(frame - 1));
  auto spectrum = [&](const std::vector<double>& s, std::size_t start) {
    std::vector<double> db(nfft / 2 + 1);
    for (std::size_t k = 0; k <= nfft / 2; ++k) {
      std::complex<double> acc = 0.0;
      for (std::size_t i = 0; i < frame && start + i < len; ++i)
        acc += s[start + i] * w[i] *
               std::polar(1.0, -2.0 * kPi * static_cast<double>(k * i) / static_cast<double>(nfft));
      db[k] = 10.0 * std::log10(std::max(std::norm(acc), 1e-10));
    }
    return db;
  };
  double total = 0.0;
  std::size_t frames = 0;
  for (std::size_t s = 0; s + frame <= len; s += shift, ++frames) {
    const auto a = spectrum(x, s), b = spectrum(y, s);
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) acc += (a[k] - b[k]) * (a[k] - b[k]);
    total += std::sqrt(acc / static_cast<double>(a.size()));
  }
  return total / static_cast<double>(frames);
}

// --- WAV ---------------------------------------------------------------------

TEST(Wav, RoundTripWithinHalfStep) {
  auto s = testing::white_noise(5000, 0.3, 4);
  for (auto& v : s.samples) v = std::clamp(v, -1.0, 0.999);
  const auto path = temp_path("rt.wav");
  write_wav(path, s);
  auto back = read_wav(path);
  EXPECT_EQ(back.sample_rate, 24000);
  ASSERT_EQ(back.size(), s.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    EXPECT_LE(std::abs(back.samples[i] - s.samples[i]), 0.5 / 32768.0 + 1e-12);
  write_wav(path, back);
  EXPECT_EQ(read_wav(path).samples, back.samples);
  std::filesystem::remove(path);
}

TEST(Wav, ClipsOnWrite) {
  const auto path = temp_path("clip.wav");
  write_wav(path, Signal{{2.0, -3.0, 0.0}, 16000});
  auto back = read_wav(path);
  EXPECT_EQ(back.sample_rate, 16000);
  EXPECT_DOUBLE_EQ(back.samples[0], 32767.0 / 32768.0);
  EXPECT_DOUBLE_EQ(back.samples[1], -1.0);
  std::filesystem::remove(path);
}

std::string wav_header(std::uint16_t channels, std::uint16_t bits, std::uint32_t data_bytes) {
  io::ByteWriter w;
  w.put_bytes("RIFF");
  w.put_u32(36 + data_bytes);
  w.put_bytes("WAVEfmt ");
  w.put_u32(16);
  w.put_u32(1u | (static_cast<std::uint32_t>(channels) << 16));
  w.put_u32(24000);
  w.put_u32(24000u * channels * bits / 8);
  w.put_u32(static_cast<std::uint32_t>(channels * bits / 8) | (static_cast<std::uint32_t>(bits) << 16));
  w.put_bytes("data");
  w.put_u32(data_bytes);
  return w.take();
}

void expect_rejected(const std::string& bytes, const std::string& name, const std::string& what) {
  const auto path = temp_path(name);
  {
    std::ofstream out(path, std::ios::binary);
    out << bytes;
  }
  try {
    read_wav(path);
    ADD_FAILURE() << name << " was accepted";
  } catch (const Error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find(path.string()), std::string::npos) << msg;
    EXPECT_NE(msg.find(what), std::string::npos) << msg;
  }
  std::filesystem::remove(path);
}

TEST(Wav, RejectsUnsupportedLayouts) {
  expect_rejected(wav_header(2, 16, 8) + std::string(8, '\0'), "stereo.wav", "mono");
  expect_rejected(wav_header(1, 8, 4) + std::string(4, '\0'), "8bit.wav", "16-bit");
  expect_rejected("", "empty.wav", "RIFF");
  expect_rejected(wav_header(1, 16, 0), "nodata.wav", "no samples");
  expect_rejected(std::string("RIFF\x04\0\0\0WAVE", 12), "nochunks.wav", "no data chunk");
  EXPECT_THROW(read_wav(temp_path("does_not_exist.wav")), Error);
}

TEST(Wav, LinearResamplerIsExactOnRamps) {
  Signal ramp;
  ramp.sample_rate = 44100;
  for (int i = 0; i < 4410; ++i) ramp.samples.push_back(1e-4 * i);
  auto out = resample_linear(ramp, 24000);
  EXPECT_EQ(out.sample_rate, 24000);
  EXPECT_EQ(out.size(), 2400u);
  for (std::size_t i = 0; i < out.size(); ++i)
    EXPECT_NEAR(out.samples[i], 1e-4 * static_cast<double>(i) * 44100.0 / 24000.0, 1e-12);
  EXPECT_EQ(resample_linear(ramp, 44100).samples, ramp.samples);
}

// --- metrics -------------------------------------------------------------------

TEST(Metrics, IdenticalSignals) {
  auto s = testing::synthetic_vowel(0.5, 150);
  auto m = evaluate_pair(s, s);
  EXPECT_EQ(m.segmental_snr, kSegSnrCeiling);
  EXPECT_EQ(m.log_spectral_distortion, 0.0);
  EXPECT_EQ(m.f0_rmse, 0.0);
  EXPECT_EQ(m.vuv_error, 0.0);
}

TEST(Metrics, SilenceIsDefined) {
  Signal z{std::vector<double>(4800, 0.0), 24000};
  auto m = evaluate_pair(z, z);
  EXPECT_TRUE(std::isfinite(m.segmental_snr));
  EXPECT_TRUE(std::isfinite(m.log_spectral_distortion));
  EXPECT_EQ(m.f0_rmse, 0.0);
  EXPECT_EQ(m.vuv_error, 0.0);
  auto s = testing::white_noise(4800, 0.1, 2);
  EXPECT_EQ(segmental_snr(z, s), kSegSnrFloor);
}

TEST(Metrics, KnownNoiseLevel) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto ref = testing::white_noise(48000, 0.3, seed);
    auto noise = testing::white_noise(48000, 0.03, seed + 100);
    Signal deg = ref;
    for (std::size_t i = 0; i < deg.size(); ++i) deg.samples[i] += noise.samples[i];
    EXPECT_NEAR(segmental_snr(ref, deg), 20.0, 1.0);
  }
}

TEST(Metrics, SegmentalSnrMatchesOracle) {
  auto ref = testing::synthetic_vowel(0.3, 180);
  for (double sigma : {0.001, 0.01, 0.1, 1.0}) {
    Signal deg = ref;
    auto n = testing::white_noise(ref.size(), sigma, 9);
    for (std::size_t i = 0; i < deg.size(); ++i) deg.samples[i] += n.samples[i];
    EXPECT_NEAR(segmental_snr(ref, deg), testing::oracle_segmental_snr(ref.samples, deg.samples),
                1e-9);
  }
}

TEST(Metrics, TruncatesToShorterSignal) {
  auto ref = testing::synthetic_vowel(0.3, 180);
  Signal longer = ref;
  longer.samples.resize(ref.size() + 999, 0.5);
  EXPECT_EQ(segmental_snr(ref, longer), kSegSnrCeiling);
  EXPECT_EQ(log_spectral_distortion(longer, ref), 0.0);
  EXPECT_THROW(segmental_snr(ref, Signal{{}, 24000}), Error);
}

TEST(Metrics, LogSpectralDistortionMatchesNaiveDft) {
  auto ref = testing::synthetic_vowel(0.06, 150, 0.01);
  auto deg = testing::synthetic_vowel(0.06, 170, 0.02, 3);
  EXPECT_NEAR(log_spectral_distortion(ref, deg), oracle_lsd(ref.samples, deg.samples), 1e-8);
}

TEST(Metrics, GainChangeGivesConstantLsd) {
  auto ref = testing::white_noise(9600, 0.2, 5);
  Signal deg = ref;
  for (auto& v : deg.samples) v *= 2.0;
  EXPECT_NEAR(log_spectral_distortion(ref, deg), 20.0 * std::log10(2.0), 1e-9);
}

TEST(Metrics, PitchErrors) {
  auto a = testing::sine(100.0, 24000);
  auto b = testing::sine(110.0, 24000);
  auto pe = pitch_errors(a, b);
  EXPECT_NEAR(pe.f0_rmse, 10.0, 0.5);
  EXPECT_LE(pe.vuv_error, 0.02);
  Signal silent{std::vector<double>(24000, 0.0), 24000};
  auto ps = pitch_errors(a, silent);
  EXPECT_EQ(ps.f0_rmse, 0.0);
  EXPECT_GE(ps.vuv_error, 0.98);
}

TEST(Metrics, ReportTablesAndMeans) {
  MetricsReport r;
  r.seed = 42;
  r.rows.push_back({"excitnet", "a", 10.0, 2.0, 5.0, 0.1});
  r.rows.push_back({"excitnet", "b", 20.0, 4.0, 7.0, 0.3});
  r.rows.push_back({"wavenet_ns", "a", 5.0, 6.0, 9.0, 0.5});
  EXPECT_EQ(r.systems(), (std::vector<std::string>{"excitnet", "wavenet_ns"}));
  auto m = r.mean("excitnet");
  EXPECT_DOUBLE_EQ(m.segmental_snr, 15.0);
  EXPECT_DOUBLE_EQ(m.log_spectral_distortion, 3.0);
  EXPECT_DOUBLE_EQ(m.f0_rmse, 6.0);
  EXPECT_DOUBLE_EQ(m.vuv_error, 0.2);
  EXPECT_THROW(r.mean("nobody"), Error);

  const auto tsv = r.to_tsv();
  EXPECT_EQ(std::count(tsv.begin(), tsv.end(), '\n'), 6);
  EXPECT_NE(tsv.find("excitnet\tmean\t15.0000\t3.0000\t6.0000\t0.2000\n"), std::string::npos);
  const auto kv = r.to_key_values();
  EXPECT_NE(kv.find("seed=42\n"), std::string::npos);
  EXPECT_NE(kv.find("wavenet_ns.segmental_snr=5.0000\n"), std::string::npos);
}

// --- copy synthesis ------------------------------------------------------------

TEST(CopySynthesis, UnquantizedIsPerfectReconstruction) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto s = testing::white_noise(7200 + 37 * seed, 0.2, seed);
    auto y = copy_synthesis(s);
    auto seq = features::analyze(s);
    ASSERT_EQ(y.size(), seq.size() * seq.shift);
    EXPECT_LE(testing::relative_rms_error(aligned_to(s, seq).samples, y.samples), 1e-9);
  }
}

TEST(CopySynthesis, QuantizedVowelsAboveTwentyDb) {
  for (const auto& s : testing::synthetic_vowel_corpus()) {
    CopySynthesisOptions opt;
    opt.quantize = true;
    auto y = copy_synthesis(s, opt);
    EXPECT_GE(testing::oracle_segmental_snr(s.samples, y.samples), 20.0);
  }
}

TEST(CopySynthesis, NineBitBeatsEightBit) {
  // Segmental SNR saturates at its ceiling here, so compare the unclamped SNR.
  auto snr = [](const Signal& ref, const Signal& deg) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < deg.size(); ++i) {
      num += ref.samples[i] * ref.samples[i];
      den += (ref.samples[i] - deg.samples[i]) * (ref.samples[i] - deg.samples[i]);
    }
    return 10.0 * std::log10(num / den);
  };
  for (const auto& s : testing::synthetic_vowel_corpus()) {
    CopySynthesisOptions opt;
    opt.quantize = true;
    const double snr8 = snr(s, copy_synthesis(s, opt));
    opt.n_classes = 512;
    const double snr9 = snr(s, copy_synthesis(s, opt));
    EXPECT_GT(snr9, snr8 + 3.0);
  }
}

// --- dataset preparation ---------------------------------------------------------

TEST(Prepare, AlignmentAndScale) {
  const auto utts = vowel_utterances();
  for (auto kind : {VocoderKind::excitnet, VocoderKind::wavenet_ns}) {
    auto data = prepare_dataset(utts, kind);
    EXPECT_EQ(data.kind, kind);
    EXPECT_EQ(data.noise_filter.has_value(), kind == VocoderKind::wavenet_ns);
    EXPECT_EQ(data.scale, static_cast<double>(static_cast<float>(data.scale)));
    ASSERT_EQ(data.examples.size(), utts.size());
    double peak = 0.0;
    for (std::size_t i = 0; i < utts.size(); ++i) {
      const auto& ex = data.examples[i];
      const auto& seq = data.features[i];
      EXPECT_EQ(ex.id, utts[i].id);
      EXPECT_EQ(ex.codes.size(), seq.size() * seq.shift);
      EXPECT_EQ(ex.conditions.rows, ex.codes.size());
      EXPECT_EQ(ex.conditions.cols, features::kFeatureDim);
      const auto target = target_signal(aligned_to(utts[i].signal, seq), seq, kind,
                                        data.noise_filter ? &*data.noise_filter : nullptr);
      for (double v : target.samples) peak = std::max(peak, std::abs(v) * data.scale);
    }
    EXPECT_LE(peak, 0.99 + 1e-6);
    EXPECT_GE(peak, 0.99 - 1e-6);
  }
}

TEST(Prepare, StatsAreSinglePrecision) {
  auto data = prepare_dataset(vowel_utterances(), VocoderKind::excitnet);
  for (std::size_t d = 0; d < features::kFeatureDim; ++d) {
    EXPECT_EQ(data.stats.mean[d], static_cast<double>(static_cast<float>(data.stats.mean[d])));
    EXPECT_EQ(data.stats.std[d], static_cast<double>(static_cast<float>(data.stats.std[d])));
  }
  EXPECT_EQ(data.stats.mean[features::kVuvIndex], 0.0);
  EXPECT_EQ(data.stats.std[features::kVuvIndex], 1.0);
}

TEST(Prepare, DecodedTargetsReconstructSpeech) {
  const auto utts = vowel_utterances();
  for (auto kind : {VocoderKind::excitnet, VocoderKind::wavenet_ns}) {
    auto data = prepare_dataset(utts, kind);
    const dsp::MuLaw mulaw;
    for (std::size_t i = 0; i < utts.size(); ++i) {
      const auto& seq = data.features[i];
      Signal e{{}, 24000};
      for (int c : data.examples[i].codes) e.samples.push_back(mulaw.decode(c) / data.scale);
      const auto y = kind == VocoderKind::excitnet
                         ? dsp::lp_synthesis(e, features::lpc_track(seq), seq.shift)
                         : dsp::invert_noise_shaping(e, *data.noise_filter);
      EXPECT_GE(testing::oracle_segmental_snr(aligned_to(utts[i].signal, seq).samples, y.samples),
                20.0)
          << to_string(kind) << " " << utts[i].id;
    }
  }
}

TEST(Prepare, ReusedScaleThatClipsIsAnError) {
  const auto utts = vowel_utterances();
  auto data = prepare_dataset(utts, VocoderKind::excitnet);
  PrepareOptions opt;
  opt.scale = data.scale * 2.0;
  try {
    prepare_dataset(utts, VocoderKind::excitnet, opt);
    FAIL() << "clipping went unnoticed";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("clips"), std::string::npos);
  }
  opt.scale = data.scale * 0.5;
  EXPECT_NO_THROW(prepare_dataset(utts, VocoderKind::excitnet, opt));
}

TEST(Prepare, ProvidedStatsAndFilterAreUsed) {
  const auto utts = vowel_utterances();
  auto train = prepare_dataset(std::span(utts).first(2), VocoderKind::wavenet_ns);
  PrepareOptions opt;
  opt.stats = train.stats;
  opt.scale = train.scale * 0.5;
  opt.noise_filter = train.noise_filter;
  auto test = prepare_dataset(std::span(utts).subspan(2), VocoderKind::wavenet_ns, opt);
  EXPECT_EQ(test.stats, train.stats);
  EXPECT_EQ(test.noise_filter->lpc.a, train.noise_filter->lpc.a);
  EXPECT_EQ(test.scale, static_cast<double>(static_cast<float>(train.scale * 0.5)));
}

TEST(Prepare, Errors) {
  EXPECT_THROW(prepare_dataset({}, VocoderKind::excitnet), Error);
  std::vector<Utterance> bad{{"x", Signal{{}, 24000}}};
  EXPECT_THROW(prepare_dataset(bad, VocoderKind::excitnet), Error);
  std::vector<Utterance> rate{{"y", testing::white_noise(4800, 0.1, 1, 16000)}};
  EXPECT_THROW(prepare_dataset(rate, VocoderKind::excitnet), Error);
}

TEST(DatasetFile, RoundTrip) {
  for (auto kind : {VocoderKind::excitnet, VocoderKind::wavenet_ns}) {
    auto data = prepare_dataset(vowel_utterances(), kind);
    const auto path = temp_path("data.exnd");
    save_dataset(path, data);
    auto back = load_dataset(path);
    EXPECT_EQ(back.kind, data.kind);
    EXPECT_EQ(back.scale, data.scale);
    EXPECT_EQ(back.stats, data.stats);
    EXPECT_EQ(back.features, data.features);
    if (data.noise_filter) {
      EXPECT_EQ(back.noise_filter->lpc.a, data.noise_filter->lpc.a);
    }
    ASSERT_EQ(back.examples.size(), data.examples.size());
    for (std::size_t i = 0; i < data.examples.size(); ++i) {
      EXPECT_EQ(back.examples[i].id, data.examples[i].id);
      EXPECT_EQ(back.examples[i].codes, data.examples[i].codes);
      EXPECT_EQ(back.examples[i].conditions, data.examples[i].conditions);
    }
    std::filesystem::remove(path);
  }
}

TEST(DatasetFile, CorruptionDetected) {
  auto data = prepare_dataset(first_utterances(1), VocoderKind::excitnet);
  const auto path = temp_path("corrupt.exnd");
  save_dataset(path, data);
  auto bytes = io::read_file(path);
  bytes[bytes.size() / 2] ^= 0x10;
  io::write_file_atomic(path, bytes);
  EXPECT_THROW(load_dataset(path), Error);
  io::write_file_atomic(path, bytes.substr(0, bytes.size() / 3));
  EXPECT_THROW(load_dataset(path), Error);
  std::filesystem::remove(path);
}

// --- training and synthesis --------------------------------------------------------

TrainConfig tiny_training(std::size_t steps) {
  TrainConfig cfg;
  cfg.net = testing::tiny_config(3);
  cfg.steps = steps;
  cfg.batch_samples = 600;
  cfg.seed = 5;
  return cfg;
}

TEST(VocoderTrain, DeterministicAndLogsEveryStep) {
  auto data = prepare_dataset(first_utterances(2), VocoderKind::excitnet);
  std::vector<double> losses;
  auto cfg = tiny_training(6);
  cfg.on_step = [&](std::size_t step, double loss) {
    EXPECT_EQ(step, losses.size() + 1);
    losses.push_back(loss);
  };
  auto a = train_vocoder(data, cfg);
  cfg.on_step = nullptr;
  auto b = train_vocoder(data, cfg);
  EXPECT_EQ(losses.size(), 6u);
  EXPECT_EQ(a.step, 6u);
  EXPECT_EQ(net::serialize_checkpoint(a), net::serialize_checkpoint(b));
  EXPECT_NEAR(losses.front(), std::log(256.0), 0.02 * std::log(256.0));

  auto meta = read_metadata(a);
  EXPECT_EQ(meta.kind, VocoderKind::excitnet);
  EXPECT_EQ(meta.scale, data.scale);
  EXPECT_EQ(meta.stats, data.stats);
  EXPECT_FALSE(meta.noise_filter.has_value());
}

TEST(VocoderTrain, PeriodicCheckpoints) {
  auto data = prepare_dataset(first_utterances(1), VocoderKind::wavenet_ns);
  auto cfg = tiny_training(5);
  cfg.checkpoint_every = 2;
  cfg.checkpoint_path = temp_path("periodic.exnm");
  std::filesystem::remove(cfg.checkpoint_path);
  train_vocoder(data, cfg);
  auto saved = net::load_checkpoint(cfg.checkpoint_path);
  EXPECT_EQ(saved.step, 4u);
  auto meta = read_metadata(saved);
  EXPECT_EQ(meta.kind, VocoderKind::wavenet_ns);
  ASSERT_TRUE(meta.noise_filter.has_value());
  EXPECT_EQ(meta.noise_filter->lpc.a, data.noise_filter->lpc.a);
  std::filesystem::remove(cfg.checkpoint_path);
}

TEST(VocoderTrain, EvaluationHookCanStopEarly) {
  auto data = prepare_dataset(first_utterances(1), VocoderKind::excitnet);
  auto cfg = tiny_training(10);
  cfg.eval_every = 3;
  std::vector<std::uint64_t> seen;
  cfg.on_eval = [&](const net::Checkpoint& ckpt) {
    seen.push_back(ckpt.step);
    return ckpt.step >= 6;
  };
  const auto ckpt = train_vocoder(data, cfg);
  EXPECT_EQ(seen, (std::vector<std::uint64_t>{3, 6}));
  EXPECT_EQ(ckpt.step, 6u);
}

TEST(VocoderTrain, DivergenceKeepsLastCheckpoint) {
  auto data = prepare_dataset(first_utterances(1), VocoderKind::excitnet);
  auto cfg = tiny_training(40);
  cfg.learning_rate = 1e30;
  cfg.checkpoint_every = 1;
  cfg.checkpoint_path = temp_path("diverge.exnm");
  std::filesystem::remove(cfg.checkpoint_path);
  try {
    train_vocoder(data, cfg);
    FAIL() << "training with lr 1e30 did not diverge";
  } catch (const Error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("training diverged"), std::string::npos) << msg;
    EXPECT_NE(msg.find("last checkpoint"), std::string::npos) << msg;
  }
  auto saved = net::load_checkpoint(cfg.checkpoint_path);
  EXPECT_TRUE(saved.params.all_finite());
  std::filesystem::remove(cfg.checkpoint_path);
}

TEST(VocoderTrain, RejectsBadConfigs) {
  auto data = prepare_dataset(first_utterances(1), VocoderKind::excitnet);
  auto cfg = tiny_training(1);
  cfg.net.cond_dim = 10;
  EXPECT_THROW(train_vocoder(data, cfg), Error);
  EXPECT_THROW(train_vocoder(PreparedDataset{}, tiny_training(1)), Error);
}

TEST(VocoderSynthesize, LengthAndKindContract) {
  const auto utts = vowel_utterances();
  auto data = prepare_dataset(std::span(utts).first(1), VocoderKind::excitnet);
  auto ckpt = train_vocoder(data, tiny_training(1));
  auto seq = features::analyze(utts[1].signal);
  auto y = synthesize(ckpt, seq, VocoderKind::excitnet, net::SamplingMode::sample(3));
  EXPECT_EQ(y.size(), seq.size() * seq.shift);
  EXPECT_EQ(y.sample_rate, 24000);
  for (double v : y.samples) ASSERT_TRUE(std::isfinite(v));
  EXPECT_EQ(synthesize(ckpt, seq, VocoderKind::excitnet, net::SamplingMode::sample(3)).samples,
            y.samples);
  try {
    synthesize(ckpt, seq, VocoderKind::wavenet_ns, net::SamplingMode::argmax());
    FAIL() << "kind mismatch accepted";
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "vocoder kind mismatch");
  }
}

TEST(VocoderSynthesize, MissingMetadataIsAnError) {
  net::Checkpoint bare;
  bare.params = net::init_network<float>(testing::tiny_config());
  auto seq = features::analyze(testing::synthetic_vowel(0.1, 120));
  EXPECT_THROW(synthesize(bare, seq, VocoderKind::excitnet, net::SamplingMode::argmax()), Error);
  bare.attributes[std::string(kKindAttribute)] = "excitnet";
  EXPECT_THROW(synthesize(bare, seq, VocoderKind::excitnet, net::SamplingMode::argmax()), Error);
}

TEST(VocoderSynthesize, SilentModelOnSilenceIsQuiet) {
  // A network whose output bias favours the code just above zero amplitude.
  const auto utts = vowel_utterances();
  auto data = prepare_dataset(std::span(utts).first(1), VocoderKind::excitnet);
  net::Checkpoint ckpt;
  ckpt.params = net::NetParams<float>::zeros(testing::tiny_config());
  ckpt.params.out2_b.data[128] = 10.0f;
  attach_metadata(ckpt, data);

  Signal silence{std::vector<double>(12000, 0.0), 24000};
  auto seq = features::analyze(silence);
  auto y = synthesize(ckpt, seq, VocoderKind::excitnet, net::SamplingMode::argmax());
  EXPECT_LT(20.0 * std::log10(rms(y.samples)), -40.0);
}

TEST(Kind, Names) {
  EXPECT_EQ(parse_kind("excitnet"), VocoderKind::excitnet);
  EXPECT_EQ(parse_kind("wavenet_ns"), VocoderKind::wavenet_ns);
  EXPECT_EQ(to_string(VocoderKind::wavenet_ns), "wavenet_ns");
  EXPECT_THROW(parse_kind("wavenet"), Error);
}

}  // namespace
}  // namespace excitnet::vocoder
