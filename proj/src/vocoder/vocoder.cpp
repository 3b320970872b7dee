#include "excitnet/vocoder/vocoder.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "excitnet/log.hpp"
#include "excitnet/net/train.hpp"

namespace excitnet::vocoder {
namespace {

constexpr double kTargetPeak = 0.99;

double round_to_float(double v) { return static_cast<double>(static_cast<float>(v)); }

features::FeatureStats rounded(features::FeatureStats st) {
  for (auto& m : st.mean) m = round_to_float(m);
  for (auto& s : st.std) s = round_to_float(s);
  return st;
}

dsp::NoiseShapingFilter rounded(dsp::NoiseShapingFilter f) {
  for (auto& a : f.lpc.a) a = round_to_float(a);
  if (!dsp::is_minimum_phase(f.lpc))
    throw Error("noise-shaping filter is not minimum phase at single precision");
  return f;
}

double peak(const std::vector<double>& x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

net::Tensor<float> vector_tensor(std::string_view name, const std::vector<float>& values) {
  net::Tensor<float> t(std::string(name), {static_cast<std::uint32_t>(values.size())});
  t.data = values;
  return t;
}

const net::Tensor<float>& require_aux(const net::Checkpoint& ckpt, std::string_view name,
                                      std::size_t size) {
  const auto* t = ckpt.find_aux(std::string(name));
  if (t == nullptr) throw Error("checkpoint has no '" + std::string(name) + "' tensor");
  if (t->size() != size)
    throw Error("checkpoint tensor '" + std::string(name) + "' has " +
                std::to_string(t->size()) + " values, expected " + std::to_string(size));
  return *t;
}

}  // namespace

std::string_view to_string(VocoderKind kind) {
  return kind == VocoderKind::excitnet ? "excitnet" : "wavenet_ns";
}

VocoderKind parse_kind(std::string_view name) {
  if (name == "excitnet") return VocoderKind::excitnet;
  if (name == "wavenet_ns") return VocoderKind::wavenet_ns;
  throw Error("unknown vocoder kind '" + std::string(name) + "' (expected excitnet or wavenet_ns)");
}

Signal target_signal(const Signal& aligned_speech, const features::AcousticFeatureSequence& seq,
                     VocoderKind kind, const dsp::NoiseShapingFilter* noise_filter) {
  if (aligned_speech.size() != seq.size() * seq.shift)
    throw Error("speech is not aligned to the feature frames");
  if (kind == VocoderKind::excitnet)
    return dsp::lp_analysis(aligned_speech, features::lpc_track(seq), seq.shift);
  if (noise_filter == nullptr) throw Error("wavenet_ns targets need a noise-shaping filter");
  return dsp::apply_noise_shaping(aligned_speech, *noise_filter);
}

Matrix<float> make_conditions(const features::AcousticFeatureSequence& seq,
                              const features::FeatureStats& stats) {
  return features::upsample_features(features::normalize(seq, stats), seq.shift);
}

PreparedDataset prepare_dataset(std::span<const Utterance> utterances, VocoderKind kind,
                                const PrepareOptions& options) {
  if (utterances.empty()) throw Error("empty dataset");
  const auto& cfg = options.analysis;

  PreparedDataset data;
  data.kind = kind;
  data.features.resize(utterances.size());
  std::vector<Signal> aligned(utterances.size());
  for (std::size_t i = 0; i < utterances.size(); ++i) {
    const auto& u = utterances[i];
    try {
      data.features[i] = features::analyze(u.signal, cfg);
    } catch (const Error& e) {
      throw Error(u.id + ": " + e.what());
    }
    aligned[i] = features::align_to_frames(u.signal, data.features[i].size(), data.features[i].shift);
  }

  data.stats = rounded(options.stats ? *options.stats : features::compute_stats(data.features));

  if (kind == VocoderKind::wavenet_ns) {
    if (options.noise_filter) {
      data.noise_filter = rounded(*options.noise_filter);
    } else {
      std::vector<Signal> corpus;
      corpus.reserve(utterances.size());
      for (const auto& u : utterances) corpus.push_back(u.signal);
      data.noise_filter =
          rounded(dsp::derive_noise_shaping_filter(corpus, cfg.grid(), cfg.lpc_order));
    }
  }

  std::vector<Signal> targets(utterances.size());
  double corpus_peak = 0.0;
  for (std::size_t i = 0; i < utterances.size(); ++i) {
    targets[i] = target_signal(aligned[i], data.features[i], kind,
                               data.noise_filter ? &*data.noise_filter : nullptr);
    corpus_peak = std::max(corpus_peak, peak(targets[i].samples));
  }
  if (options.scale) {
    data.scale = round_to_float(*options.scale);
  } else {
    if (!(corpus_peak > 0.0)) throw Error("all training targets are silent");
    data.scale = round_to_float(kTargetPeak / corpus_peak);
  }
  if (!(data.scale > 0.0) || !std::isfinite(data.scale)) throw Error("invalid target scale");

  const dsp::MuLaw mulaw(255.0, 256);
  data.examples.resize(utterances.size());
  for (std::size_t i = 0; i < utterances.size(); ++i) {
    auto& ex = data.examples[i];
    ex.id = utterances[i].id;
    ex.scale = data.scale;
    const double p = peak(targets[i].samples) * data.scale;
    if (p > 1.0) {
      std::ostringstream msg;
      msg << ex.id << ": target clips after scaling (peak " << p
          << "); recompute the scale on this data";
      throw Error(msg.str());
    }
    ex.codes.resize(targets[i].size());
    for (std::size_t t = 0; t < ex.codes.size(); ++t)
      ex.codes[t] = mulaw.encode(targets[i].samples[t] * data.scale);
    ex.conditions = make_conditions(data.features[i], data.stats);
  }
  return data;
}

void attach_metadata(net::Checkpoint& ckpt, const PreparedDataset& data) {
  ckpt.attributes[std::string(kKindAttribute)] = std::string(to_string(data.kind));
  std::erase_if(ckpt.aux, [](const net::Tensor<float>& t) { return t.name.starts_with("vocoder."); });
  ckpt.aux.push_back(vector_tensor(kScaleTensor, {static_cast<float>(data.scale)}));
  ckpt.aux.push_back(vector_tensor(
      kStatsMeanTensor, std::vector<float>(data.stats.mean.begin(), data.stats.mean.end())));
  ckpt.aux.push_back(vector_tensor(
      kStatsStdTensor, std::vector<float>(data.stats.std.begin(), data.stats.std.end())));
  if (data.noise_filter)
    ckpt.aux.push_back(vector_tensor(
        kNoiseLpcTensor,
        std::vector<float>(data.noise_filter->lpc.a.begin(), data.noise_filter->lpc.a.end())));
}

VocoderMetadata read_metadata(const net::Checkpoint& ckpt) {
  const auto it = ckpt.attributes.find(std::string(kKindAttribute));
  if (it == ckpt.attributes.end()) throw Error("checkpoint does not record a vocoder kind");
  VocoderMetadata meta{parse_kind(it->second), 0.0, {}, std::nullopt};
  meta.scale = require_aux(ckpt, kScaleTensor, 1).data[0];
  const auto& mean = require_aux(ckpt, kStatsMeanTensor, features::kFeatureDim);
  const auto& sd = require_aux(ckpt, kStatsStdTensor, features::kFeatureDim);
  for (std::size_t d = 0; d < features::kFeatureDim; ++d) {
    meta.stats.mean[d] = mean.data[d];
    meta.stats.std[d] = sd.data[d];
  }
  if (meta.kind == VocoderKind::wavenet_ns) {
    const auto* lpc = ckpt.find_aux(std::string(kNoiseLpcTensor));
    if (lpc == nullptr) throw Error("wavenet_ns checkpoint has no noise-shaping filter");
    dsp::NoiseShapingFilter f;
    f.lpc.a.assign(lpc->data.begin(), lpc->data.end());
    meta.noise_filter = f;
  }
  return meta;
}

net::Checkpoint train_vocoder(const PreparedDataset& data, const TrainConfig& config) {
  if (data.examples.empty()) throw Error("empty dataset");
  config.net.validate();
  if (config.net.cond_dim != features::kFeatureDim)
    throw Error("network condition width must be " + std::to_string(features::kFeatureDim));
  if (config.net.n_classes != 256) throw Error("vocoder targets use 256 mu-law classes");

  std::vector<std::size_t> lengths;
  for (const auto& ex : data.examples) {
    if (ex.codes.empty()) throw Error(ex.id + ": empty example");
    if (ex.conditions.rows != ex.codes.size()) throw Error(ex.id + ": conditions misaligned");
    lengths.push_back(ex.codes.size());
  }

  net::Checkpoint ckpt;
  ckpt.params = net::init_network<float>(config.net);
  ckpt.adam = net::AdamState<float>::zeros(config.net);
  attach_metadata(ckpt, data);

  net::AdamConfig adam;
  adam.learning_rate = config.learning_rate;
  net::WindowSampler sampler(std::move(lengths), config.batch_samples, config.seed);
  const std::size_t rf = net::receptive_field(config.net);
  std::size_t last_saved = 0;
  net::TrainWorkspace<float> work;

  for (std::size_t step = 1; step <= config.steps; ++step) {
    const auto pick = sampler.next();
    const auto& ex = data.examples[pick.utterance];
    const auto batch = net::make_window<float>(ex.codes, ex.conditions, pick.start, pick.length, rf);
    double loss = 0.0;
    try {
      loss = net::train_step(ckpt.params, *ckpt.adam, batch, adam, work);
    } catch (const Error& e) {
      std::string where = last_saved > 0 ? "; last checkpoint (step " + std::to_string(last_saved) +
                                               ") kept at " + config.checkpoint_path.string()
                                         : "; no checkpoint was saved";
      throw Error(std::string(e.what()) + " at step " + std::to_string(step) + where);
    }
    ckpt.step = step;
    if (config.on_step) config.on_step(step, loss);
    if (config.checkpoint_every > 0 && step % config.checkpoint_every == 0 &&
        !config.checkpoint_path.empty()) {
      net::save_checkpoint(ckpt, config.checkpoint_path);
      last_saved = step;
      log::info("saved checkpoint at step " + std::to_string(step));
    }
    if (config.on_eval && config.eval_every > 0 && step % config.eval_every == 0 &&
        config.on_eval(ckpt))
      break;
  }
  return ckpt;
}

Signal synthesize(const net::Checkpoint& ckpt, const features::AcousticFeatureSequence& seq,
                  VocoderKind kind, const net::SamplingMode& mode) {
  const auto meta = read_metadata(ckpt);
  if (meta.kind != kind) throw Error("vocoder kind mismatch");
  if (seq.size() == 0) throw Error("empty feature sequence");
  if (ckpt.config().cond_dim != features::kFeatureDim)
    throw Error("checkpoint condition width does not match the 79-dim features");

  const auto conditions = make_conditions(seq, meta.stats);
  const auto gen = net::generate_fast(ckpt.params, conditions, mode);
  const dsp::MuLaw mulaw(255.0, static_cast<int>(ckpt.config().n_classes));
  Signal excitation;
  excitation.sample_rate = seq.sample_rate;
  excitation.samples.resize(gen.codes.size());
  for (std::size_t t = 0; t < gen.codes.size(); ++t)
    excitation.samples[t] = mulaw.decode(gen.codes[t]) / meta.scale;

  if (kind == VocoderKind::excitnet)
    return dsp::lp_synthesis(excitation, features::lpc_track(seq), seq.shift);
  return dsp::invert_noise_shaping(excitation, *meta.noise_filter);
}

Signal copy_synthesis(const Signal& signal, const CopySynthesisOptions& options) {
  const auto seq = features::analyze(signal, options.analysis);
  const auto track = features::lpc_track(seq);
  const auto aligned = features::align_to_frames(signal, seq.size(), seq.shift);
  auto e = dsp::lp_analysis(aligned, track, seq.shift);
  if (options.quantize) {
    const double p = peak(e.samples);
    if (p > 0.0) {
      const double scale = kTargetPeak / p;
      const dsp::MuLaw mulaw(options.n_classes - 1.0, options.n_classes);
      for (auto& v : e.samples) v = mulaw.decode(mulaw.encode(v * scale)) / scale;
    }
  }
  return dsp::lp_synthesis(e, track, seq.shift);
}

}  // namespace excitnet::vocoder
