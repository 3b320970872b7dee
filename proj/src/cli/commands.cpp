#include "commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <sstream>

#include "excitnet/binary_io.hpp"
#include "excitnet/features.hpp"
#include "excitnet/net/kernels.hpp"
#include "excitnet/vocoder/metrics.hpp"
#include "excitnet/vocoder/vocoder.hpp"
#include "excitnet/vocoder/wav.hpp"
#include "run_config.hpp"

namespace excitnet::cli {
namespace fs = std::filesystem;
namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
};

RunConfig resolve(const Common& common, std::optional<std::string> kind) {
  RunConfig cfg = common.config_path.empty() ? RunConfig{} : load_run_config(common.config_path);
  if (common.seed) cfg.seed = *common.seed;
  if (kind) cfg.kind = vocoder::parse_kind(*kind);
  cfg.validate();
  return cfg;
}

void print_config(std::ostream& err, std::string_view command, const RunConfig& cfg, int jobs) {
  err << "# excitnet " << command << " (seed " << cfg.seed << ", jobs " << jobs << ")\n";
  std::istringstream lines(cfg.to_text());
  for (std::string line; std::getline(lines, line);) err << "#   " << line << '\n';
}

/// Runs body(i) for i in [0, n) on up to `jobs` threads. Results must be written
/// to per-index slots; the first failing index (in order) is rethrown.
template <typename Body>
void parallel_for(std::size_t n, int jobs, Body body) {
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic) num_threads(std::max(jobs, 1))
  for (std::size_t i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

Signal load_input(const fs::path& path, const RunConfig& cfg, bool resample) {
  auto s = vocoder::read_wav(path);
  if (s.sample_rate == cfg.analysis.sample_rate) return s;
  if (!resample)
    throw Error(path.string() + ": sample rate " + std::to_string(s.sample_rate) +
                " Hz does not match the configured " + std::to_string(cfg.analysis.sample_rate) +
                " Hz (pass --resample to convert)");
  return vocoder::resample_linear(s, cfg.analysis.sample_rate);
}

/// Files given directly are kept in order; directories contribute their files
/// with the given extension in name order.
std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs, std::string_view ext) {
  std::vector<fs::path> out;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::directory_iterator(in))
        if (entry.is_regular_file() && entry.path().extension() == ext) found.push_back(entry.path());
      std::sort(found.begin(), found.end());
      if (found.empty()) throw Error(in + ": no " + std::string(ext) + " files");
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.emplace_back(in);
    }
  }
  return out;
}

/// Output path for input i: `out` itself for a single input with the expected
/// extension, otherwise out/<stem><ext>.
std::vector<fs::path> output_paths(const std::vector<fs::path>& inputs, const fs::path& out,
                                   std::string_view ext) {
  if (inputs.size() == 1 && out.extension() == ext) return {out};
  fs::create_directories(out);
  std::vector<fs::path> paths;
  for (const auto& in : inputs) {
    auto p = out / in.stem();
    p += ext;
    if (std::find(paths.begin(), paths.end(), p) != paths.end())
      throw Error("two inputs map to the same output " + p.string());
    paths.push_back(p);
  }
  return paths;
}

int cmd_analyze(const Common& common, const std::vector<std::string>& inputs, const fs::path& out,
                bool resample, std::ostream& err) {
  const auto cfg = resolve(common, std::nullopt);
  print_config(err, "analyze", cfg, common.jobs);
  const auto files = expand_inputs(inputs, ".wav");
  const auto outputs = output_paths(files, out, ".exnf");
  std::vector<std::size_t> frames(files.size());
  parallel_for(files.size(), common.jobs, [&](std::size_t i) {
    try {
      const auto seq = features::analyze(load_input(files[i], cfg, resample), cfg.analysis);
      features::write_features(outputs[i], seq);
      frames[i] = seq.size();
    } catch (const Error& e) {
      const std::string msg = e.what();
      if (msg.starts_with(files[i].string())) throw;
      throw Error(files[i].string() + ": " + msg);
    }
  });
  for (std::size_t i = 0; i < files.size(); ++i)
    err << outputs[i].string() << ": " << frames[i] << " frames\n";
  return 0;
}

int cmd_prepare(const Common& common, const std::vector<std::string>& inputs, const fs::path& out,
                std::optional<std::string> kind, const std::string& stats_path, bool resample,
                std::ostream& err) {
  const auto cfg = resolve(common, kind);
  print_config(err, "prepare", cfg, common.jobs);
  const auto files = expand_inputs(inputs, ".wav");
  std::vector<vocoder::Utterance> utts(files.size());
  parallel_for(files.size(), common.jobs, [&](std::size_t i) {
    utts[i] = {files[i].stem().string(), load_input(files[i], cfg, resample)};
  });
  for (std::size_t i = 1; i < utts.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (utts[i].id == utts[j].id) throw Error("duplicate utterance id '" + utts[i].id + "'");

  vocoder::PrepareOptions opts;
  opts.analysis = cfg.analysis;
  if (!stats_path.empty()) opts.stats = features::read_stats(stats_path);
  const auto data = vocoder::prepare_dataset(utts, cfg.kind, opts);

  fs::create_directories(out / "features");
  std::ostringstream manifest;
  manifest << "id\tsource\tframes\tsamples\n";
  for (std::size_t i = 0; i < utts.size(); ++i) {
    features::write_features(out / "features" / (utts[i].id + ".exnf"), data.features[i]);
    manifest << utts[i].id << '\t' << files[i].string() << '\t' << data.features[i].size() << '\t'
             << data.examples[i].codes.size() << '\n';
  }
  features::write_stats(out / "stats.exns", data.stats);
  io::write_file_atomic(out / "manifest.tsv", manifest.str());
  vocoder::save_dataset(out / "dataset.exnd", data);
  err << "prepared " << utts.size() << " utterances (" << vocoder::to_string(cfg.kind)
      << ", scale " << data.scale << ") in " << out.string() << '\n';
  return 0;
}

int cmd_train(const Common& common, const fs::path& dataset, const fs::path& out, int log_every,
              std::ostream& err) {
  const auto cfg = resolve(common, std::nullopt);
  print_config(err, "train", cfg, common.jobs);
  const auto data_file = fs::is_directory(dataset) ? dataset / "dataset.exnd" : dataset;
  const auto data = vocoder::load_dataset(data_file);
  err << "# dataset " << data_file.string() << ": " << data.examples.size() << " utterances, kind "
      << vocoder::to_string(data.kind) << '\n';

  auto tc = cfg.train_config();
  tc.checkpoint_path = out;
  tc.on_step = [&](std::size_t step, double loss) {
    if (log_every > 0 && (step % static_cast<std::size_t>(log_every) == 0 || step == 1)) {
      char line[64];
      std::snprintf(line, sizeof line, "step %zu loss %.6f\n", step, loss);
      err << line << std::flush;
    }
  };
  const auto ckpt = vocoder::train_vocoder(data, tc);
  net::save_checkpoint(ckpt, out);
  err << "saved " << out.string() << " at step " << ckpt.step << '\n';
  return 0;
}

int cmd_synth(const Common& common, const fs::path& checkpoint, const std::vector<std::string>& inputs,
              const fs::path& out, std::optional<std::string> kind, std::optional<std::string> sampling,
              std::ostream& err) {
  auto cfg = resolve(common, kind);
  if (sampling) {
    if (*sampling != "argmax" && *sampling != "sample")
      throw Error("--sampling must be argmax or sample");
    cfg.sample = *sampling == "sample";
  }
  print_config(err, "synth", cfg, common.jobs);
  const auto ckpt = net::load_checkpoint(checkpoint);
  const auto files = expand_inputs(inputs, ".exnf");
  const auto outputs = output_paths(files, out, ".wav");
  parallel_for(files.size(), common.jobs, [&](std::size_t i) {
    const auto seq = features::read_features(files[i]);
    vocoder::write_wav(outputs[i], vocoder::synthesize(ckpt, seq, cfg.kind, cfg.sampling_mode()));
  });
  for (const auto& p : outputs) err << "wrote " << p.string() << '\n';
  return 0;
}

int cmd_copysynth(const Common& common, const fs::path& input, const fs::path& out, bool quantize,
                  bool resample, std::ostream& err) {
  const auto cfg = resolve(common, std::nullopt);
  print_config(err, "copysynth", cfg, common.jobs);
  vocoder::CopySynthesisOptions opts;
  opts.analysis = cfg.analysis;
  opts.quantize = quantize;
  vocoder::write_wav(out, vocoder::copy_synthesis(load_input(input, cfg, resample), opts));
  err << "wrote " << out.string() << (quantize ? " (mu-law quantized)" : "") << '\n';
  return 0;
}

struct Pair {
  fs::path ref, deg;
  std::string system, utterance;
};

std::vector<Pair> eval_pairs(const fs::path& ref, const std::vector<std::string>& degs) {
  std::vector<Pair> pairs;
  const bool ref_dir = fs::is_directory(ref);
  const auto refs = ref_dir ? expand_inputs({ref.string()}, ".wav") : std::vector<fs::path>{ref};
  for (const auto& arg : degs) {
    const auto eq = arg.find('=');
    const fs::path deg = eq == std::string::npos ? fs::path(arg) : fs::path(arg.substr(eq + 1));
    std::string system = eq == std::string::npos ? std::string() : arg.substr(0, eq);
    if (system.empty()) system = (fs::is_directory(deg) ? deg.filename() : deg.stem()).string();
    if (system.empty()) system = "system";
    if (ref_dir != fs::is_directory(deg))
      throw Error(deg.string() + ": reference and degraded inputs must both be files or both directories");
    for (const auto& r : refs) {
      const auto d = ref_dir ? deg / r.filename() : deg;
      if (!fs::exists(d)) throw Error(d.string() + ": missing degraded file for " + r.string());
      pairs.push_back({r, d, system, r.stem().string()});
    }
  }
  return pairs;
}

int cmd_eval(const Common& common, const fs::path& ref, const std::vector<std::string>& degs,
             const std::string& out, std::ostream& stdout_, std::ostream& err) {
  const auto cfg = resolve(common, std::nullopt);
  print_config(err, "eval", cfg, common.jobs);
  const auto pairs = eval_pairs(ref, degs);
  vocoder::MetricsReport report;
  report.seed = cfg.seed;
  report.rows.resize(pairs.size());
  parallel_for(pairs.size(), common.jobs, [&](std::size_t i) {
    const auto r = vocoder::read_wav(pairs[i].ref);
    const auto d = vocoder::read_wav(pairs[i].deg);
    if (r.sample_rate != d.sample_rate)
      throw Error(pairs[i].deg.string() + ": sample rate differs from " + pairs[i].ref.string());
    report.rows[i] = vocoder::evaluate_pair(r, d, pairs[i].system, pairs[i].utterance);
  });
  stdout_ << report.to_tsv();
  if (!out.empty()) io::write_file_atomic(out, report.to_key_values());
  return 0;
}

std::string single_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"ExcitNet and noise-shaped WaveNet vocoder toolkit", "excitnet"};
  app.require_subcommand(1);
  app.fallthrough();

  Common common;
  auto add_common = [&common](CLI::App* a) {
    a->add_option("--config", common.config_path, "Run configuration file (key = value)")
        ->check(CLI::ExistingFile);
    a->add_option("--seed", common.seed, "Top-level seed (overrides the config)");
    a->add_option("--jobs", common.jobs, "Worker threads")->check(CLI::Range(1, 1024));
  };
  add_common(&app);

  std::vector<std::string> inputs;
  std::string out_path, stats_path, dataset, checkpoint, ref;
  std::optional<std::string> kind, sampling;
  bool resample = false, quantize = false;
  int log_every = 1;

  auto* analyze = app.add_subcommand("analyze", "Extract 79-dim acoustic features (EXNF)");
  analyze->add_option("inputs", inputs, "WAV files or directories")->required();
  analyze->add_option("--out", out_path, "EXNF file (single input) or directory")->required();
  analyze->add_flag("--resample", resample, "Resample inputs to the configured rate");

  auto* prepare = app.add_subcommand("prepare", "Build a training dataset (EXND) with stats and features");
  prepare->add_option("inputs", inputs, "WAV files or directories")->required();
  prepare->add_option("--out", out_path, "Output directory")->required();
  prepare->add_option("--kind", kind, "excitnet or wavenet_ns (overrides the config)");
  prepare->add_option("--stats", stats_path, "Reuse training-split statistics (EXNS)")
      ->check(CLI::ExistingFile);
  prepare->add_flag("--resample", resample, "Resample inputs to the configured rate");

  auto* train = app.add_subcommand("train", "Train a vocoder on a prepared dataset");
  train->add_option("dataset", dataset, "dataset.exnd or a prepare output directory")->required();
  train->add_option("--out", out_path, "Checkpoint (EXNM)")->required();
  train->add_option("--log-every", log_every, "Loss log interval in steps (0 silences it)")
      ->check(CLI::NonNegativeNumber);

  auto* synth = app.add_subcommand("synth", "Generate speech from features with a trained checkpoint");
  synth->add_option("checkpoint", checkpoint, "Checkpoint (EXNM)")->required()->check(CLI::ExistingFile);
  synth->add_option("features", inputs, "EXNF files or directories")->required();
  synth->add_option("--out", out_path, "WAV file (single input) or directory")->required();
  synth->add_option("--kind", kind, "excitnet or wavenet_ns (overrides the config)");
  synth->add_option("--sampling", sampling, "argmax or sample (overrides the config)");

  auto* copysynth = app.add_subcommand("copysynth", "LP analysis-synthesis without a network");
  copysynth->add_option("input", ref, "Input WAV")->required()->check(CLI::ExistingFile);
  copysynth->add_option("--out", out_path, "Output WAV")->required();
  copysynth->add_flag("--quantize", quantize, "Round-trip the residual through 8-bit mu-law");
  copysynth->add_flag("--resample", resample, "Resample the input to the configured rate");

  auto* eval = app.add_subcommand("eval", "Objective metrics of degraded against reference speech");
  eval->add_option("reference", ref, "Reference WAV or directory")->required()->check(CLI::ExistingPath);
  eval->add_option("degraded", inputs, "[system=]WAV or directory, one per system")->required();
  eval->add_option("--out", out_path, "Also write the key=value summary here");

  for (auto* sub : app.get_subcommands({})) add_common(sub);

  std::vector<std::string> reversed(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(reversed.begin(), reversed.end());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    net::kernels::set_num_threads(common.jobs);
    if (*analyze) return cmd_analyze(common, inputs, out_path, resample, err);
    if (*prepare) return cmd_prepare(common, inputs, out_path, kind, stats_path, resample, err);
    if (*train) return cmd_train(common, dataset, out_path, log_every, err);
    if (*synth) return cmd_synth(common, checkpoint, inputs, out_path, kind, sampling, err);
    if (*copysynth) return cmd_copysynth(common, ref, out_path, quantize, resample, err);
    if (*eval) return cmd_eval(common, ref, inputs, out_path, out, err);
  } catch (const std::exception& e) {
    err << "error: " << single_line(e.what()) << '\n';
    return 1;
  }
  return 1;
}

}  // namespace excitnet::cli
