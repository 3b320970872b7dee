#include "run_config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

#include "excitnet/binary_io.hpp"

namespace excitnet::cli {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_unsigned(std::string_view key, std::string_view v) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw Error("'" + std::string(key) + "' expects a non-negative integer, got '" + std::string(v) + "'");
  return out;
}

double parse_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out))
    throw Error("'" + std::string(key) + "' expects a number, got '" + std::string(v) + "'");
  return out;
}

using Setter = std::function<void(RunConfig&, std::string_view, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"sample_rate",
       [](RunConfig& c, auto k, auto v) { c.analysis.sample_rate = parse_unsigned<int>(k, v); }},
      {"frame_len_ms", [](RunConfig& c, auto k, auto v) { c.analysis.frame_ms = parse_double(k, v); }},
      {"shift_ms", [](RunConfig& c, auto k, auto v) { c.analysis.shift_ms = parse_double(k, v); }},
      {"lpc_order",
       [](RunConfig& c, auto k, auto v) { c.analysis.lpc_order = parse_unsigned<std::size_t>(k, v); }},
      {"f0_min", [](RunConfig& c, auto k, auto v) { c.analysis.f0_min = parse_double(k, v); }},
      {"f0_max", [](RunConfig& c, auto k, auto v) { c.analysis.f0_max = parse_double(k, v); }},
      {"voicing_threshold",
       [](RunConfig& c, auto k, auto v) { c.analysis.voicing_threshold = parse_double(k, v); }},
      {"n_blocks",
       [](RunConfig& c, auto k, auto v) { c.net.n_blocks = parse_unsigned<std::uint32_t>(k, v); }},
      {"layers_per_block",
       [](RunConfig& c, auto k, auto v) { c.net.layers_per_block = parse_unsigned<std::uint32_t>(k, v); }},
      {"residual_channels",
       [](RunConfig& c, auto k, auto v) { c.net.residual_channels = parse_unsigned<std::uint32_t>(k, v); }},
      {"gate_channels",
       [](RunConfig& c, auto k, auto v) { c.net.gate_channels = parse_unsigned<std::uint32_t>(k, v); }},
      {"skip_channels",
       [](RunConfig& c, auto k, auto v) { c.net.skip_channels = parse_unsigned<std::uint32_t>(k, v); }},
      {"head_channels",
       [](RunConfig& c, auto k, auto v) { c.net.head_channels = parse_unsigned<std::uint32_t>(k, v); }},
      {"kind", [](RunConfig& c, auto, auto v) { c.kind = vocoder::parse_kind(v); }},
      {"seed", [](RunConfig& c, auto k, auto v) { c.seed = parse_unsigned<std::uint64_t>(k, v); }},
      {"steps", [](RunConfig& c, auto k, auto v) { c.steps = parse_unsigned<std::size_t>(k, v); }},
      {"batch_samples",
       [](RunConfig& c, auto k, auto v) { c.batch_samples = parse_unsigned<std::size_t>(k, v); }},
      {"learning_rate", [](RunConfig& c, auto k, auto v) { c.learning_rate = parse_double(k, v); }},
      {"checkpoint_every",
       [](RunConfig& c, auto k, auto v) { c.checkpoint_every = parse_unsigned<std::size_t>(k, v); }},
      {"sampling",
       [](RunConfig& c, auto, auto v) {
         if (v == "argmax") c.sample = false;
         else if (v == "sample") c.sample = true;
         else throw Error("'sampling' must be argmax or sample, got '" + std::string(v) + "'");
       }},
  };
  return table;
}

std::string shortest(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

}  // namespace

net::SamplingMode RunConfig::sampling_mode() const {
  return sample ? net::SamplingMode::sample(seed) : net::SamplingMode::argmax();
}

vocoder::TrainConfig RunConfig::train_config() const {
  vocoder::TrainConfig t;
  t.net = net;
  t.net.seed = seed;
  t.steps = steps;
  t.batch_samples = batch_samples;
  t.learning_rate = learning_rate;
  t.seed = seed;
  t.checkpoint_every = checkpoint_every;
  return t;
}

void RunConfig::validate() const {
  if (analysis.sample_rate <= 0) throw Error("'sample_rate' must be positive");
  if (!(analysis.frame_ms > 0.0)) throw Error("'frame_len_ms' must be positive");
  if (!(analysis.shift_ms > 0.0) || analysis.shift_ms > analysis.frame_ms)
    throw Error("'shift_ms' must be positive and no longer than the frame");
  if (analysis.lpc_order != features::kLsfDim) throw Error("'lpc_order' must be 40");
  if (!(analysis.f0_min > 0.0) || !(analysis.f0_max > analysis.f0_min))
    throw Error("'f0_min' and 'f0_max' must satisfy 0 < f0_min < f0_max");
  if (!(analysis.voicing_threshold > 0.0 && analysis.voicing_threshold < 1.0))
    throw Error("'voicing_threshold' must lie in (0, 1)");
  const auto grid = analysis.grid();
  if (grid.frame_len == 0 || grid.shift == 0) throw Error("frame grid rounds to zero samples");
  net.validate();
  if (steps == 0) throw Error("'steps' must be positive");
  if (batch_samples == 0) throw Error("'batch_samples' must be positive");
  if (!(learning_rate > 0.0)) throw Error("'learning_rate' must be positive");
}

std::string RunConfig::to_text() const {
  std::ostringstream o;
  o << "sample_rate = " << analysis.sample_rate << '\n'
    << "frame_len_ms = " << shortest(analysis.frame_ms) << '\n'
    << "shift_ms = " << shortest(analysis.shift_ms) << '\n'
    << "lpc_order = " << analysis.lpc_order << '\n'
    << "f0_min = " << shortest(analysis.f0_min) << '\n'
    << "f0_max = " << shortest(analysis.f0_max) << '\n'
    << "voicing_threshold = " << shortest(analysis.voicing_threshold) << '\n'
    << "n_blocks = " << net.n_blocks << '\n'
    << "layers_per_block = " << net.layers_per_block << '\n'
    << "residual_channels = " << net.residual_channels << '\n'
    << "gate_channels = " << net.gate_channels << '\n'
    << "skip_channels = " << net.skip_channels << '\n'
    << "head_channels = " << net.head_channels << '\n'
    << "kind = " << vocoder::to_string(kind) << '\n'
    << "seed = " << seed << '\n'
    << "steps = " << steps << '\n'
    << "batch_samples = " << batch_samples << '\n'
    << "learning_rate = " << shortest(learning_rate) << '\n'
    << "checkpoint_every = " << checkpoint_every << '\n'
    << "sampling = " << (sample ? "sample" : "argmax") << '\n';
  return o.str();
}

RunConfig parse_run_config(std::string_view text, std::string_view source) {
  const std::string where(source);
  std::vector<std::tuple<std::size_t, std::string, std::string>> entries;
  std::map<std::string, std::size_t, std::less<>> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const auto at = where + ":" + std::to_string(line_no) + ": ";
    if (eq == std::string_view::npos) throw Error(at + "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty() || value.empty()) throw Error(at + "expected 'key = value'");
    if (key != "net" && !setters().contains(key)) throw Error(at + "unknown key '" + key + "'");
    if (auto [it, fresh] = seen.emplace(key, line_no); !fresh)
      throw Error(at + "'" + key + "' already set on line " + std::to_string(it->second));
    entries.emplace_back(line_no, key, value);
  }

  RunConfig cfg;
  if (const auto it = seen.find("net"); it != seen.end()) {
    for (const auto& [n, key, value] : entries) {
      if (key != "net") continue;
      if (value == "full") cfg.net = net::NetConfig::full();
      else if (value == "toy") cfg.net = net::NetConfig::toy();
      else throw Error(where + ":" + std::to_string(n) + ": 'net' must be full or toy");
    }
  }
  for (const auto& [n, key, value] : entries) {
    if (key == "net") continue;
    try {
      setters().find(key)->second(cfg, key, value);
    } catch (const Error& e) {
      throw Error(where + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw Error(where + ": " + e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(io::read_file(path), path.string());
}

}  // namespace excitnet::cli
