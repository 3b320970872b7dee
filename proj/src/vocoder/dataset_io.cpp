#include <zlib.h>

#include "excitnet/binary_io.hpp"
#include "excitnet/vocoder/vocoder.hpp"

namespace excitnet::vocoder {
namespace {

constexpr std::string_view kMagic = "EXND";
constexpr std::uint32_t kVersion = 1;

std::uint32_t crc32_of(std::string_view bytes) {
  return static_cast<std::uint32_t>(
      ::crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
}

}  // namespace

void save_dataset(const std::filesystem::path& path, const PreparedDataset& data) {
  if (data.features.size() != data.examples.size())
    throw Error("dataset features and examples differ in count");
  io::ByteWriter w;
  w.put_bytes(kMagic);
  w.put_u32(kVersion);
  w.put_u8(static_cast<std::uint8_t>(data.kind));
  w.put_f32(static_cast<float>(data.scale));
  for (double v : data.stats.mean) w.put_f32(static_cast<float>(v));
  for (double v : data.stats.std) w.put_f32(static_cast<float>(v));
  w.put_u8(data.noise_filter ? 1 : 0);
  if (data.noise_filter) {
    w.put_u32(static_cast<std::uint32_t>(data.noise_filter->lpc.order()));
    for (double a : data.noise_filter->lpc.a) w.put_f32(static_cast<float>(a));
  }
  w.put_u32(static_cast<std::uint32_t>(data.examples.size()));
  for (std::size_t i = 0; i < data.examples.size(); ++i) {
    const auto& ex = data.examples[i];
    const auto& seq = data.features[i];
    w.put_string(ex.id);
    w.put_u32(static_cast<std::uint32_t>(seq.sample_rate));
    w.put_u32(static_cast<std::uint32_t>(seq.frame_len));
    w.put_u32(static_cast<std::uint32_t>(seq.shift));
    w.put_u32(static_cast<std::uint32_t>(seq.size()));
    for (const auto& f : seq.frames)
      for (double v : f.values) w.put_f32(static_cast<float>(v));
    w.put_u32(static_cast<std::uint32_t>(ex.codes.size()));
    for (int c : ex.codes) w.put_u8(static_cast<std::uint8_t>(c));
  }
  w.put_u32(crc32_of(w.bytes()));
  io::write_file_atomic(path, w.bytes());
}

PreparedDataset load_dataset(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  const std::string where = path.string() + ": ";
  if (bytes.size() < 8 || std::string_view(bytes).substr(0, 4) != kMagic)
    throw Error(where + "not an EXND dataset file");
  const std::string_view body(bytes.data(), bytes.size() - 4);
  io::ByteReader crc(std::string_view(bytes).substr(bytes.size() - 4));
  if (crc.get_u32() != crc32_of(body)) throw Error(where + "dataset is truncated or corrupt");

  io::ByteReader r(body);
  r.get_bytes(4);
  if (r.get_u32() != kVersion) throw Error(where + "unsupported EXND version");
  PreparedDataset data;
  const auto kind = r.get_u8();
  if (kind > 1) throw Error(where + "unknown vocoder kind");
  data.kind = static_cast<VocoderKind>(kind);
  data.scale = r.get_f32();
  for (auto& v : data.stats.mean) v = r.get_f32();
  for (auto& v : data.stats.std) v = r.get_f32();
  if (r.get_u8() != 0) {
    dsp::NoiseShapingFilter f;
    f.lpc.a.resize(r.get_u32());
    for (auto& a : f.lpc.a) a = r.get_f32();
    data.noise_filter = f;
  }
  const auto n = r.get_u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    TrainingExample ex;
    features::AcousticFeatureSequence seq;
    ex.id = r.get_string();
    seq.sample_rate = static_cast<int>(r.get_u32());
    seq.frame_len = r.get_u32();
    seq.shift = r.get_u32();
    seq.frames.resize(r.get_u32());
    for (auto& f : seq.frames)
      for (auto& v : f.values) v = r.get_f32();
    ex.codes.resize(r.get_u32());
    for (auto& c : ex.codes) c = r.get_u8();
    if (ex.codes.size() != seq.size() * seq.shift)
      throw Error(where + ex.id + ": codes are not aligned to the feature frames");
    ex.scale = data.scale;
    ex.conditions = make_conditions(seq, data.stats);
    data.examples.push_back(std::move(ex));
    data.features.push_back(std::move(seq));
  }
  if (r.remaining() != 0) throw Error(where + "trailing bytes in dataset");
  return data;
}

}  // namespace excitnet::vocoder
