#include "excitnet/binary_io.hpp"
#include "excitnet/features.hpp"

namespace excitnet::features {
namespace {

constexpr std::string_view kFeatureMagic = "EXNF";
constexpr std::string_view kStatsMagic = "EXNS";
constexpr std::uint32_t kFeatureVersion = 1;

}  // namespace

void write_features(const std::filesystem::path& path, const AcousticFeatureSequence& seq) {
  io::ByteWriter w;
  w.put_bytes(kFeatureMagic);
  w.put_u32(kFeatureVersion);
  w.put_u32(static_cast<std::uint32_t>(seq.size()));
  w.put_u32(static_cast<std::uint32_t>(kFeatureDim));
  w.put_u32(static_cast<std::uint32_t>(seq.sample_rate));
  w.put_u32(static_cast<std::uint32_t>(seq.frame_len));
  w.put_u32(static_cast<std::uint32_t>(seq.shift));
  for (const auto& f : seq.frames)
    for (double v : f.values) w.put_f32(static_cast<float>(v));
  io::write_file_atomic(path, w.bytes());
}

AcousticFeatureSequence read_features(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  io::ByteReader r(bytes);
  if (r.remaining() < 4 || r.get_bytes(4) != kFeatureMagic)
    throw Error(path.string() + ": not an EXNF feature file");
  if (r.get_u32() != kFeatureVersion) throw Error(path.string() + ": unsupported EXNF version");
  const auto n = r.get_u32();
  const auto dim = r.get_u32();
  if (dim != kFeatureDim)
    throw Error(path.string() + ": feature dimension " + std::to_string(dim) + " != 79");
  AcousticFeatureSequence seq;
  seq.sample_rate = static_cast<int>(r.get_u32());
  seq.frame_len = r.get_u32();
  seq.shift = r.get_u32();
  if (r.remaining() != static_cast<std::size_t>(n) * dim * 4)
    throw Error(path.string() + ": truncated or oversized EXNF payload");
  seq.frames.resize(n);
  for (auto& f : seq.frames)
    for (auto& v : f.values) v = r.get_f32();
  return seq;
}

void write_stats(const std::filesystem::path& path, const FeatureStats& stats) {
  io::ByteWriter w;
  w.put_bytes(kStatsMagic);
  w.put_u32(static_cast<std::uint32_t>(kFeatureDim));
  for (double v : stats.mean) w.put_f32(static_cast<float>(v));
  for (double v : stats.std) w.put_f32(static_cast<float>(v));
  io::write_file_atomic(path, w.bytes());
}

FeatureStats read_stats(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  io::ByteReader r(bytes);
  if (r.remaining() < 4 || r.get_bytes(4) != kStatsMagic)
    throw Error(path.string() + ": not an EXNS stats file");
  if (r.get_u32() != kFeatureDim) throw Error(path.string() + ": stats dimension mismatch");
  if (r.remaining() != 2 * kFeatureDim * 4) throw Error(path.string() + ": truncated EXNS file");
  FeatureStats st;
  for (auto& v : st.mean) v = r.get_f32();
  for (auto& v : st.std) v = r.get_f32();
  return st;
}

}  // namespace excitnet::features
