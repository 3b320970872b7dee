#include "excitnet/vocoder/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "excitnet/binary_io.hpp"

namespace excitnet::vocoder {
namespace {

Error bad_file(const std::filesystem::path& path, const std::string& why) {
  return Error(path.string() + ": " + why);
}

}  // namespace

Signal read_wav(const std::filesystem::path& path) {
  std::string bytes;
  try {
    bytes = io::read_file(path);
  } catch (const Error& e) {
    throw bad_file(path, "cannot read file");
  }
  if (bytes.size() < 12 || bytes.compare(0, 4, "RIFF") != 0 || bytes.compare(8, 4, "WAVE") != 0)
    throw bad_file(path, "not a RIFF/WAVE file");

  io::ByteReader in(bytes);
  in.get_bytes(12);
  bool have_fmt = false;
  std::uint16_t channels = 0, bits = 0;
  std::uint32_t rate = 0;
  while (in.remaining() >= 8) {
    const auto id = in.get_bytes(4);
    const std::uint32_t size = in.get_u32();
    if (size > in.remaining()) throw bad_file(path, "truncated chunk");
    const auto body = in.get_bytes(size);
    if (size % 2 == 1 && in.remaining() > 0) in.get_u8();

    if (id == "fmt ") {
      if (size < 16) throw bad_file(path, "malformed fmt chunk");
      io::ByteReader fmt(body);
      const std::uint32_t tag_channels = fmt.get_u32();
      const auto format = static_cast<std::uint16_t>(tag_channels & 0xffff);
      channels = static_cast<std::uint16_t>(tag_channels >> 16);
      rate = fmt.get_u32();
      fmt.get_u32();  // byte rate
      bits = static_cast<std::uint16_t>(fmt.get_u32() >> 16);
      if (format != 1 && format != 0xfffe) throw bad_file(path, "not PCM");
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw bad_file(path, "data chunk before fmt chunk");
      if (channels != 1) throw bad_file(path, "expected mono, got " + std::to_string(channels) + " channels");
      if (bits != 16) throw bad_file(path, "expected 16-bit PCM, got " + std::to_string(bits) + " bits");
      if (rate == 0) throw bad_file(path, "zero sample rate");
      Signal s;
      s.sample_rate = static_cast<int>(rate);
      s.samples.resize(size / 2);
      for (std::size_t i = 0; i < s.samples.size(); ++i) {
        std::int16_t v;
        std::memcpy(&v, body.data() + 2 * i, 2);
        s.samples[i] = static_cast<double>(v) / 32768.0;
      }
      if (s.empty()) throw bad_file(path, "no samples");
      return s;
    }
  }
  throw bad_file(path, "no data chunk");
}

void write_wav(const std::filesystem::path& path, const Signal& signal) {
  if (signal.sample_rate <= 0) throw Error("invalid sample rate");
  const auto data_bytes = static_cast<std::uint32_t>(2 * signal.size());
  io::ByteWriter out;
  out.put_bytes("RIFF");
  out.put_u32(36 + data_bytes);
  out.put_bytes("WAVEfmt ");
  out.put_u32(16);
  out.put_u32(1u | (1u << 16));  // PCM, mono
  out.put_u32(static_cast<std::uint32_t>(signal.sample_rate));
  out.put_u32(static_cast<std::uint32_t>(signal.sample_rate) * 2);
  out.put_u32(2u | (16u << 16));  // block align, bits
  out.put_bytes("data");
  out.put_u32(data_bytes);
  for (double x : signal.samples) {
    const double v = std::clamp(std::round(x * 32768.0), -32768.0, 32767.0);
    const auto s = static_cast<std::uint16_t>(static_cast<std::int16_t>(v));
    out.put_u8(static_cast<std::uint8_t>(s & 0xff));
    out.put_u8(static_cast<std::uint8_t>(s >> 8));
  }
  io::write_file_atomic(path, out.bytes());
}

Signal resample_linear(const Signal& signal, int sample_rate) {
  if (sample_rate <= 0) throw Error("invalid sample rate");
  if (signal.empty()) throw Error("empty input");
  if (sample_rate == signal.sample_rate) return signal;
  const double ratio = static_cast<double>(signal.sample_rate) / sample_rate;
  const auto n = static_cast<std::size_t>(
      std::floor(static_cast<double>(signal.size() - 1) / ratio)) + 1;
  Signal out;
  out.sample_rate = sample_rate;
  out.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double pos = static_cast<double>(i) * ratio;
    const auto k = std::min(static_cast<std::size_t>(pos), signal.size() - 1);
    const double frac = pos - static_cast<double>(k);
    const double next = k + 1 < signal.size() ? signal.samples[k + 1] : signal.samples[k];
    out.samples[i] = signal.samples[k] + frac * (next - signal.samples[k]);
  }
  return out;
}

}  // namespace excitnet::vocoder
