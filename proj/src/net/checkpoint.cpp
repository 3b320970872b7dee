#include "excitnet/net/checkpoint.hpp"

#include <zlib.h>

#include <unordered_map>

#include "excitnet/binary_io.hpp"

namespace excitnet::net {
namespace {

constexpr std::string_view kMagic = "EXNM";

std::uint32_t crc32_of(std::string_view bytes) {
  return static_cast<std::uint32_t>(
      ::crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
}

void put_tensor(io::ByteWriter& w, const Tensor<float>& t, const std::string& name) {
  w.put_string(name);
  w.put_u32(static_cast<std::uint32_t>(t.dims.size()));
  for (auto d : t.dims) w.put_u32(d);
  for (float v : t.data) w.put_f32(v);
}

Tensor<float> get_tensor(io::ByteReader& r) {
  Tensor<float> t;
  t.name = r.get_string();
  const auto rank = r.get_u32();
  if (rank > 8) throw Error("checkpoint tensor '" + t.name + "' has invalid rank");
  std::size_t count = 1;
  for (std::uint32_t i = 0; i < rank; ++i) {
    t.dims.push_back(r.get_u32());
    count *= t.dims.back();
  }
  if (count * 4 > r.remaining()) throw Error("truncated file");
  t.data.resize(count);
  for (auto& v : t.data) v = r.get_f32();
  return t;
}

void put_params(io::ByteWriter& w, const NetParams<float>& p, const std::string& prefix) {
  p.for_each([&](const Tensor<float>& t) { put_tensor(w, t, prefix + t.name); });
}

void fill_params(NetParams<float>& p, std::unordered_map<std::string, Tensor<float>>& table,
                 const std::string& prefix) {
  p.for_each([&](Tensor<float>& t) {
    auto it = table.find(prefix + t.name);
    if (it == table.end()) throw Error("checkpoint is missing tensor " + prefix + t.name);
    if (it->second.dims != t.dims) throw Error("checkpoint tensor " + prefix + t.name + " has wrong shape");
    t.data = std::move(it->second.data);
    table.erase(it);
  });
}

std::unordered_map<std::string, Tensor<float>> read_table(io::ByteReader& r,
                                                          std::vector<std::string>* order) {
  const auto n = r.get_u32();
  std::unordered_map<std::string, Tensor<float>> table;
  for (std::uint32_t i = 0; i < n; ++i) {
    auto t = get_tensor(r);
    if (order) order->push_back(t.name);
    if (!table.emplace(t.name, std::move(t)).second) throw Error("duplicate checkpoint tensor");
  }
  return table;
}

}  // namespace

const Tensor<float>* Checkpoint::find_aux(const std::string& name) const {
  for (const auto& t : aux)
    if (t.name == name) return &t;
  return nullptr;
}

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  const auto& c = ckpt.config();
  io::ByteWriter w;
  w.put_bytes(kMagic);
  w.put_u32(kCheckpointVersion);
  for (auto v : {c.n_blocks, c.layers_per_block, c.residual_channels, c.gate_channels,
                 c.skip_channels, c.head_channels, c.n_classes, c.cond_dim})
    w.put_u32(v);
  w.put_u64(c.seed);
  w.put_u64(ckpt.step);

  w.put_u32(static_cast<std::uint32_t>(ckpt.attributes.size()));
  for (const auto& [k, v] : ckpt.attributes) {
    w.put_string(k);
    w.put_string(v);
  }

  std::uint32_t n_params = 0;
  ckpt.params.for_each([&](const Tensor<float>&) { ++n_params; });
  w.put_u32(n_params + static_cast<std::uint32_t>(ckpt.aux.size()));
  put_params(w, ckpt.params, "");
  for (const auto& t : ckpt.aux) put_tensor(w, t, t.name);

  w.put_u8(ckpt.adam ? 1 : 0);
  if (ckpt.adam) {
    w.put_u64(ckpt.adam->step);
    w.put_u32(2 * n_params);
    put_params(w, ckpt.adam->m, "m.");
    put_params(w, ckpt.adam->v, "v.");
  }

  std::string bytes = w.take();
  io::ByteWriter tail;
  tail.put_u32(crc32_of(bytes));
  bytes += tail.bytes();
  return bytes;
}

Checkpoint deserialize_checkpoint(std::string_view bytes) {
  if (bytes.size() < 8 || bytes.substr(0, 4) != kMagic) throw Error("not an EXNM checkpoint");
  const auto body = bytes.substr(0, bytes.size() - 4);
  io::ByteReader crc_reader(bytes.substr(bytes.size() - 4));
  const bool crc_ok = crc_reader.get_u32() == crc32_of(body);

  io::ByteReader r(body);
  r.get_bytes(4);
  const auto version = r.get_u32();
  if (version != kCheckpointVersion)
    throw Error("unsupported checkpoint version " + std::to_string(version));
  if (!crc_ok) throw Error("checkpoint is truncated or corrupt (CRC mismatch)");

  NetConfig c;
  c.n_blocks = r.get_u32();
  c.layers_per_block = r.get_u32();
  c.residual_channels = r.get_u32();
  c.gate_channels = r.get_u32();
  c.skip_channels = r.get_u32();
  c.head_channels = r.get_u32();
  c.n_classes = r.get_u32();
  c.cond_dim = r.get_u32();
  c.seed = r.get_u64();

  Checkpoint ckpt;
  ckpt.step = r.get_u64();
  const auto n_attr = r.get_u32();
  for (std::uint32_t i = 0; i < n_attr; ++i) {
    auto k = r.get_string();
    ckpt.attributes[k] = r.get_string();
  }

  std::vector<std::string> order;
  auto table = read_table(r, &order);
  ckpt.params = NetParams<float>::zeros(c);
  fill_params(ckpt.params, table, "");
  for (const auto& name : order) {
    auto it = table.find(name);
    if (it != table.end()) ckpt.aux.push_back(std::move(it->second));
  }

  if (r.get_u8() == 1) {
    AdamState<float> adam = AdamState<float>::zeros(c);
    adam.step = r.get_u64();
    auto moments = read_table(r, nullptr);
    fill_params(adam.m, moments, "m.");
    fill_params(adam.v, moments, "v.");
    ckpt.adam = std::move(adam);
  }
  if (r.remaining() != 0) throw Error("trailing bytes in checkpoint");
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  io::write_file_atomic(path, serialize_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  try {
    return deserialize_checkpoint(io::read_file(path));
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

}  // namespace excitnet::net
