#include <cmath>
#include <random>

#include "excitnet/net/params.hpp"
#include "excitnet/signal.hpp"

namespace excitnet::net {

NetConfig NetConfig::full() {
  NetConfig c;
  c.n_blocks = 3;
  c.layers_per_block = 10;
  c.residual_channels = 512;
  c.gate_channels = 512;
  c.skip_channels = 512;
  c.head_channels = 256;
  return c;
}

NetConfig NetConfig::toy() { return NetConfig{}; }

std::vector<std::size_t> NetConfig::dilations() const {
  std::vector<std::size_t> d;
  d.reserve(n_layers());
  for (std::uint32_t b = 0; b < n_blocks; ++b)
    for (std::uint32_t l = 0; l < layers_per_block; ++l) d.push_back(std::size_t{1} << l);
  return d;
}

void NetConfig::validate() const {
  if (n_blocks < 1 || layers_per_block < 1 || residual_channels < 1 || gate_channels < 1 ||
      skip_channels < 1 || head_channels < 1 || n_classes < 2 || cond_dim < 1)
    throw Error("invalid network configuration");
  if (layers_per_block > 24) throw Error("dilation schedule too deep");
}

std::size_t receptive_field(const NetConfig& config) {
  std::size_t rf = 1;
  for (auto d : config.dilations()) rf += d;
  return rf;
}

template <typename T>
Tensor<T>::Tensor(std::string n, std::vector<std::uint32_t> d) : name(std::move(n)), dims(std::move(d)) {
  std::size_t count = 1;
  for (auto v : dims) count *= v;
  data.assign(count, T{0});
}

template <typename T>
NetParams<T> NetParams<T>::zeros(const NetConfig& c) {
  c.validate();
  NetParams<T> p;
  p.config = c;
  const std::uint32_t r = c.residual_channels, g2 = 2 * c.gate_channels, g = c.gate_channels;
  p.embed = Tensor<T>("embed", {c.n_classes, r});
  const auto dil = c.dilations();
  p.layers.resize(dil.size());
  for (std::size_t i = 0; i < dil.size(); ++i) {
    auto& l = p.layers[i];
    const std::string pre = "layer" + std::to_string(i) + ".";
    l.dilation = dil[i];
    l.conv_w = Tensor<T>(pre + "conv_w", {2, r, g2});
    l.conv_b = Tensor<T>(pre + "conv_b", {g2});
    l.cond_w = Tensor<T>(pre + "cond_w", {c.cond_dim, g2});
    l.res_w = Tensor<T>(pre + "res_w", {g, r});
    l.res_b = Tensor<T>(pre + "res_b", {r});
    l.skip_w = Tensor<T>(pre + "skip_w", {g, c.skip_channels});
    l.skip_b = Tensor<T>(pre + "skip_b", {c.skip_channels});
  }
  p.out1_w = Tensor<T>("out1_w", {c.skip_channels, c.head_channels});
  p.out1_b = Tensor<T>("out1_b", {c.head_channels});
  p.out2_w = Tensor<T>("out2_w", {c.head_channels, c.n_classes});
  p.out2_b = Tensor<T>("out2_b", {c.n_classes});
  return p;
}

template <typename T>
std::size_t NetParams<T>::parameter_count() const {
  std::size_t n = 0;
  for_each([&](const Tensor<T>& t) { n += t.size(); });
  return n;
}

template <typename T>
bool NetParams<T>::all_finite() const {
  bool ok = true;
  for_each([&](const Tensor<T>& t) {
    for (T v : t.data)
      if (!std::isfinite(v)) ok = false;
  });
  return ok;
}

std::pair<std::size_t, std::size_t> xavier_fans(const std::vector<std::uint32_t>& dims) {
  if (dims.size() == 2) return {dims[0], dims[1]};
  if (dims.size() == 3) return {std::size_t{dims[0]} * dims[1], std::size_t{dims[0]} * dims[2]};
  return {0, 0};
}

template <typename T>
NetParams<T> init_network(const NetConfig& config) {
  auto p = NetParams<T>::zeros(config);
  std::mt19937_64 rng(config.seed);
  p.for_each([&](Tensor<T>& t) {
    const auto [fan_in, fan_out] = xavier_fans(t.dims);
    if (fan_in == 0) return;
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (auto& v : t.data) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      v = static_cast<T>((2.0 * u - 1.0) * bound);
    }
  });
  return p;
}

template <typename To, typename From>
NetParams<To> cast_params(const NetParams<From>& src) {
  auto dst = NetParams<To>::zeros(src.config);
  std::vector<const Tensor<From>*> in;
  src.for_each([&](const Tensor<From>& t) { in.push_back(&t); });
  std::size_t i = 0;
  dst.for_each([&](Tensor<To>& t) {
    const auto& s = *in[i++];
    for (std::size_t k = 0; k < t.size(); ++k) t.data[k] = static_cast<To>(s.data[k]);
  });
  return dst;
}

template struct Tensor<float>;
template struct Tensor<double>;
template struct NetParams<float>;
template struct NetParams<double>;
template NetParams<float> init_network<float>(const NetConfig&);
template NetParams<double> init_network<double>(const NetConfig&);
template NetParams<double> cast_params<double, float>(const NetParams<float>&);
template NetParams<float> cast_params<float, double>(const NetParams<double>&);
template NetParams<float> cast_params<float, float>(const NetParams<float>&);
template NetParams<double> cast_params<double, double>(const NetParams<double>&);

}  // namespace excitnet::net
