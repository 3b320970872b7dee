#pragma once

#include <cstdint>
#include <utility>
#include <string>
#include <vector>

#include "excitnet/net/config.hpp"

namespace excitnet::net {

template <typename T>
struct Tensor {
  std::string name;
  std::vector<std::uint32_t> dims;
  std::vector<T> data;

  Tensor() = default;
  Tensor(std::string n, std::vector<std::uint32_t> d);

  std::size_t size() const { return data.size(); }
  bool operator==(const Tensor&) const = default;
};

// Weight matrices are stored input-major ([in][out]) so that the forward
// product is a sequence of row AXPYs.
template <typename T>
struct LayerParams {
  std::size_t dilation = 1;
  Tensor<T> conv_w;     // [2][residual][2*gate]; tap 0 reads t - dilation, tap 1 reads t
  Tensor<T> conv_b;     // [2*gate]; filter half then gate half
  Tensor<T> cond_w;     // [cond_dim][2*gate]
  Tensor<T> res_w;      // [gate][residual]
  Tensor<T> res_b;      // [residual]
  Tensor<T> skip_w;     // [gate][skip]
  Tensor<T> skip_b;     // [skip]

  bool operator==(const LayerParams&) const = default;
};

template <typename T>
struct NetParams {
  NetConfig config;
  Tensor<T> embed;      // [n_classes][residual]
  std::vector<LayerParams<T>> layers;
  Tensor<T> out1_w;     // [skip][head]
  Tensor<T> out1_b;     // [head]
  Tensor<T> out2_w;     // [head][n_classes]
  Tensor<T> out2_b;     // [n_classes]

  /// Zero-filled parameters with the shapes implied by `config`.
  static NetParams zeros(const NetConfig& config);

  /// Visits every tensor in a fixed order (serialization, optimizer, init).
  template <typename F>
  void for_each(F&& f) {
    f(embed);
    for (auto& l : layers) {
      f(l.conv_w);
      f(l.conv_b);
      f(l.cond_w);
      f(l.res_w);
      f(l.res_b);
      f(l.skip_w);
      f(l.skip_b);
    }
    f(out1_w);
    f(out1_b);
    f(out2_w);
    f(out2_b);
  }
  template <typename F>
  void for_each(F&& f) const {
    const_cast<NetParams*>(this)->for_each([&](const Tensor<T>& t) { f(t); });
  }

  std::size_t parameter_count() const;
  bool all_finite() const;
  bool operator==(const NetParams&) const = default;
};

/// Xavier-uniform weights (bound sqrt(6 / (fan_in + fan_out))), zero biases,
/// drawn from a generator seeded with config.seed.
template <typename T>
NetParams<T> init_network(const NetConfig& config);

/// Xavier fan-in / fan-out: [in][out] matrices use (in, out); [k][in][out]
/// convolutions use (k*in, k*out); rank-1 tensors are biases and get {0, 0}.
std::pair<std::size_t, std::size_t> xavier_fans(const std::vector<std::uint32_t>& dims);

template <typename To, typename From>
NetParams<To> cast_params(const NetParams<From>& src);

}  // namespace excitnet::net
