#include "excitnet/net/generate.hpp"

#include <algorithm>
#include <cstring>

#include "activations.hpp"
#include "excitnet/net/kernels.hpp"
#include "excitnet/net/network.hpp"

namespace excitnet::net {

using detail::gate_activations;

int choose_code(std::span<const float> logits, const SamplingMode& mode, std::mt19937_64& rng) {
  if (mode.kind == SamplingMode::Kind::argmax)
    return static_cast<int>(std::max_element(logits.begin(), logits.end()) - logits.begin());
  const auto p = softmax_row(logits);
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  double cdf = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    cdf += p[k];
    if (u < cdf) return static_cast<int>(k);
  }
  // Rounding left the CDF just below 1: take the last class with mass.
  for (std::size_t k = p.size(); k-- > 0;)
    if (p[k] > 0.0) return static_cast<int>(k);
  return 0;
}

GenState::GenState(const NetParams<float>& params) : p_(params) {
  const auto& c = params.config;
  for (const auto& l : params.layers) queues_.emplace_back(l.dilation, c.residual_channels);
  h_.resize(c.residual_channels);
  z_.resize(2 * c.gate_channels);
  a_.resize(c.gate_channels);
  g_.resize(c.gate_channels);
  u_.resize(c.gate_channels);
  sk_.resize(c.skip_channels);
  skip_sum_.resize(c.skip_channels);
  res_.resize(c.residual_channels);
  relu_skip_.resize(c.skip_channels);
  hid_.resize(c.head_channels);
  logits_.resize(c.n_classes);
  proj_.assign(params.layers.size(), std::vector<float>(2 * c.gate_channels));
}

std::span<const float> GenState::step(int prev_code, std::span<const float> condition) {
  const auto& cfg = p_.config;
  const std::size_t R = cfg.residual_channels, G = cfg.gate_channels, G2 = 2 * G;
  const std::size_t S = cfg.skip_channels, H = cfg.head_channels, K = cfg.n_classes;
  const std::size_t C = cfg.cond_dim;
  if (condition.size() != C) throw Error("condition row has wrong dimension");
  if (prev_code < 0 || static_cast<std::size_t>(prev_code) >= K)
    throw Error("input code out of range");

  const bool same_condition =
      last_condition_.size() == C &&
      std::memcmp(last_condition_.data(), condition.data(), C * sizeof(float)) == 0;
  if (!same_condition) last_condition_.assign(condition.begin(), condition.end());

  std::copy_n(p_.embed.data.data() + static_cast<std::size_t>(prev_code) * R, R, h_.data());
  std::fill(skip_sum_.begin(), skip_sum_.end(), 0.0f);
  for (std::size_t l = 0; l < p_.layers.size(); ++l) {
    const auto& lp = p_.layers[l];
    const std::size_t d = lp.dilation;
    float* slot = queues_[l].row(t_ % d);

    std::copy_n(lp.conv_b.data.data(), G2, z_.data());
    kernels::row_acc(h_.data(), R, lp.conv_w.data.data() + R * G2, G2, z_.data());
    if (t_ >= d) kernels::row_acc(slot, R, lp.conv_w.data.data(), G2, z_.data());
    if (!same_condition) {
      std::fill(proj_[l].begin(), proj_[l].end(), 0.0f);
      kernels::row_acc(condition.data(), C, lp.cond_w.data.data(), G2, proj_[l].data());
    }
    for (std::size_t k = 0; k < G2; ++k) z_[k] += proj_[l][k];
    gate_activations(z_.data(), G, a_.data(), g_.data(), u_.data());

    std::copy_n(lp.skip_b.data.data(), S, sk_.data());
    kernels::row_acc(u_.data(), G, lp.skip_w.data.data(), S, sk_.data());
    for (std::size_t k = 0; k < S; ++k) skip_sum_[k] += sk_[k];

    std::copy_n(h_.data(), R, slot);
    if (l + 1 < p_.layers.size()) {
      std::copy_n(lp.res_b.data.data(), R, res_.data());
      kernels::row_acc(u_.data(), G, lp.res_w.data.data(), R, res_.data());
      for (std::size_t k = 0; k < R; ++k) h_[k] = slot[k] + res_[k];
    }
  }

  for (std::size_t k = 0; k < S; ++k) relu_skip_[k] = std::max(skip_sum_[k], 0.0f);
  std::copy_n(p_.out1_b.data.data(), H, hid_.data());
  kernels::row_acc(relu_skip_.data(), S, p_.out1_w.data.data(), H, hid_.data());
  for (auto& v : hid_) v = std::max(v, 0.0f);
  std::copy_n(p_.out2_b.data.data(), K, logits_.data());
  kernels::row_acc(hid_.data(), H, p_.out2_w.data.data(), K, logits_.data());
  ++t_;
  return logits_;
}

GenerationResult generate_fast(const NetParams<float>& params, const Matrix<float>& conditions,
                               const SamplingMode& mode, bool keep_logits) {
  if (conditions.rows > 0 && conditions.cols != params.config.cond_dim)
    throw Error("condition matrix has wrong dimension");
  GenerationResult out;
  out.codes.reserve(conditions.rows);
  if (keep_logits) out.logits = Matrix<float>(conditions.rows, params.config.n_classes);
  std::mt19937_64 rng(mode.seed);
  GenState state(params);
  int prev = kZeroAmplitudeCode;
  for (std::size_t t = 0; t < conditions.rows; ++t) {
    const auto logits = state.step(prev, {conditions.row(t), conditions.cols});
    if (keep_logits) std::copy(logits.begin(), logits.end(), out.logits.row(t));
    prev = choose_code(logits, mode, rng);
    out.codes.push_back(prev);
  }
  return out;
}

GenerationResult generate_naive(const NetParams<float>& params, const Matrix<float>& conditions,
                                const SamplingMode& mode, bool keep_logits) {
  if (conditions.rows > 0 && conditions.cols != params.config.cond_dim)
    throw Error("condition matrix has wrong dimension");
  const std::size_t K = params.config.n_classes;
  GenerationResult out;
  if (keep_logits) out.logits = Matrix<float>(conditions.rows, K);
  std::mt19937_64 rng(mode.seed);
  ForwardCache<float> cache;
  for (std::size_t t = 0; t < conditions.rows; ++t) {
    Matrix<float> history(t + 1, conditions.cols);
    std::copy_n(conditions.data.data(), (t + 1) * conditions.cols, history.data.data());
    std::vector<int> inputs(t + 1);
    inputs[0] = kZeroAmplitudeCode;
    for (std::size_t k = 1; k <= t; ++k) inputs[k] = out.codes[k - 1];
    forward_inputs(params, inputs, history, cache);
    const std::span<const float> logits(cache.logits.row(t), K);
    if (keep_logits) std::copy(logits.begin(), logits.end(), out.logits.row(t));
    out.codes.push_back(choose_code(logits, mode, rng));
  }
  return out;
}

}  // namespace excitnet::net
