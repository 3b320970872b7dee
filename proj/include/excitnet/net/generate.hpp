#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "excitnet/net/params.hpp"
#include "excitnet/signal.hpp"

namespace excitnet::net {

struct SamplingMode {
  enum class Kind { argmax, sample };
  Kind kind = Kind::argmax;
  std::uint64_t seed = 0;

  static SamplingMode argmax() { return {}; }
  static SamplingMode sample(std::uint64_t seed) { return {Kind::sample, seed}; }
};

/// Argmax (lowest index on ties), or inverse-CDF sampling from the softmax
/// with one 53-bit uniform draw per call.
int choose_code(std::span<const float> logits, const SamplingMode& mode, std::mt19937_64& rng);

struct GenerationResult {
  std::vector<int> codes;
  Matrix<float> logits;  // filled only when requested
};

/// Reference generator: a full forward pass over the whole history for every
/// emitted sample. Quadratic; kept as an oracle.
GenerationResult generate_naive(const NetParams<float>& params, const Matrix<float>& conditions,
                                const SamplingMode& mode, bool keep_logits = false);

/// Incremental generator with per-layer queues of past activations.
GenerationResult generate_fast(const NetParams<float>& params, const Matrix<float>& conditions,
                               const SamplingMode& mode, bool keep_logits = false);

/// Single-stream incremental state: one ring buffer of `dilation` past layer
/// inputs per layer. Not shareable between streams.
class GenState {
 public:
  explicit GenState(const NetParams<float>& params);

  /// Consumes the previous code and this step's condition row; returns logits.
  std::span<const float> step(int prev_code, std::span<const float> condition);

  std::size_t steps() const { return t_; }

 private:
  const NetParams<float>& p_;
  std::vector<Matrix<float>> queues_;
  std::size_t t_ = 0;

  std::vector<float> h_, z_, a_, g_, u_, sk_, skip_sum_, res_, relu_skip_, hid_, logits_;
  std::vector<std::vector<float>> proj_;      // cached condition projection per layer
  std::vector<float> last_condition_;
};

}  // namespace excitnet::net
