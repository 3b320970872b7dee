#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "excitnet/net/network.hpp"

namespace excitnet::net {

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <typename T>
struct AdamState {
  NetParams<T> m;
  NetParams<T> v;
  std::uint64_t step = 0;

  static AdamState zeros(const NetConfig& config);
  bool operator==(const AdamState&) const = default;
};

template <typename T>
void adam_update(NetParams<T>& params, const NetParams<T>& grads, AdamState<T>& state,
                 const AdamConfig& config);

/// One teacher-forced window. Rows before `loss_begin` are receptive-field
/// context taken from the true history and are excluded from the loss.
template <typename T>
struct TrainingBatch {
  std::vector<int> inputs;
  std::vector<int> targets;
  Matrix<T> conditions;
  std::size_t loss_begin = 0;
};

/// Window [start, start + length) of an utterance, preceded by up to
/// receptive_field - 1 samples of context.
template <typename T>
TrainingBatch<T> make_window(std::span<const int> codes, const Matrix<float>& conditions,
                             std::size_t start, std::size_t length,
                             std::size_t receptive_field);

/// Forward, backward and one Adam step. Returns the pre-update loss. Throws
/// "training diverged" (leaving params untouched) on a non-finite loss or gradient.
template <typename T>
double train_step(NetParams<T>& params, AdamState<T>& state, const TrainingBatch<T>& batch,
                  const AdamConfig& config);

/// Buffers that train_step reuses across calls.
template <typename T>
struct TrainWorkspace {
  ForwardCache<T> cache;
  NetParams<T> grads;
};

template <typename T>
double train_step(NetParams<T>& params, AdamState<T>& state, const TrainingBatch<T>& batch,
                  const AdamConfig& config, TrainWorkspace<T>& work);

/// Draws (utterance, start) windows of batch_size samples; utterances shorter
/// than batch_size are used whole.
class WindowSampler {
 public:
  WindowSampler(std::vector<std::size_t> lengths, std::size_t batch_size, std::uint64_t seed);

  struct Pick {
    std::size_t utterance;
    std::size_t start;
    std::size_t length;
  };
  Pick next();

 private:
  std::vector<std::size_t> lengths_;
  std::size_t batch_size_;
  std::mt19937_64 rng_;
};

}  // namespace excitnet::net
