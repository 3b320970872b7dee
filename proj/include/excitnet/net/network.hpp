#pragma once

// Forward pass, loss and backpropagation of the gated dilated causal network.
//
// Per layer (dilation d, kernel 2):
//   z[t]   = b + W_cur h[t] + W_past h[t-d] + V c[t]       (h[t-d] = 0 for t < d)
//   u[t]   = tanh(z_filter[t]) * sigmoid(z_gate[t])
//   skip  += W_skip u[t] + b_skip
//   h'[t]  = h[t] + W_res u[t] + b_res
// Output head: logits = W2 relu(W1 relu(skip) + b1) + b2.
// The input at step t is the embedding of the code at t-1 (code 128 at t = 0).

#include <cstdint>
#include <span>
#include <vector>

#include "excitnet/net/params.hpp"
#include "excitnet/signal.hpp"

namespace excitnet::net {

/// Consecutive condition rows that are bitwise identical share one projection.
struct ConditionRuns {
  std::vector<std::size_t> run_of_row;  // row -> run index
  std::vector<std::size_t> first_row;   // run -> representative row
};

template <typename T>
ConditionRuns find_condition_runs(const Matrix<T>& conditions);

template <typename T>
struct LayerCache {
  Matrix<T> input;   // h, T x residual
  Matrix<T> filter;  // tanh(z_filter), T x gate
  Matrix<T> gate;    // sigmoid(z_gate), T x gate
  Matrix<T> gated;   // u, T x gate
};

/// Temporaries of forward_inputs and backward, kept to avoid reallocation.
template <typename T>
struct Workspace {
  Matrix<T> z, proj, sk, res, relu_skip;
  Matrix<T> dlogits, dhid, dskip, dh, du, dz, dzu;
};

template <typename T>
struct ForwardCache {
  std::vector<int> inputs;
  ConditionRuns runs;
  Matrix<T> unique_conditions;  // one row per run
  std::vector<LayerCache<T>> layers;
  Matrix<T> skip_sum;
  Matrix<T> head_hidden;  // relu(W1 relu(skip) + b1)
  Matrix<T> logits;
  mutable Workspace<T> work;
};

/// Teacher-forced inputs for a code sequence: [128, codes[0], ..., codes[T-2]].
std::vector<int> shift_inputs(std::span<const int> codes);

/// Runs the network over explicit input codes; fills `cache` for backprop.
template <typename T>
void forward_inputs(const NetParams<T>& params, std::span<const int> inputs,
                    const Matrix<T>& conditions, ForwardCache<T>& cache);

/// logits (T x n_classes) for teacher-forced `codes` with per-sample conditions.
template <typename T>
Matrix<T> forward(const NetParams<T>& params, std::span<const int> codes,
                  const Matrix<T>& conditions);

/// Mean over rows [begin, T) of -log softmax(logits[t])[target[t]], in nats.
/// Computed in double with max subtraction.
template <typename T>
double loss_nll(const Matrix<T>& logits, std::span<const int> targets, std::size_t begin = 0);

/// Loss over rows [begin, T) plus gradients of every parameter (accumulated
/// into `grads`, which must have the parameter shapes).
template <typename T>
double backward(const NetParams<T>& params, const ForwardCache<T>& cache,
                std::span<const int> targets, std::size_t begin, NetParams<T>& grads);

/// Numerically stable softmax of one logit row, in double.
std::vector<double> softmax_row(std::span<const float> logits);
std::vector<double> softmax_row(std::span<const double> logits);

}  // namespace excitnet::net
