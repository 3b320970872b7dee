#include "excitnet/net/train.hpp"

#include <algorithm>
#include <cmath>

namespace excitnet::net {

template <typename T>
AdamState<T> AdamState<T>::zeros(const NetConfig& config) {
  return {NetParams<T>::zeros(config), NetParams<T>::zeros(config), 0};
}

template <typename T>
void adam_update(NetParams<T>& params, const NetParams<T>& grads, AdamState<T>& state,
                 const AdamConfig& cfg) {
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  const T b1 = static_cast<T>(cfg.beta1), b2 = static_cast<T>(cfg.beta2);
  const T lr = static_cast<T>(cfg.learning_rate);

  std::vector<Tensor<T>*> p, m, v;
  std::vector<const Tensor<T>*> g;
  params.for_each([&](Tensor<T>& x) { p.push_back(&x); });
  state.m.for_each([&](Tensor<T>& x) { m.push_back(&x); });
  state.v.for_each([&](Tensor<T>& x) { v.push_back(&x); });
  grads.for_each([&](const Tensor<T>& x) { g.push_back(&x); });

  for (std::size_t i = 0; i < p.size(); ++i) {
    auto& pd = p[i]->data;
    auto& md = m[i]->data;
    auto& vd = v[i]->data;
    const auto& gd = g[i]->data;
    for (std::size_t k = 0; k < pd.size(); ++k) {
      md[k] = b1 * md[k] + (T(1) - b1) * gd[k];
      vd[k] = b2 * vd[k] + (T(1) - b2) * gd[k] * gd[k];
      const double mhat = md[k] / c1;
      const double vhat = vd[k] / c2;
      pd[k] -= static_cast<T>(lr * mhat / (std::sqrt(vhat) + cfg.epsilon));
    }
  }
}

template <typename T>
TrainingBatch<T> make_window(std::span<const int> codes, const Matrix<float>& conditions,
                             std::size_t start, std::size_t length,
                             std::size_t receptive_field) {
  if (conditions.rows != codes.size()) throw Error("codes and conditions are misaligned");
  if (length == 0 || start + length > codes.size()) throw Error("window out of range");
  const std::size_t context = std::min(start, receptive_field > 0 ? receptive_field - 1 : 0);
  const std::size_t begin = start - context;
  const std::size_t n = context + length;

  TrainingBatch<T> b;
  b.loss_begin = context;
  b.inputs.resize(n);
  b.targets.resize(n);
  b.conditions = Matrix<T>(n, conditions.cols);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t t = begin + i;
    b.inputs[i] = t == 0 ? kZeroAmplitudeCode : codes[t - 1];
    b.targets[i] = codes[t];
    const float* src = conditions.row(t);
    T* dst = b.conditions.row(i);
    for (std::size_t c = 0; c < conditions.cols; ++c) dst[c] = static_cast<T>(src[c]);
  }
  return b;
}

template <typename T>
double train_step(NetParams<T>& params, AdamState<T>& state, const TrainingBatch<T>& batch,
                  const AdamConfig& config, TrainWorkspace<T>& work) {
  if (work.grads.layers.size() != params.layers.size() ||
      work.grads.embed.data.size() != params.embed.data.size())
    work.grads = NetParams<T>::zeros(params.config);
  else
    work.grads.for_each([](Tensor<T>& t) { std::fill(t.data.begin(), t.data.end(), T{0}); });
  forward_inputs(params, batch.inputs, batch.conditions, work.cache);
  const double loss = backward(params, work.cache, batch.targets, batch.loss_begin, work.grads);
  if (!std::isfinite(loss) || !work.grads.all_finite()) throw Error("training diverged");
  adam_update(params, work.grads, state, config);
  return loss;
}

template <typename T>
double train_step(NetParams<T>& params, AdamState<T>& state, const TrainingBatch<T>& batch,
                  const AdamConfig& config) {
  TrainWorkspace<T> work;
  return train_step(params, state, batch, config, work);
}

WindowSampler::WindowSampler(std::vector<std::size_t> lengths, std::size_t batch_size,
                             std::uint64_t seed)
    : lengths_(std::move(lengths)), batch_size_(batch_size), rng_(seed) {
  if (lengths_.empty()) throw Error("empty dataset");
  if (batch_size_ == 0) throw Error("batch size must be positive");
  for (auto n : lengths_)
    if (n == 0) throw Error("empty utterance in dataset");
}

WindowSampler::Pick WindowSampler::next() {
  const std::size_t u = lengths_.size() == 1 ? 0 : rng_() % lengths_.size();
  const std::size_t len = lengths_[u];
  if (len <= batch_size_) return {u, 0, len};
  const std::size_t start = rng_() % (len - batch_size_ + 1);
  return {u, start, batch_size_};
}

template struct AdamState<float>;
template struct AdamState<double>;
template void adam_update<float>(NetParams<float>&, const NetParams<float>&, AdamState<float>&,
                                 const AdamConfig&);
template void adam_update<double>(NetParams<double>&, const NetParams<double>&,
                                  AdamState<double>&, const AdamConfig&);
template TrainingBatch<float> make_window<float>(std::span<const int>, const Matrix<float>&,
                                                 std::size_t, std::size_t, std::size_t);
template TrainingBatch<double> make_window<double>(std::span<const int>, const Matrix<float>&,
                                                   std::size_t, std::size_t, std::size_t);
template double train_step<float>(NetParams<float>&, AdamState<float>&,
                                  const TrainingBatch<float>&, const AdamConfig&);
template double train_step<double>(NetParams<double>&, AdamState<double>&,
                                   const TrainingBatch<double>&, const AdamConfig&);
template double train_step<float>(NetParams<float>&, AdamState<float>&,
                                  const TrainingBatch<float>&, const AdamConfig&,
                                  TrainWorkspace<float>&);
template double train_step<double>(NetParams<double>&, AdamState<double>&,
                                   const TrainingBatch<double>&, const AdamConfig&,
                                   TrainWorkspace<double>&);

}  // namespace excitnet::net
