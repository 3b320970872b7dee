#include "excitnet/net/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "activations.hpp"
#include "excitnet/net/kernels.hpp"

namespace excitnet::net {

using detail::add_column_sums;
using detail::fill_rows;
using detail::gate_activations;

namespace {

// Resizes without clearing; callers overwrite every element.
template <typename T>
void reshape(Matrix<T>& m, std::size_t rows, std::size_t cols) {
  m.rows = rows;
  m.cols = cols;
  m.data.resize(rows * cols);
}

template <typename T>
void reshape_zero(Matrix<T>& m, std::size_t rows, std::size_t cols) {
  reshape(m, rows, cols);
  std::fill(m.data.begin(), m.data.end(), T{0});
}

}  // namespace

template <typename T>
ConditionRuns find_condition_runs(const Matrix<T>& conditions) {
  ConditionRuns runs;
  runs.run_of_row.resize(conditions.rows);
  const std::size_t bytes = conditions.cols * sizeof(T);
  for (std::size_t r = 0; r < conditions.rows; ++r) {
    if (r == 0 || std::memcmp(conditions.row(r), conditions.row(r - 1), bytes) != 0)
      runs.first_row.push_back(r);
    runs.run_of_row[r] = runs.first_row.size() - 1;
  }
  return runs;
}

std::vector<int> shift_inputs(std::span<const int> codes) {
  std::vector<int> in(codes.size());
  if (!codes.empty()) in[0] = kZeroAmplitudeCode;
  for (std::size_t t = 1; t < codes.size(); ++t) in[t] = codes[t - 1];
  return in;
}

template <typename T>
void forward_inputs(const NetParams<T>& p, std::span<const int> inputs,
                    const Matrix<T>& conditions, ForwardCache<T>& c) {
  const auto& cfg = p.config;
  const std::size_t n = inputs.size();
  if (conditions.rows != n || conditions.cols != cfg.cond_dim)
    throw Error("condition matrix is " + std::to_string(conditions.rows) + "x" +
                std::to_string(conditions.cols) + ", expected " + std::to_string(n) + "x" +
                std::to_string(cfg.cond_dim));
  const std::size_t R = cfg.residual_channels, G = cfg.gate_channels, G2 = 2 * G;
  const std::size_t S = cfg.skip_channels, H = cfg.head_channels, K = cfg.n_classes;
  const std::size_t C = cfg.cond_dim;

  c.inputs.assign(inputs.begin(), inputs.end());
  c.runs = find_condition_runs(conditions);
  const std::size_t n_runs = c.runs.first_row.size();
  reshape(c.unique_conditions, n_runs, C);
  for (std::size_t r = 0; r < n_runs; ++r)
    std::copy_n(conditions.row(c.runs.first_row[r]), C, c.unique_conditions.row(r));

  c.layers.resize(p.layers.size());
  reshape(c.layers.front().input, n, R);
  for (std::size_t t = 0; t < n; ++t) {
    const int code = inputs[t];
    if (code < 0 || static_cast<std::size_t>(code) >= K) throw Error("input code out of range");
    std::copy_n(p.embed.data.data() + static_cast<std::size_t>(code) * R, R, c.layers.front().input.row(t));
  }

  reshape(c.skip_sum, n, S);
  std::fill(c.skip_sum.data.begin(), c.skip_sum.data.end(), T{0});
  auto& w = c.work;
  auto& z = w.z;
  auto& proj = w.proj;
  auto& sk = w.sk;
  auto& res = w.res;
  reshape(z, n, G2);
  reshape(proj, n_runs, G2);
  reshape(sk, n, S);
  reshape(res, n, R);
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    const auto& lp = p.layers[l];
    auto& lc = c.layers[l];
    const std::size_t d = lp.dilation;

    fill_rows(z.data.data(), n, lp.conv_b.data.data(), G2);
    kernels::gemm_acc(lc.input.data.data(), n, R, lp.conv_w.data.data() + R * G2, G2,
                      z.data.data());
    if (n > d)
      kernels::gemm_acc(lc.input.data.data(), n - d, R, lp.conv_w.data.data(), G2, z.row(d));
    std::fill(proj.data.begin(), proj.data.end(), T{0});
    kernels::gemm_acc(c.unique_conditions.data.data(), n_runs, C, lp.cond_w.data.data(), G2,
                      proj.data.data());
    for (std::size_t t = 0; t < n; ++t) {
      T* zt = z.row(t);
      const T* pt = proj.row(c.runs.run_of_row[t]);
      for (std::size_t k = 0; k < G2; ++k) zt[k] += pt[k];
    }

    reshape(lc.filter, n, G);
    reshape(lc.gate, n, G);
    reshape(lc.gated, n, G);
    for (std::size_t t = 0; t < n; ++t)
      gate_activations(z.row(t), G, lc.filter.row(t), lc.gate.row(t), lc.gated.row(t));

    fill_rows(sk.data.data(), n, lp.skip_b.data.data(), S);
    kernels::gemm_acc(lc.gated.data.data(), n, G, lp.skip_w.data.data(), S, sk.data.data());
    for (std::size_t k = 0; k < n * S; ++k) c.skip_sum.data[k] += sk.data[k];

    // The last layer's residual output feeds nothing.
    if (l + 1 < p.layers.size()) {
      fill_rows(res.data.data(), n, lp.res_b.data.data(), R);
      kernels::gemm_acc(lc.gated.data.data(), n, G, lp.res_w.data.data(), R, res.data.data());
      auto& next = c.layers[l + 1].input;
      reshape(next, n, R);
      for (std::size_t k = 0; k < n * R; ++k) next.data[k] = lc.input.data[k] + res.data[k];
    }
  }

  auto& relu_skip = w.relu_skip;
  reshape(relu_skip, n, S);
  for (std::size_t k = 0; k < n * S; ++k) relu_skip.data[k] = std::max(c.skip_sum.data[k], T{0});
  reshape(c.head_hidden, n, H);
  fill_rows(c.head_hidden.data.data(), n, p.out1_b.data.data(), H);
  kernels::gemm_acc(relu_skip.data.data(), n, S, p.out1_w.data.data(), H,
                    c.head_hidden.data.data());
  for (auto& v : c.head_hidden.data) v = std::max(v, T{0});
  reshape(c.logits, n, K);
  fill_rows(c.logits.data.data(), n, p.out2_b.data.data(), K);
  kernels::gemm_acc(c.head_hidden.data.data(), n, H, p.out2_w.data.data(), K,
                    c.logits.data.data());
}

template <typename T>
Matrix<T> forward(const NetParams<T>& params, std::span<const int> codes,
                  const Matrix<T>& conditions) {
  ForwardCache<T> cache;
  const auto inputs = shift_inputs(codes);
  forward_inputs(params, inputs, conditions, cache);
  return std::move(cache.logits);
}

namespace {

template <typename T>
std::vector<double> softmax_impl(std::span<const T> logits) {
  std::vector<double> p(logits.size());
  double mx = -INFINITY;
  for (T v : logits) mx = std::max(mx, static_cast<double>(v));
  double sum = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) sum += p[k] = std::exp(logits[k] - mx);
  for (auto& v : p) v /= sum;
  return p;
}

template <typename T>
double row_nll(const T* row, std::size_t k, int target) {
  double mx = -INFINITY;
  for (std::size_t j = 0; j < k; ++j) mx = std::max(mx, static_cast<double>(row[j]));
  double sum = 0.0;
  for (std::size_t j = 0; j < k; ++j) sum += std::exp(static_cast<double>(row[j]) - mx);
  return mx + std::log(sum) - static_cast<double>(row[target]);
}

void check_targets(std::size_t rows, std::size_t k, std::span<const int> targets,
                   std::size_t begin) {
  if (targets.size() != rows) throw Error("target length does not match logits");
  if (begin >= rows) throw Error("empty loss range");
  for (int t : targets)
    if (t < 0 || static_cast<std::size_t>(t) >= k) throw Error("target code out of range");
}

}  // namespace

std::vector<double> softmax_row(std::span<const float> logits) { return softmax_impl(logits); }
std::vector<double> softmax_row(std::span<const double> logits) { return softmax_impl(logits); }

template <typename T>
double loss_nll(const Matrix<T>& logits, std::span<const int> targets, std::size_t begin) {
  check_targets(logits.rows, logits.cols, targets, begin);
  double total = 0.0;
  for (std::size_t t = begin; t < logits.rows; ++t)
    total += row_nll(logits.row(t), logits.cols, targets[t]);
  return total / static_cast<double>(logits.rows - begin);
}

template <typename T>
double backward(const NetParams<T>& p, const ForwardCache<T>& c, std::span<const int> targets,
                std::size_t begin, NetParams<T>& grads) {
  const auto& cfg = p.config;
  const std::size_t n = c.logits.rows;
  check_targets(n, c.logits.cols, targets, begin);
  const std::size_t R = cfg.residual_channels, G = cfg.gate_channels, G2 = 2 * G;
  const std::size_t S = cfg.skip_channels, H = cfg.head_channels, K = cfg.n_classes;
  const std::size_t C = cfg.cond_dim;
  const double scale = 1.0 / static_cast<double>(n - begin);

  auto& w = c.work;
  auto& dlogits = w.dlogits;
  reshape_zero(dlogits, n, K);
  double loss = 0.0;
  std::vector<double> e(K);
  for (std::size_t t = begin; t < n; ++t) {
    const T* row = c.logits.row(t);
    double mx = -INFINITY;
    for (std::size_t k = 0; k < K; ++k) mx = std::max(mx, static_cast<double>(row[k]));
    double sum = 0.0;
    for (std::size_t k = 0; k < K; ++k) sum += e[k] = std::exp(static_cast<double>(row[k]) - mx);
    loss += mx + std::log(sum) - static_cast<double>(row[targets[t]]);
    const double norm = scale / sum;
    T* d = dlogits.row(t);
    for (std::size_t k = 0; k < K; ++k) d[k] = static_cast<T>(e[k] * norm);
    d[targets[t]] -= static_cast<T>(scale);
  }
  loss *= scale;

  add_column_sums(dlogits.data.data(), n, K, grads.out2_b.data.data());
  kernels::gemm_tn_acc(c.head_hidden.data.data(), n, H, dlogits.data.data(), K,
                       grads.out2_w.data.data());
  auto& dhid = w.dhid;
  reshape_zero(dhid, n, H);
  kernels::gemm_nt_acc(dlogits.data.data(), n, K, p.out2_w.data.data(), H, dhid.data.data());
  for (std::size_t k = 0; k < n * H; ++k)
    if (!(c.head_hidden.data[k] > T{0})) dhid.data[k] = T{0};

  const auto& relu_skip = w.relu_skip;
  add_column_sums(dhid.data.data(), n, H, grads.out1_b.data.data());
  kernels::gemm_tn_acc(relu_skip.data.data(), n, S, dhid.data.data(), H,
                       grads.out1_w.data.data());
  auto& dskip = w.dskip;
  reshape_zero(dskip, n, S);
  kernels::gemm_nt_acc(dhid.data.data(), n, H, p.out1_w.data.data(), S, dskip.data.data());
  for (std::size_t k = 0; k < n * S; ++k)
    if (!(c.skip_sum.data[k] > T{0})) dskip.data[k] = T{0};

  const std::size_t n_runs = c.unique_conditions.rows;
  auto& dh = w.dh;
  auto& du = w.du;
  auto& dz = w.dz;
  auto& dzu = w.dzu;
  reshape_zero(dh, n, R);
  reshape(du, n, G);
  reshape(dz, n, G2);
  reshape(dzu, n_runs, G2);
  for (std::size_t li = p.layers.size(); li-- > 0;) {
    const auto& lp = p.layers[li];
    const auto& lc = c.layers[li];
    auto& lg = grads.layers[li];
    const std::size_t d = lp.dilation;
    const bool has_residual_out = li + 1 < p.layers.size();

    std::fill(du.data.begin(), du.data.end(), T{0});
    kernels::gemm_nt_acc(dskip.data.data(), n, S, lp.skip_w.data.data(), G, du.data.data());
    add_column_sums(dskip.data.data(), n, S, lg.skip_b.data.data());
    kernels::gemm_tn_acc(lc.gated.data.data(), n, G, dskip.data.data(), S,
                         lg.skip_w.data.data());
    if (has_residual_out) {
      kernels::gemm_nt_acc(dh.data.data(), n, R, lp.res_w.data.data(), G, du.data.data());
      add_column_sums(dh.data.data(), n, R, lg.res_b.data.data());
      kernels::gemm_tn_acc(lc.gated.data.data(), n, G, dh.data.data(), R,
                           lg.res_w.data.data());
    }

    for (std::size_t t = 0; t < n; ++t) {
      const T* a = lc.filter.row(t);
      const T* g = lc.gate.row(t);
      const T* dut = du.row(t);
      T* dzt = dz.row(t);
      for (std::size_t k = 0; k < G; ++k) {
        dzt[k] = dut[k] * g[k] * (T(1) - a[k] * a[k]);
        dzt[G + k] = dut[k] * a[k] * g[k] * (T(1) - g[k]);
      }
    }

    add_column_sums(dz.data.data(), n, G2, lg.conv_b.data.data());
    kernels::gemm_tn_acc(lc.input.data.data(), n, R, dz.data.data(), G2,
                         lg.conv_w.data.data() + R * G2);
    if (n > d)
      kernels::gemm_tn_acc(lc.input.data.data(), n - d, R, dz.row(d), G2,
                           lg.conv_w.data.data());
    std::fill(dzu.data.begin(), dzu.data.end(), T{0});
    for (std::size_t t = 0; t < n; ++t) {
      T* acc = dzu.row(c.runs.run_of_row[t]);
      const T* src = dz.row(t);
      for (std::size_t k = 0; k < G2; ++k) acc[k] += src[k];
    }
    kernels::gemm_tn_acc(c.unique_conditions.data.data(), n_runs, C, dzu.data.data(), G2,
                         lg.cond_w.data.data());

    // dh currently holds the gradient of this layer's output, which is also the
    // residual path's contribution to its input.
    kernels::gemm_nt_acc(dz.data.data(), n, G2, lp.conv_w.data.data() + R * G2, R,
                         dh.data.data());
    if (n > d)
      kernels::gemm_nt_acc(dz.row(d), n - d, G2, lp.conv_w.data.data(), R, dh.data.data());
  }

  for (std::size_t t = 0; t < n; ++t) {
    T* e = grads.embed.data.data() + static_cast<std::size_t>(c.inputs[t]) * R;
    const T* src = dh.row(t);
    for (std::size_t k = 0; k < R; ++k) e[k] += src[k];
  }
  return loss;
}

#define EXCITNET_INSTANTIATE(T)                                                               \
  template ConditionRuns find_condition_runs<T>(const Matrix<T>&);                            \
  template void forward_inputs<T>(const NetParams<T>&, std::span<const int>, const Matrix<T>&, \
                                  ForwardCache<T>&);                                          \
  template Matrix<T> forward<T>(const NetParams<T>&, std::span<const int>, const Matrix<T>&); \
  template double loss_nll<T>(const Matrix<T>&, std::span<const int>, std::size_t);           \
  template double backward<T>(const NetParams<T>&, const ForwardCache<T>&,                    \
                              std::span<const int>, std::size_t, NetParams<T>&);

EXCITNET_INSTANTIATE(float)
EXCITNET_INSTANTIATE(double)

#undef EXCITNET_INSTANTIATE

}  // namespace excitnet::net
