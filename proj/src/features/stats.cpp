#include <algorithm>
#include <cmath>

#include "excitnet/features.hpp"

namespace excitnet::features {

FeatureStats compute_stats(std::span<const AcousticFeatureSequence> sequences) {
  std::size_t total = 0;
  for (const auto& s : sequences) total += s.size();
  if (total == 0) throw Error("no frames to compute statistics from");
  const auto count = static_cast<double>(total);

  FeatureStats st;
  for (const auto& s : sequences)
    for (const auto& f : s.frames)
      for (std::size_t d = 0; d < kFeatureDim; ++d) st.mean[d] += f.values[d];
  for (auto& m : st.mean) m /= count;

  // Second pass: residual mean correction plus the variance.
  std::array<double, kFeatureDim> corr{}, var{};
  for (const auto& s : sequences)
    for (const auto& f : s.frames)
      for (std::size_t d = 0; d < kFeatureDim; ++d) {
        const double dev = f.values[d] - st.mean[d];
        corr[d] += dev;
        var[d] += dev * dev;
      }
  for (std::size_t d = 0; d < kFeatureDim; ++d) {
    const double c = corr[d] / count;
    st.mean[d] += c;
    st.std[d] = std::max(std::sqrt(std::max(var[d] / count - c * c, 0.0)), kStdFloor);
  }
  // v/uv passes through unnormalized.
  st.mean[kVuvIndex] = 0.0;
  st.std[kVuvIndex] = 1.0;
  return st;
}

AcousticFeatureSequence normalize(const AcousticFeatureSequence& seq, const FeatureStats& stats) {
  auto out = seq;
  for (auto& f : out.frames)
    for (std::size_t d = 0; d < kFeatureDim; ++d)
      if (d != kVuvIndex) f.values[d] = (f.values[d] - stats.mean[d]) / stats.std[d];
  return out;
}

AcousticFeatureSequence denormalize(const AcousticFeatureSequence& seq,
                                    const FeatureStats& stats) {
  auto out = seq;
  for (auto& f : out.frames)
    for (std::size_t d = 0; d < kFeatureDim; ++d)
      if (d != kVuvIndex) f.values[d] = f.values[d] * stats.std[d] + stats.mean[d];
  return out;
}

Matrix<float> upsample_features(const AcousticFeatureSequence& seq, std::size_t shift) {
  if (shift < 1) throw Error("invalid shift");
  Matrix<float> m(seq.size() * shift, kFeatureDim);
  for (std::size_t n = 0; n < m.rows; ++n) {
    const auto& src = seq.frames[n / shift].values;
    float* dst = m.row(n);
    for (std::size_t d = 0; d < kFeatureDim; ++d) dst[d] = static_cast<float>(src[d]);
  }
  return m;
}

}  // namespace excitnet::features
