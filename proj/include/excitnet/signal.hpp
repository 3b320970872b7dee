#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace excitnet {

/// Raised for every contract violation and runtime failure in the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kDefaultSampleRate = 24000;

/// Mono floating-point audio.
struct Signal {
  std::vector<double> samples;
  int sample_rate = kDefaultSampleRate;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
};

/// Throws if the sample rate is not positive or any sample is NaN/Inf.
void validate(const Signal& signal);

/// Row-major dense matrix used for condition streams and network activations.
template <typename T>
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<T> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, T fill = T{}) : rows(r), cols(c), data(r * c, fill) {}

  T* row(std::size_t r) { return data.data() + r * cols; }
  const T* row(std::size_t r) const { return data.data() + r * cols; }
  T& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  bool operator==(const Matrix&) const = default;
};

}  // namespace excitnet
