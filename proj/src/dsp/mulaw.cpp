#include <algorithm>
#include <cmath>

#include "excitnet/dsp.hpp"

namespace excitnet::dsp {

MuLaw::MuLaw(double mu, int n_classes) : mu_(mu), n_classes_(n_classes), log1p_mu_(std::log1p(mu)) {
  if (!(mu > 0.0) || n_classes < 2 || n_classes % 2 != 0) throw Error("invalid mu-law parameters");
}

int MuLaw::encode(double x) const {
  x = std::clamp(x, -1.0, 1.0);
  const double f = std::copysign(std::log1p(mu_ * std::abs(x)) / log1p_mu_, x);
  const double bin = std::floor((f + 1.0) * 0.5 * n_classes_);
  return static_cast<int>(std::clamp(bin, 0.0, static_cast<double>(n_classes_ - 1)));
}

double MuLaw::decode(int code) const {
  if (code < 0 || code >= n_classes_) throw Error("mu-law code out of range");
  const double y = (code + 0.5) / (0.5 * n_classes_) - 1.0;
  return std::copysign(std::expm1(std::abs(y) * log1p_mu_) / mu_, y);
}

int mu_law_encode(double x, double mu) { return MuLaw(mu).encode(x); }
double mu_law_decode(int code, double mu) { return MuLaw(mu).decode(code); }

}  // namespace excitnet::dsp
