#include <algorithm>
#include <cmath>
#include <numbers>

#include "excitnet/dsp.hpp"

namespace excitnet::dsp {
namespace {

constexpr std::size_t kGridPoints = 2048;
constexpr std::size_t kMaxGridRefinements = 4;
constexpr double kBisectionTolerance = 1e-12;

// Symmetric polynomial s (degree m, m even) evaluated on the unit circle with the
// linear phase removed: s_{m/2} + 2 sum_{j=1}^{m/2} s_{m/2-j} T_j(cos w). Clenshaw.
class CosineSeries {
 public:
  explicit CosineSeries(const std::vector<double>& sym) {
    const std::size_t half = (sym.size() - 1) / 2;
    coef_.resize(half + 1);
    coef_[0] = sym[half];
    for (std::size_t j = 1; j <= half; ++j) coef_[j] = 2.0 * sym[half - j];
  }

  double operator()(double w) const {
    const double x = std::cos(w);
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t j = coef_.size() - 1; j >= 1; --j) {
      const double b0 = 2.0 * x * b1 - b2 + coef_[j];
      b2 = b1;
      b1 = b0;
    }
    return coef_[0] + x * b1 - b2;
  }

  std::size_t root_count() const { return coef_.size() - 1; }

 private:
  std::vector<double> coef_;
};

std::vector<double> find_roots(const CosineSeries& f, std::size_t grid_points) {
  std::vector<double> roots;
  double w_lo = 0.0;
  double f_lo = f(w_lo);
  for (std::size_t i = 1; i < grid_points; ++i) {
    const double w_hi = std::numbers::pi * static_cast<double>(i) /
                        static_cast<double>(grid_points - 1);
    const double f_hi = f(w_hi);
    if (f_hi == 0.0) {
      if (i + 1 < grid_points) roots.push_back(w_hi);
    } else if (f_lo != 0.0 && (f_lo < 0.0) != (f_hi < 0.0)) {
      double a = w_lo, b = w_hi, fa = f_lo;
      while (b - a > kBisectionTolerance) {
        const double mid = 0.5 * (a + b);
        const double fm = f(mid);
        if (fm == 0.0) {
          a = b = mid;
          break;
        }
        if ((fm < 0.0) == (fa < 0.0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    w_lo = w_hi;
    f_lo = f_hi;
  }
  return roots;
}

// coefficients of A(z) = 1 - sum a_k z^-k, padded to length p + 2
std::vector<double> padded_inverse_filter(const LpcFrame& lpc) {
  std::vector<double> c(lpc.order() + 2, 0.0);
  c[0] = 1.0;
  for (std::size_t k = 0; k < lpc.order(); ++k) c[k + 1] = -lpc.a[k];
  return c;
}

std::vector<double> multiply(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> out(x.size() + y.size() - 1, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) out[i + j] += x[i] * y[j];
  return out;
}

// prod_i (1 - 2 cos(w_i) z^-1 + z^-2) for ascending w. Factors are taken
// alternately from the low and high ends so intermediate coefficients stay
// small; the naive order loses about four digits at order 40.
std::vector<double> product_of_quadratics(std::span<const double> w) {
  std::vector<double> poly{1.0};
  std::size_t lo = 0, hi = w.size();
  for (bool from_low = true; lo < hi; from_low = !from_low) {
    const double wi = from_low ? w[lo++] : w[--hi];
    poly = multiply(poly, {1.0, -2.0 * std::cos(wi), 1.0});
  }
  return poly;
}

}  // namespace

LsfFrame lpc_to_lsf(const LpcFrame& lpc) {
  const std::size_t p = lpc.order();
  if (p == 0) return {};
  const auto c = padded_inverse_filter(lpc);
  const std::size_t n = p + 2;
  std::vector<double> sum(n), diff(n);
  for (std::size_t k = 0; k < n; ++k) {
    sum[k] = c[k] + c[n - 1 - k];
    diff[k] = c[k] - c[n - 1 - k];
  }

  // Strip the trivial roots at w = 0 and/or w = pi so both series are symmetric
  // with an even degree.
  std::vector<double> p_red, q_red;
  if (p % 2 == 0) {
    p_red.resize(p + 1);
    q_red.resize(p + 1);
    p_red[0] = sum[0];
    q_red[0] = diff[0];
    for (std::size_t k = 1; k <= p; ++k) {
      p_red[k] = sum[k] - p_red[k - 1];  // / (1 + z^-1)
      q_red[k] = diff[k] + q_red[k - 1];  // / (1 - z^-1)
    }
  } else {
    p_red = sum;
    q_red.resize(p);
    for (std::size_t k = 0; k < p; ++k)
      q_red[k] = diff[k] + (k >= 2 ? q_red[k - 2] : 0.0);  // / (1 - z^-2)
  }

  const CosineSeries fp(p_red), fq(q_red);
  for (std::size_t refine = 0, grid = kGridPoints; refine <= kMaxGridRefinements;
       ++refine, grid *= 4) {
    auto rp = find_roots(fp, grid);
    auto rq = find_roots(fq, grid);
    if (rp.size() != fp.root_count() || rq.size() != fq.root_count()) continue;

    LsfFrame out;
    out.w.reserve(p);
    for (std::size_t i = 0; i < p; ++i) out.w.push_back(i % 2 == 0 ? rp[i / 2] : rq[i / 2]);
    bool ok = out.w.front() > 0.0 && out.w.back() < std::numbers::pi;
    for (std::size_t i = 1; ok && i < p; ++i) ok = out.w[i] > out.w[i - 1];
    if (ok) return out;
    // Interleaving failed: A(z) is not minimum phase; a finer grid will not help.
    break;
  }
  throw Error("LSF conversion failed");
}

LpcFrame lsf_to_lpc(const LsfFrame& lsf) {
  const std::size_t p = lsf.order();
  for (std::size_t i = 0; i < p; ++i) {
    const double w = lsf.w[i];
    if (!(w > 0.0 && w < std::numbers::pi) || (i > 0 && !(w > lsf.w[i - 1])))
      throw Error("invalid LSF ordering");
  }
  std::vector<double> wp, wq;
  for (std::size_t i = 0; i < p; ++i) (i % 2 == 0 ? wp : wq).push_back(lsf.w[i]);

  auto pp = product_of_quadratics(wp);
  auto qq = product_of_quadratics(wq);
  if (p % 2 == 0) {
    pp = multiply(pp, {1.0, 1.0});
    qq = multiply(qq, {1.0, -1.0});
  } else {
    qq = multiply(qq, {1.0, 0.0, -1.0});
  }

  LpcFrame out;
  out.a.resize(p);
  for (std::size_t k = 1; k <= p; ++k) out.a[k - 1] = -0.5 * (pp[k] + qq[k]);
  out.residual_energy = 0.0;
  return out;
}

}  // namespace excitnet::dsp
