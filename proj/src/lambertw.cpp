#include <cmath>
#include <limits>
#include <stdexcept>

#include "nlsym/evaluate.hpp"

namespace nlsym {

namespace {

constexpr double kInvE = 0.36787944117144232159552377016146;
constexpr double kTol = 1e-14;
constexpr int kMaxIter = 50;

}  // namespace

double lambert_w0(double z) {
  if (std::isnan(z)) return z;
  if (z < -kInvE) {
    if (z > -kInvE - 1e-15) return -1.0;
    throw std::domain_error("lambertW argument below -1/e");
  }
  if (z == 0.0) return 0.0;
  if (z == std::numeric_limits<double>::infinity()) return z;

  double w;
  if (z < -0.25) {
    double p = std::sqrt(2.0 * (std::exp(1.0) * z + 1.0));
    w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  } else if (z < 3.0) {
    double l = std::log1p(z);
    w = l * (1.0 - std::log1p(l) / (2.0 + l));
  } else {
    double l1 = std::log(z), l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }

  for (int i = 0; i < kMaxIter; ++i) {
    double ew = std::exp(w);
    double f = w * ew - z;
    double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    double dw = f / denom;
    w -= dw;
    if (std::fabs(dw) <= kTol * (1.0 + std::fabs(w))) break;
  }
  return w;
}

Complex lambert_w0(Complex z) {
  if (z.imag() == 0.0 && z.real() >= -kInvE) return lambert_w0(z.real());
  Complex w;
  Complex p = std::sqrt(2.0 * (std::exp(1.0) * z + 1.0));
  if (std::abs(z + kInvE) < 0.3) {
    w = -1.0 + p - p * p / 3.0;
  } else if (std::abs(z) < 1.0) {
    w = z * (1.0 - z);
  } else {
    Complex l1 = std::log(z);
    w = l1 - std::log(l1);
  }
  for (int i = 0; i < kMaxIter; ++i) {
    Complex ew = std::exp(w);
    Complex f = w * ew - z;
    Complex wp1 = w + 1.0;
    if (std::abs(wp1) == 0.0) break;
    Complex dw = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    w -= dw;
    if (std::abs(dw) <= kTol * (1.0 + std::abs(w))) break;
  }
  return w;
}

}  // namespace nlsym
