#include "parosc/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace parosc {

double digamma(double x) {
  if (std::isnan(x)) return x;
  if (x <= 0.0 && x == std::floor(x)) return std::numeric_limits<double>::quiet_NaN();
  if (x < 0.0) {
    // psi(1 - x) - psi(x) = pi cot(pi x)
    return digamma(1.0 - x) - std::numbers::pi / std::tan(std::numbers::pi * x);
  }
  double result = 0.0;
  while (x < 10.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  // psi(x) ~ ln x - 1/2x - sum B_2k / (2k x^2k)
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  const double series =
      inv2 * (1.0 / 12.0 -
              inv2 * (1.0 / 120.0 -
                      inv2 * (1.0 / 252.0 -
                              inv2 * (1.0 / 240.0 -
                                      inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
  return result + std::log(x) - 0.5 * inv - series;
}

double coth(double x) { return 1.0 / std::tanh(x); }

double x_coth(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-4) {
    const double x2 = x * x;
    return 1.0 + x2 / 3.0 - x2 * x2 / 45.0;
  }
  return x / std::tanh(x);
}

std::complex<double> coth(std::complex<double> z) { return 1.0 / std::tanh(z); }

std::complex<double> x_coth(std::complex<double> z) {
  if (std::abs(z) < 1e-4) {
    const auto z2 = z * z;
    return 1.0 + z2 / 3.0 - z2 * z2 / 45.0;
  }
  return z / std::tanh(z);
}

}  // namespace parosc
