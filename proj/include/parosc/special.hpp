#pragma once

#include <complex>

namespace parosc {

/// Euler-Mascheroni constant.
inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

/// Digamma function psi(x) = d ln Gamma(x)/dx for real x (poles at x = 0, -1, ...).
/// Shifts the argument above 10 with psi(x) = psi(x+1) - 1/x, then uses the
/// asymptotic series; negative arguments go through the reflection formula.
double digamma(double x);

/// coth(x); caller guarantees x != 0.
double coth(double x);

/// x coth(x), continuous at x = 0 where it equals 1.
double x_coth(double x);

/// Complex analogues used when a Floquet index leaves the real axis.
std::complex<double> coth(std::complex<double> z);
std::complex<double> x_coth(std::complex<double> z);

}  // namespace parosc
