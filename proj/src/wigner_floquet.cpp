#include <cmath>
#include <numbers>
#include <stdexcept>

#include "parosc/errors.hpp"
#include "parosc/evolution.hpp"

namespace parosc {

namespace {

/// Apply f d/dx + g d/dp to P(x,p) exp(-(a x^2 + 2 b x p + c p^2)/2).
Eigen::MatrixXcd apply_q(const Eigen::MatrixXcd& P, cdouble f, cdouble g, double a, double b, double c) {
  const Eigen::Index n = P.rows();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n + 1, n + 1);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; j + k < n; ++k) {
      const cdouble v = P(j, k);
      if (v == 0.0) continue;
      if (j > 0) out(j - 1, k) += f * double(j) * v;
      if (k > 0) out(j, k - 1) += g * double(k) * v;
      // Gaussian derivative: -(a x + b p) from d/dx, -(b x + c p) from d/dp
      out(j + 1, k) -= (f * a + g * b) * v;
      out(j, k + 1) -= (f * b + g * c) * v;
    }
  }
  return out;
}

}  // namespace

cdouble wigner_floquet_exponent(const FloquetSolution& sol, int n, int n_prime) {
  const cdouble i(0.0, 1.0);
  const double hg = -0.5 * sol.gamma;
  return double(n) * (hg + i * sol.mu) + double(n_prime) * (hg - i * sol.mu);
}

WignerFloquetState wigner_floquet_state(const FloquetSolution& sol, const DiffusionSet& diff, int n,
                                        int n_prime, double t) {
  if (n < 0 || n_prime < 0) throw std::invalid_argument("wigner_floquet_state: negative index");
  if (n + n_prime > kWignerDegreeCap)
    throw DegreeCap("wigner_floquet_state: n + n' = " + std::to_string(n + n_prime) + " exceeds " +
                    std::to_string(kWignerDegreeCap));
  if (!sol.stable) throw UnstableSolution("wigner_floquet_state");
  if (diff.scheme == Scheme::RWA)
    throw std::invalid_argument("wigner_floquet_state: the Q-operator construction needs a non-RWA scheme");

  WignerFloquetState w;
  w.n = n;
  w.n_prime = n_prime;
  w.t = t;
  w.gaussian = asymptotic_covariance(sol, diff, t);
  w.quasi_eigenvalue = wigner_floquet_exponent(sol, n, n_prime);

  const double det = w.gaussian.det();
  if (!(det > 0.0)) throw NumericalError("wigner_floquet_state: asymptotic covariance is not positive definite");
  const double a = w.gaussian.sigma_pp / det;
  const double b = -w.gaussian.sigma_xp / det;
  const double c = w.gaussian.sigma_xx / det;

  const auto fs = fundamental_solutions(sol, t);
  const double m = diff.m;
  Eigen::MatrixXcd P = Eigen::MatrixXcd::Ones(1, 1);
  for (int i = 0; i < n_prime; ++i) P = apply_q(P, fs.f2, m * fs.df2, a, b, c);
  for (int i = 0; i < n; ++i) P = apply_q(P, fs.f1, m * fs.df1, a, b, c);
  w.poly = std::move(P);
  return w;
}

double WignerFloquetState::gaussian_value(double x, double p) const {
  const double det = gaussian.det();
  const double q = (gaussian.sigma_pp * x * x - 2.0 * gaussian.sigma_xp * x * p + gaussian.sigma_xx * p * p) / det;
  return std::exp(-0.5 * q) / (2.0 * std::numbers::pi * std::sqrt(det));
}

cdouble WignerFloquetState::operator()(double x, double p) const {
  cdouble s = 0.0;
  const Eigen::Index deg = poly.rows();
  double xj = 1.0;
  for (Eigen::Index j = 0; j < deg; ++j, xj *= x) {
    double pk = 1.0;
    for (Eigen::Index k = 0; j + k < deg; ++k, pk *= p) s += poly(j, k) * xj * pk;
  }
  return s * gaussian_value(x, p);
}

}  // namespace parosc
