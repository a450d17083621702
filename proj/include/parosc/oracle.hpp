#pragma once

#include <vector>

#include "parosc/dissipation.hpp"
#include "parosc/evolution.hpp"

namespace parosc {

/// Symmetrized bath force correlation
///   K(tau) = (hbar/pi) int_0^inf dw I(w) coth(hbar w / 2kT) cos(w tau)
/// for the Drude-cut Ohmic density, summed over Matsubara frequencies
/// nu_k = 2 pi k kT / hbar. The sum of exp(-nu_k tau)/nu_k is done in closed
/// form, so the series converges like 1/k^2 even at small tau. K diverges
/// logarithmically at tau = 0.
class NoiseKernel {
 public:
  explicit NoiseKernel(BathSpec bath, int matsubara_terms = 20000);

  [[nodiscard]] double operator()(double tau) const;
  [[nodiscard]] std::vector<double> sample(const std::vector<double>& taus) const;
  [[nodiscard]] const BathSpec& bath() const { return bath_; }
  /// Noise power (hbar/pi) I(w) coth(hbar w / 2kT), so that K(tau) = int_0^inf S(w) cos(w tau) dw.
  [[nodiscard]] double spectrum(double omega) const;

 private:
  BathSpec bath_;
  int terms_;
};

/// Asymptotic covariance of the linear quantum Langevin equation
///   m x'' + m gamma x' + k(t) x = xi(t),  <{xi(t), xi(s)}>/2 = K(t - s),
/// evaluated as a frequency integral of the noise power against the
/// analytic Fourier transforms of G(t, .) and dG/dt(t, .). Adaptive
/// Gauss-Kronrod between the quasienergy resonances, OpenMP over intervals.
/// Throws UnstableSolution, QuadratureBudget.
CovarianceState exact_variances(const FloquetSolution& sol, const NoiseKernel& kernel, double t,
                                double tol = 1e-9);
CovarianceState exact_variances_serial(const FloquetSolution& sol, const NoiseKernel& kernel, double t,
                                       double tol = 1e-9);

}  // namespace parosc
