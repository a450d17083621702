#pragma once

#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Core>

#include "parosc/dissipation.hpp"
#include "parosc/floquet.hpp"

namespace parosc {

/// Gaussian state: first moments and symmetric covariance at time t.
struct CovarianceState {
  double t = 0.0;
  double mean_x = 0.0;
  double mean_p = 0.0;
  double sigma_xx = 0.0;
  double sigma_xp = 0.0;
  double sigma_pp = 0.0;

  [[nodiscard]] double det() const { return sigma_xx * sigma_pp - sigma_xp * sigma_xp; }
  /// Diagnostic only: the non-RWA schemes do not guarantee det >= hbar^2/4.
  [[nodiscard]] bool below_uncertainty(double hbar) const { return det() < 0.25 * hbar * hbar; }
};

/// Integrate the closed first/second moment equations of the scheme's
/// Fokker-Planck operator from state0.t to each of `times` (ascending, >= state0.t).
/// Non-RWA schemes require sol.gamma == diff.gamma; the RWA scheme only
/// borrows k(t) from sol. Throws StepFailure, UnstableSolution.
std::vector<CovarianceState> propagate_moments(const FloquetSolution& sol, const DiffusionSet& diff,
                                               const CovarianceState& state0,
                                               const std::vector<double>& times, double tol = 1e-9);
/// Same, sampled at n_out equidistant times from state0.t to t1 inclusive.
std::vector<CovarianceState> propagate_moments(const FloquetSolution& sol, const DiffusionSet& diff,
                                               const CovarianceState& state0, double t1,
                                               double tol = 1e-9, int n_out = 101);

/// Integrals over t' in [t0, t] of G(t,t')^2, G dG/dt and (dG/dt)^2, plus the
/// boundary values G(t,t0), dG/dt(t,t0) (zero for t0 = -infinity).
struct GreenIntegrals {
  double gg = 0.0;
  double g_dg = 0.0;
  double dg_dg = 0.0;
  double g_t0 = 0.0;
  double dg_t0 = 0.0;
};

constexpr double kMinusInfinity = -std::numeric_limits<double>::infinity();

/// Composite Gauss-Legendre panels (order 20, at most T/4 wide). An infinite
/// t0 is reduced to a single period: shifting t' by one period multiplies the
/// integrand by exp(-gamma T) or exp(-gamma T - 2i mu T), and the resulting
/// geometric series are summed exactly. OpenMP over panels, ordered reduction.
GreenIntegrals green_integrals(const FloquetSolution& sol, double t, double t0 = kMinusInfinity);
GreenIntegrals green_integrals_serial(const FloquetSolution& sol, double t, double t0 = kMinusInfinity);

/// Which diffusion weight multiplies the G integrals. Exact uses
/// D = D_pp + m gamma D_xp, the value that solves the Fokker-Planck equation;
/// LeadingOrder drops the O(gamma) correction and uses D_pp alone.
enum class DiffusionWeight { Exact, LeadingOrder };

/// Covariance of the Gaussian solution started at t0 from a sharp state
/// (t0 = -infinity: the asymptotic periodic state). For the RWA scheme this
/// forwards to rwa_asymptotic_covariance and requires t0 = -infinity.
CovarianceState asymptotic_covariance(const FloquetSolution& sol, const DiffusionSet& diff, double t,
                                      double t0 = kMinusInfinity,
                                      DiffusionWeight weight = DiffusionWeight::Exact);
/// Same covariance from precomputed integrals (lets several schemes share one quadrature).
CovarianceState covariance_from_integrals(const GreenIntegrals& I, const DiffusionSet& diff, double t,
                                          DiffusionWeight weight = DiffusionWeight::Exact);

/// Stationary Gaussian of the RWA master equation.
CovarianceState rwa_asymptotic_covariance(const FloquetSolution& sol0, double N, double t,
                                          double m = 1.0, double hbar = 1.0);

/// Density matrix in the Floquet-state basis |0>, ..., |a_max>.
struct FloquetDensityMatrix {
  int a_max = 0;
  Eigen::MatrixXcd rho;

  static FloquetDensityMatrix fock(int a_max, int level);
  /// Truncated, renormalized geometric distribution with mean N.
  static FloquetDensityMatrix thermal(int a_max, double N);

  [[nodiscard]] double trace() const;
  [[nodiscard]] double mean_level() const;
  [[nodiscard]] double population(int level) const { return rho(level, level).real(); }
};

/// RK4 integration of the RWA master equation over [0, t1] with step dt.
/// The observer, when given, sees (t, rho) after every step.
/// Throws TruncationOverflow when the top two levels hold more than 1e-8.
FloquetDensityMatrix rwa_density_propagate(
    const FloquetDensityMatrix& rho0, double N, double gamma, double t1, double dt,
    const std::function<void(double, const FloquetDensityMatrix&)>& observer = {});

/// W_{nn'}(x, p, t) = Q1^n Q2^n' W_00, a complex polynomial times the
/// asymptotic Gaussian W_00, with Q_i = f_i d/dx + m f_i' d/dp.
struct WignerFloquetState {
  int n = 0;
  int n_prime = 0;
  double t = 0.0;
  CovarianceState gaussian;
  /// poly(j, k) multiplies x^j p^k.
  Eigen::MatrixXcd poly;
  cdouble quasi_eigenvalue;

  [[nodiscard]] cdouble operator()(double x, double p) const;
  [[nodiscard]] double gaussian_value(double x, double p) const;
};

constexpr int kWignerDegreeCap = 8;

/// n(-gamma/2 + i mu) + n'(-gamma/2 - i mu); depends on nothing but mu and gamma.
cdouble wigner_floquet_exponent(const FloquetSolution& sol, int n, int n_prime);

/// Non-RWA schemes only. Throws DegreeCap when n + n' > 8, UnstableSolution.
WignerFloquetState wigner_floquet_state(const FloquetSolution& sol, const DiffusionSet& diff, int n,
                                        int n_prime, double t);

/// Periodic force sum_l a_l cos(l Omega t) + b_l sin(l Omega t), l = 0..L.
struct HarmonicForce {
  double Omega = 1.0;
  std::vector<double> a;
  std::vector<double> b;

  [[nodiscard]] double operator()(double t) const;
};

enum class SpectralModel { Ohmic, Drude };

/// Bath-corrected additive force at the given times. For an Ohmic bath the
/// correction vanishes identically and F is returned unchanged; for a Drude
/// bath the triple integral is reduced with the closed-form sine transform of
/// I(w) and evaluated by nested Gauss-Legendre quadrature of the given order.
std::vector<double> effective_force(const std::function<double(double)>& F,
                                    const FloquetSolution& sol0, const BathSpec& bath,
                                    SpectralModel model, const std::vector<double>& times,
                                    int order = 20);
/// Harmonic-by-harmonic closed form of the same correction.
std::vector<double> effective_force(const HarmonicForce& F, const FloquetSolution& sol0,
                                    const BathSpec& bath, SpectralModel model,
                                    const std::vector<double>& times);

/// Moments with an additive force: means gain (1/m) int G F, covariances are
/// exactly those of propagate_moments.
std::vector<CovarianceState> mean_response_with_force(const FloquetSolution& sol,
                                                      const DiffusionSet& diff,
                                                      const std::function<double(double)>& F,
                                                      const CovarianceState& state0,
                                                      const std::vector<double>& times,
                                                      double tol = 1e-9);

}  // namespace parosc
