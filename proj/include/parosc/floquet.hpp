#pragma once

#include <complex>
#include <vector>

#include "parosc/stiffness.hpp"

namespace parosc {

using cdouble = std::complex<double>;

/// Floquet solution of  y'' + (k(t)/m - gamma^2/4) y = 0:
///   xi1(t) = exp(i mu t) sum_n c_n exp(i n Omega t),   xi2(t) = xi1(-t).
///
/// mu is reported on the zone branch: Re mu / (Omega/2) lies in the window of
/// the stability zone, equal to sqrt(omega0^2 - gamma^2/4) in the undriven
/// limit. Coefficients are normalized by the sum rule sum c_n^2 (mu + n Omega) = 1.
struct FloquetSolution {
  PeriodicStiffness stiffness = Mathieu{};
  double gamma = 0.0;
  cdouble mu;
  int n_max = 0;
  /// Real coefficients c_{-n_max}..c_{n_max}; empty when the solution is unstable.
  std::vector<double> coeffs;
  /// Same coefficients in complex form; the only ones available when unstable.
  std::vector<cdouble> coeffs_complex;
  /// Largest relative residual of the recurrence over all retained n.
  double residual = 0.0;
  bool stable = false;
  /// |Im mu| below tolerance or mu on a multiple of Omega/2: solutions are
  /// (nearly) linearly dependent and the sum-rule normalization is skipped.
  bool borderline = false;

  [[nodiscard]] double Omega() const { return stiffness.Omega(); }
  [[nodiscard]] double period() const { return stiffness.period(); }
  [[nodiscard]] double coeff(int n) const {
    return (n < -n_max || n > n_max || coeffs.empty()) ? 0.0 : coeffs[std::size_t(n + n_max)];
  }
  /// mu + n Omega for the real part of mu.
  [[nodiscard]] double frequency(int n) const { return mu.real() + n * Omega(); }
  /// sum_n c_n^2 (mu + n Omega); 1 after normalization.
  [[nodiscard]] double sum_rule() const;
  /// A = sum_n c_n^2, the weight of the conservative-limit variances.
  [[nodiscard]] double weight_A() const;
  /// Ratio of the largest edge coefficient to the largest coefficient.
  [[nodiscard]] double edge_ratio() const;
};

/// Solve the Floquet problem by continued fractions (Mathieu) or the banded
/// recurrence (general cosine series), starting from a monodromy estimate.
/// Truncation n_max is doubled until the edge coefficients fall below 1e-12
/// of the maximum.
/// Throws NoConvergence, TruncationTooSmall, std::invalid_argument.
FloquetSolution solve_floquet(const PeriodicStiffness& k, double gamma, double tol = 1e-10,
                              int n_max = 32);

/// Same solution with mu -> mu + shift*Omega and c_n -> c_{n+shift}.
FloquetSolution shift_brillouin(const FloquetSolution& sol, int shift);

/// Trace of the one-period monodromy matrix of y'' + q(t) y = 0 (direct ODE integration).
double monodromy_trace(const PeriodicStiffness& k, double gamma);

struct FundamentalSolutions {
  cdouble xi1, xi2, dxi1, dxi2;
  cdouble ddxi1, ddxi2;
  /// f_i = exp(-gamma t/2) xi_i and derivatives.
  cdouble f1, f2, df1, df2;
};

/// Analytic series evaluation at time t. Throws UnstableSolution.
FundamentalSolutions fundamental_solutions(const FloquetSolution& sol, double t);

/// xi1(t) and its first two derivatives, without the stability check.
struct XiValue {
  cdouble xi, dxi, ddxi;
};
XiValue xi1_series(const FloquetSolution& sol, double t);

/// G(t,t') and its partial derivatives.
struct GreenValue {
  double g = 0.0;
  double dt = 0.0;     ///< dG/dt
  double dtp = 0.0;    ///< dG/dt'
  double dtt = 0.0;    ///< d2G/dt2
  double dtdtp = 0.0;  ///< d2G/dt dt'
};

/// Retarded Green function of x'' + gamma x' + k(t)/m x = 0 normalized so that
/// dG/dt = 1 at coincidence. Throws UnstableSolution.
GreenValue green_function(const FloquetSolution& sol, double t, double tp);

struct PhasePoint {
  double x = 0.0;
  double p = 0.0;
};

/// Classical trajectory with x(t0) = x0, p(t0) = p0 and p = m dx/dt.
PhasePoint classical_trajectory(const FloquetSolution& sol, double x0, double p0, double t0,
                                double t, double m = 1.0);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct ChartRecord {
  double omega0_sq = 0.0;
  double eps = 0.0;
  double mu_re = 0.0;
  double mu_im = 0.0;
  bool stable = false;
  bool converged = true;
};

/// Mathieu stability chart on an n0 x ne grid; rows ordered omega0_sq-major.
/// Parallel over grid nodes.
std::vector<ChartRecord> stability_chart(Range omega0_sq, Range eps, int n0, int ne, double gamma,
                                         double Omega = 1.0, double tol = 1e-10);
/// Single-threaded reference of stability_chart.
std::vector<ChartRecord> stability_chart_serial(Range omega0_sq, Range eps, int n0, int ne,
                                                double gamma, double Omega = 1.0,
                                                double tol = 1e-10);

}  // namespace parosc
