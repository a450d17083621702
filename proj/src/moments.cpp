#include <cmath>
#include <stdexcept>

#include "parosc/errors.hpp"
#include "parosc/evolution.hpp"
#include "parosc/integrator.hpp"

namespace parosc {

namespace {

using Vec5 = Eigen::Matrix<double, 5, 1>;

void check_scheme(const FloquetSolution& sol, const DiffusionSet& diff) {
  if (!sol.stable) throw UnstableSolution("propagate_moments");
  if (diff.scheme == Scheme::RWA) {
    if (!diff.rwa_basis) throw std::invalid_argument("propagate_moments: RWA set without Floquet basis");
    return;
  }
  if (std::abs(sol.gamma - diff.gamma) > 1e-14 * std::max(1.0, diff.gamma))
    throw std::invalid_argument("propagate_moments: Floquet solution and bath disagree on gamma");
}

}  // namespace

std::vector<CovarianceState> propagate_moments(const FloquetSolution& sol, const DiffusionSet& diff,
                                               const CovarianceState& state0,
                                               const std::vector<double>& times, double tol) {
  check_scheme(sol, diff);
  if (!(tol > 0.0)) throw std::invalid_argument("propagate_moments: tol must be positive");
  const double m = diff.m;
  const double g = diff.gamma;
  const PeriodicStiffness& k = sol.stiffness;

  // State (x, p, sxx, sxp, spp). Moment equations of
  //   L = -(p/m) dx + gamma dp p + k x dp + gamma D_pp dp^2 + gamma D_xp dx dp
  // and, for the RWA,
  //   L = -(p/m) dx + (gamma/2)(dx x + dp p) + k x dp
  //       + (gamma/2)(D_xx dx^2 + D_xp dx dp + D_pp dp^2).
  auto rhs_markov = [&](double t, const Vec5& y) {
    const double kt = m * k(t);
    Vec5 d;
    d(0) = y(1) / m;
    d(1) = -kt * y(0) - g * y(1);
    d(2) = 2.0 * y(3) / m;
    d(3) = y(4) / m - kt * y(2) - g * y(3) + g * diff.d_xp;
    d(4) = -2.0 * kt * y(3) - 2.0 * g * y(4) + 2.0 * g * diff.d_pp;
    return d;
  };
  auto rhs_rwa = [&](double t, const Vec5& y) {
    const double kt = m * k(t);
    const RwaCoefficients c = diff.rwa_at(t);
    Vec5 d;
    d(0) = y(1) / m - 0.5 * g * y(0);
    d(1) = -kt * y(0) - 0.5 * g * y(1);
    d(2) = 2.0 * y(3) / m - g * y(2) + g * c.d_xx;
    d(3) = y(4) / m - kt * y(2) - g * y(3) + 0.5 * g * c.d_xp;
    d(4) = -2.0 * kt * y(3) - g * y(4) + g * c.d_pp;
    return d;
  };

  Vec5 y;
  y << state0.mean_x, state0.mean_p, state0.sigma_xx, state0.sigma_xp, state0.sigma_pp;
  const double scale = std::max(y.cwiseAbs().maxCoeff(), diff.hbar);
  DormandPrince<Vec5> stepper({.rtol = tol, .atol = 1e-3 * tol * scale, .h_max = sol.period() / 8});

  std::vector<CovarianceState> out;
  out.reserve(times.size());
  double t = state0.t;
  for (double tout : times) {
    if (tout < t) throw std::invalid_argument("propagate_moments: output times must be ascending");
    if (diff.scheme == Scheme::RWA)
      stepper.advance(rhs_rwa, t, y, tout);
    else
      stepper.advance(rhs_markov, t, y, tout);
    out.push_back({tout, y(0), y(1), y(2), y(3), y(4)});
  }
  return out;
}

std::vector<CovarianceState> propagate_moments(const FloquetSolution& sol, const DiffusionSet& diff,
                                               const CovarianceState& state0, double t1, double tol,
                                               int n_out) {
  if (n_out < 2) throw std::invalid_argument("propagate_moments: n_out must be at least 2");
  std::vector<double> times(static_cast<std::size_t>(n_out));
  for (int i = 0; i < n_out; ++i)
    times[std::size_t(i)] = i + 1 == n_out ? t1 : state0.t + (t1 - state0.t) * double(i) / double(n_out - 1);
  return propagate_moments(sol, diff, state0, times, tol);
}

}  // namespace parosc
