#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "parosc/errors.hpp"
#include "parosc/evolution.hpp"
#include "quadrature.hpp"

namespace parosc {

namespace {

constexpr int kOrder = 20;

struct PanelPlan {
  double lo = 0.0;
  double h = 0.0;
  int count = 0;
  bool infinite = false;
};

// For t0 = -infinity the integrand over [t - (k+1)T, t - kT] is the one over
// [t - T, t] times q^k (|xi|^2 terms) or (q exp(-2i mu T))^k (xi^2 terms), with
// q = exp(-gamma T), so one period of quadrature and two geometric series suffice.
PanelPlan plan_panels(const FloquetSolution& sol, double t, double t0) {
  if (!sol.stable) throw UnstableSolution("green_integrals");
  PanelPlan p;
  double length = 0.0;
  if (std::isinf(t0)) {
    if (!(sol.gamma > 0.0))
      throw std::invalid_argument("green_integrals: infinite lower limit needs gamma > 0");
    length = sol.period();
    p.infinite = true;
  } else {
    if (t0 > t) throw std::invalid_argument("green_integrals: t0 must not exceed t");
    length = t - t0;
  }
  const double kappa = 2.0 * relevant_frequency(sol) + sol.gamma + sol.Omega();
  const double h_max = std::min(16.0 / kappa, sol.period() / 4.0);
  p.count = std::max(1, int(std::ceil(length / h_max)));
  p.h = length / p.count;
  p.lo = t - length;
  return p;
}

/// Contribution of one panel to (int G^2, int G dG, int dG^2) for a finite
/// range, or to (int w |xi|^2, Re int w xi^2, Im int w xi^2), w = exp(-gamma (t - t')),
/// for the periodic reduction.
std::array<double, 3> panel(const FloquetSolution& sol, const XiValue& a, double t, double lo,
                            double h, bool periodic) {
  const auto& rule = detail::gauss_rule(kOrder);
  const double g = sol.gamma;
  const double H0 = 0.5 * h;
  const double mid = lo + H0;
  std::array<double, 3> s{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < rule.x.size(); ++i) {
    const double tp = mid + H0 * rule.x[i];
    const XiValue b = xi1_series(sol, tp);
    const double w = rule.w[i] * H0;
    if (periodic) {
      const double E = std::exp(-g * (t - tp));
      const cdouble b2 = b.xi * b.xi;
      s[0] += w * E * std::norm(b.xi);
      s[1] += w * E * b2.real();
      s[2] += w * E * b2.imag();
      continue;
    }
    const cdouble bc = std::conj(b.xi);
    const double E = std::exp(-0.5 * g * (t - tp));
    const double G = E * std::imag(a.xi * bc);
    const double Gt = E * (std::imag(a.dxi * bc) - 0.5 * g * std::imag(a.xi * bc));
    s[0] += w * G * G;
    s[1] += w * G * Gt;
    s[2] += w * Gt * Gt;
  }
  return s;
}

GreenIntegrals finish(const FloquetSolution& sol, const XiValue& a, double t, double t0, const PanelPlan& p,
                      const std::vector<std::array<double, 3>>& parts) {
  std::array<double, 3> sum{0.0, 0.0, 0.0};
  for (const auto& s : parts)
    for (std::size_t k = 0; k < 3; ++k) sum[k] += s[k];
  GreenIntegrals I;
  if (p.infinite) {
    // G(t,t') = e^{-gamma(t-t')/2} Im(xi(t) conj(xi(t'))), and
    // Im(u conj z) Im(v conj z) = [Re(u conj v) |z|^2 - Re(conj(u v) z^2)] / 2.
    const double T = sol.period();
    const double q = std::exp(-sol.gamma * T);
    const double J0 = sum[0] / (1.0 - q);
    const cdouble J2 = cdouble(sum[1], sum[2]) / (1.0 - q * std::exp(cdouble(0.0, -2.0 * sol.mu.real() * T)));
    const cdouble u = a.xi, v = a.dxi - 0.5 * sol.gamma * a.xi;
    auto pair = [&](cdouble x, cdouble y) {
      return 0.5 * ((x * std::conj(y)).real() * J0 - (std::conj(x * y) * J2).real());
    };
    I.gg = pair(u, u);
    I.g_dg = pair(u, v);
    I.dg_dg = pair(v, v);
    return I;
  }
  I.gg = sum[0];
  I.g_dg = sum[1];
  I.dg_dg = sum[2];
  const GreenValue G = green_function(sol, t, t0);
  I.g_t0 = G.g;
  I.dg_t0 = G.dt;
  return I;
}

}  // namespace

GreenIntegrals green_integrals(const FloquetSolution& sol, double t, double t0) {
  const PanelPlan p = plan_panels(sol, t, t0);
  const XiValue a = xi1_series(sol, t);
  std::vector<std::array<double, 3>> parts(std::size_t(p.count));
#pragma omp parallel for schedule(static)
  for (int i = 0; i < p.count; ++i) parts[std::size_t(i)] = panel(sol, a, t, p.lo + i * p.h, p.h, p.infinite);
  return finish(sol, a, t, t0, p, parts);
}

GreenIntegrals green_integrals_serial(const FloquetSolution& sol, double t, double t0) {
  const PanelPlan p = plan_panels(sol, t, t0);
  const XiValue a = xi1_series(sol, t);
  std::vector<std::array<double, 3>> parts(std::size_t(p.count));
  for (int i = 0; i < p.count; ++i) parts[std::size_t(i)] = panel(sol, a, t, p.lo + i * p.h, p.h, p.infinite);
  return finish(sol, a, t, t0, p, parts);
}

CovarianceState covariance_from_integrals(const GreenIntegrals& I, const DiffusionSet& diff, double t,
                                          DiffusionWeight weight) {
  if (diff.scheme == Scheme::RWA)
    throw std::invalid_argument("covariance_from_integrals: not defined for the RWA scheme");
  const double m = diff.m;
  const double g = diff.gamma;
  const double D = weight == DiffusionWeight::Exact ? diff.d_pp + m * g * diff.d_xp : diff.d_pp;
  CovarianceState s;
  s.t = t;
  s.sigma_xx = 2.0 * g * D / (m * m) * I.gg + g * diff.d_xp / m * I.g_t0 * I.g_t0;
  s.sigma_xp = 2.0 * g * D / m * I.g_dg + g * diff.d_xp * I.g_t0 * I.dg_t0;
  s.sigma_pp = -m * g * diff.d_xp + 2.0 * g * D * I.dg_dg + m * g * diff.d_xp * I.dg_t0 * I.dg_t0;
  return s;
}

CovarianceState asymptotic_covariance(const FloquetSolution& sol, const DiffusionSet& diff, double t,
                                      double t0, DiffusionWeight weight) {
  if (diff.scheme == Scheme::RWA) {
    if (!std::isinf(t0))
      throw std::invalid_argument("asymptotic_covariance: RWA closed form needs t0 = -infinity");
    if (!diff.rwa_basis) throw std::invalid_argument("asymptotic_covariance: RWA set without basis");
    return rwa_asymptotic_covariance(*diff.rwa_basis, diff.N, t, diff.m, diff.hbar);
  }
  if (std::abs(sol.gamma - diff.gamma) > 1e-14 * std::max(1.0, diff.gamma))
    throw std::invalid_argument("asymptotic_covariance: Floquet solution and bath disagree on gamma");
  return covariance_from_integrals(green_integrals(sol, t, t0), diff, t, weight);
}

CovarianceState rwa_asymptotic_covariance(const FloquetSolution& sol0, double N, double t, double m,
                                          double hbar) {
  if (!sol0.stable) throw UnstableSolution("rwa_asymptotic_covariance");
  if (sol0.gamma != 0.0)
    throw std::invalid_argument("rwa_asymptotic_covariance: expects the gamma = 0 Floquet solution");
  const auto f = fundamental_solutions(sol0, t);
  const double w = N + 0.5;
  CovarianceState s;
  s.t = t;
  s.sigma_xx = hbar / m * w * (f.xi1 * f.xi2).real();
  s.sigma_xp = 0.5 * hbar * w * (f.dxi1 * f.xi2 + f.xi1 * f.dxi2).real();
  s.sigma_pp = hbar * m * w * (f.dxi1 * f.dxi2).real();
  return s;
}

}  // namespace parosc
