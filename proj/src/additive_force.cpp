#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "parosc/errors.hpp"
#include "parosc/evolution.hpp"
#include "quadrature.hpp"

namespace parosc {

namespace {

void require_conservative(const FloquetSolution& sol0) {
  if (!sol0.stable) throw UnstableSolution("effective_force");
  if (sol0.gamma != 0.0) throw std::invalid_argument("effective_force: expects the gamma = 0 Floquet solution");
}

/// Undamped Green function G0(a, b) = Im(xi(a) conj(xi(b))).
double green0(const XiValue& a, const XiValue& b) { return std::imag(a.xi * std::conj(b.xi)); }

/// int_lo^hi f over n panels of the given rule.
template <class F>
double composite(const detail::GaussRule& rule, double lo, double hi, int panels, F&& f) {
  const double h = (hi - lo) / panels;
  double s = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double mid = lo + (k + 0.5) * h;
    for (std::size_t i = 0; i < rule.x.size(); ++i) s += rule.w[i] * 0.5 * h * f(mid + 0.5 * h * rule.x[i]);
  }
  return s;
}

}  // namespace

double HarmonicForce::operator()(double t) const {
  double s = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) s += a[l] * std::cos(double(l) * Omega * t);
  for (std::size_t l = 0; l < b.size(); ++l) s += b[l] * std::sin(double(l) * Omega * t);
  return s;
}

// The bath correction is
//   (2/m pi) int dw I(w) int dtau sin(w tau) J(t, tau),
//   J(t, tau) = -int_{t-tau}^t dt' G0(t-tau, t') F(t').
// For I(w) = m gamma w the w integral is -pi m gamma delta'(tau) and J = O(tau^2),
// so the correction vanishes. For the Drude form the sine transform is
// (pi/2) m gamma wD^2 exp(-wD tau), leaving gamma wD^2 int dtau exp(-wD tau) J.
std::vector<double> effective_force(const std::function<double(double)>& F,
                                    const FloquetSolution& sol0, const BathSpec& bath,
                                    SpectralModel model, const std::vector<double>& times,
                                    int order) {
  std::vector<double> out(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) out[i] = F(times[i]);
  if (model == SpectralModel::Ohmic) return out;
  require_conservative(sol0);
  bath.validate();

  const auto& rule = detail::gauss_rule(order);
  const double wD = bath.omega_D;
  const double wmax = std::max(relevant_frequency(sol0), sol0.Omega());
  const double tau_max = 40.0 / wD;
  const double h_target = std::min(2.0 / wD, 2.0 / wmax);
  const int outer = std::max(1, int(std::ceil(tau_max / h_target)));

  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    auto integrand = [&](double tau) {
      if (tau == 0.0) return 0.0;
      const double a = t - tau;
      const XiValue xa = xi1_series(sol0, a);
      const int inner = std::max(1, int(std::ceil(tau / h_target)));
      const double J =
          -composite(rule, a, t, inner, [&](double tp) { return green0(xa, xi1_series(sol0, tp)) * F(tp); });
      return std::exp(-wD * tau) * J;
    };
    out[i] += bath.gamma * wD * wD * composite(rule, 0.0, tau_max, outer, integrand);
  }
  return out;
}

std::vector<double> effective_force(const HarmonicForce& F, const FloquetSolution& sol0,
                                    const BathSpec& bath, SpectralModel model,
                                    const std::vector<double>& times) {
  std::vector<double> out(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) out[i] = F(times[i]);
  if (model == SpectralModel::Ohmic) return out;
  require_conservative(sol0);
  bath.validate();
  if (std::abs(F.Omega - sol0.Omega()) > 1e-14 * sol0.Omega() && (F.a.size() > 1 || F.b.size() > 1))
    throw std::invalid_argument("effective_force: force and stiffness must share Omega");

  const int N = sol0.n_max;
  const double wD = bath.omega_D;
  const cdouble I(0.0, 1.0);
  double cmax = 0.0;
  for (int n = -N; n <= N; ++n) cmax = std::max(cmax, std::abs(sol0.coeff(n)));
  std::vector<int> idx;
  for (int n = -N; n <= N; ++n)
    if (std::abs(sol0.coeff(n)) > 1e-16 * cmax) idx.push_back(n);

  // int_0^inf dtau e^{-wD tau} e^{i nu (t - tau)} int_{t-tau}^t e^{i kappa t'} dt'
  //   = e^{i (nu + kappa) t} / ((wD + i nu)(wD + i (nu + kappa)))
  auto K = [&](double kappa, double nu, double t) {
    return std::exp(I * (nu + kappa) * t) / ((wD + I * nu) * (wD + I * (nu + kappa)));
  };

  const std::size_t L = std::max(F.a.size(), F.b.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    double corr = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
      // a cos + b sin = Re[(a - i b) e^{i l Omega t}]
      const double al = l < F.a.size() ? F.a[l] : 0.0;
      const double bl = l < F.b.size() ? F.b[l] : 0.0;
      const cdouble amp(al, -bl);
      if (amp == 0.0) continue;
      const double lw = double(l) * F.Omega;
      cdouble s = 0.0;
      for (int n : idx) {
        const double wn = sol0.frequency(n);
        for (int np : idx) {
          const double wnp = sol0.frequency(np);
          s += sol0.coeff(n) * sol0.coeff(np) * (K(lw - wnp, wn, t) - K(lw + wnp, -wn, t));
        }
      }
      // J carries -G0, G0 = sum c c' sin(.) = (e^{i.} - e^{-i.}) / 2i
      corr += (amp * (-s / (2.0 * I))).real();
    }
    out[i] += bath.gamma * wD * wD * corr;
  }
  return out;
}

std::vector<CovarianceState> mean_response_with_force(const FloquetSolution& sol,
                                                      const DiffusionSet& diff,
                                                      const std::function<double(double)>& F,
                                                      const CovarianceState& state0,
                                                      const std::vector<double>& times, double tol) {
  std::vector<CovarianceState> out = propagate_moments(sol, diff, state0, times, tol);
  const bool rwa = diff.scheme == Scheme::RWA;
  const FloquetSolution& basis = rwa ? *diff.rwa_basis : sol;
  const double m = diff.m;
  const double g = diff.gamma;
  const double t0 = state0.t;
  const auto& rule = detail::gauss_rule(20);
  const double h_target = std::min(8.0 / (2.0 * relevant_frequency(basis) + g + basis.Omega()),
                                   basis.period() / 4.0);

  // Transfer matrix of the scheme's drift: the non-RWA drift damps the
  // momentum only, the RWA drift damps both quadratures by gamma/2.
  struct Phi {
    double xx, xp, px, pp;
  };
  auto transfer = [&](double t, double tp) {
    const GreenValue G = green_function(basis, t, tp);
    if (rwa) {
      const double e = std::exp(-0.5 * g * (t - tp));
      return Phi{-e * G.dtp, e * G.g / m, -e * m * G.dtdtp, e * G.dt};
    }
    return Phi{-G.dtp + g * G.g, G.g / m, m * (-G.dtdtp + g * G.dt), G.dt};
  };

  for (auto& s : out) {
    const double t = s.t;
    const Phi P0 = transfer(t, t0);
    double x = P0.xx * state0.mean_x + P0.xp * state0.mean_p;
    double p = P0.px * state0.mean_x + P0.pp * state0.mean_p;
    if (t > t0) {
      const int panels = std::max(1, int(std::ceil((t - t0) / h_target)));
      const double h = (t - t0) / panels;
      for (int k = 0; k < panels; ++k) {
        const double mid = t0 + (k + 0.5) * h;
        for (std::size_t i = 0; i < rule.x.size(); ++i) {
          const double tp = mid + 0.5 * h * rule.x[i];
          const Phi P = transfer(t, tp);
          const double f = F(tp) * rule.w[i] * 0.5 * h;
          x += P.xp * f;
          p += P.pp * f;
        }
      }
    }
    s.mean_x = x;
    s.mean_p = p;
  }
  return out;
}

}  // namespace parosc
