// One PASS/FAIL line per acceptance criterion; exit status is the number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "parosc/errors.hpp"
#include "parosc/oracle.hpp"

using namespace parosc;

namespace {

const auto kFig = PeriodicStiffness::mathieu(6.5, 7.0);

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... v) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, v...);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome floquet_index() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto sol = solve_floquet(kFig, 0.0);
  const double s = seconds_since(t0);
  const double err = std::abs(sol.mu.real() - 0.5 * 4.53513);
  return {sol.stable && err < 5e-5 && sol.mu.imag() == 0.0 && s < 1.0,
          fmt("mu = %.7f Omega/2, |error| = %.2e Omega, %.3f s", sol.mu.real() / 0.5, err, s)};
}

Outcome sum_rule_wronskian() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> w2(0.1, 12.0), e(0.0, 9.0), g(0.0, 0.3), t(0.0, 20.0);
  double worst_sum = 0.0, worst_w = 0.0;
  int found = 0;
  while (found < 50) {
    const auto sol = solve_floquet(PeriodicStiffness::mathieu(w2(rng), e(rng)), g(rng));
    if (!sol.stable || sol.borderline) continue;
    ++found;
    worst_sum = std::max(worst_sum, std::abs(sol.sum_rule() - 1.0));
    // Wronskian xi1 xi2' - xi1' xi2 = -2i for every t
    for (int k = 0; k < 5; ++k) {
      const auto f = fundamental_solutions(sol, t(rng));
      worst_w = std::max(worst_w, std::abs(f.xi1 * f.dxi2 - f.dxi1 * f.xi2 - cdouble(0.0, -2.0)));
    }
  }
  const double s = seconds_since(t0);
  return {worst_sum < 1e-10 && worst_w < 1e-9 && s < 10.0,
          fmt("max sum-rule residual %.1e, max Wronskian residual %.1e, %.2f s", worst_sum, worst_w, s)};
}

Outcome degeneracy() {
  double worst_d = 0.0, worst_n = 0.0;
  for (double w2 : {0.3, 1.0, 2.7, 6.5, 11.0})
    for (double kT : {0.1, 0.5, 3.0}) {
      const auto sol0 = solve_floquet(PeriodicStiffness::mathieu(w2, 0.0), 0.0);
      const BathSpec bath{0.05, kT, 300.0, 1.0, 1.0};
      worst_d = std::max(worst_d, rel(d_pp_improved(sol0, bath), d_pp_simple(bath, std::sqrt(w2))));
      worst_n = std::max(worst_n, rel(effective_N(sol0, bath), thermal_occupation(bath, std::sqrt(w2))));
    }
  return {worst_d < 1e-10 && worst_n < 1e-10, fmt("max relative D_pp gap %.1e, max relative N gap %.1e", worst_d, worst_n)};
}

Outcome kramers() {
  const auto sol0 = solve_floquet(kFig, 0.0);
  const BathSpec hot{0.05, 100.0, 0.1, 1.0, 1.0};  // hbar wD / kT = 1e-3
  const double ratio = d_pp_improved(sol0, hot) / (hot.m * hot.kT);
  const double dxp = d_xp_drude(hot);
  return {ratio >= 0.99 && ratio <= 1.01 && std::abs(dxp) < 1e-2,
          fmt("D_pp/mkT = %.6f, |D_xp| = %.2e hbar", ratio, std::abs(dxp))};
}

Outcome route_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  const double g = 0.05;
  const auto sol0 = solve_floquet(kFig, 0.0), sol = solve_floquet(kFig, g);
  const BathSpec bath{g, 0.5, default_cutoff(sol0), 1.0, 1.0};
  const double T = sol.period(), start = 20.0 / g;
  std::vector<double> times;
  for (int j = 0; j <= 16; ++j) times.push_back(start + T * j / 16.0);
  double worst = 0.0;
  CovarianceState s0;
  s0.sigma_xx = s0.sigma_pp = 0.5;
  for (const auto& d : {make_simple(bath, std::sqrt(6.5)), make_improved(sol0, bath)}) {
    for (const auto& o : propagate_moments(sol, d, s0, times, 1e-12)) {
      const auto q = asymptotic_covariance(sol, d, o.t);
      const double scale = std::sqrt(q.sigma_xx * q.sigma_pp);
      worst = std::max({worst, rel(o.sigma_xx, q.sigma_xx), rel(o.sigma_pp, q.sigma_pp),
                        std::abs(o.sigma_xp - q.sigma_xp) / scale});
    }
  }
  const double s = seconds_since(t0);
  return {worst < 1e-6 && s < 30.0, fmt("max relative deviation %.2e over 17 phases x 2 schemes, %.2f s", worst, s)};
}

Outcome periodicity() {
  const double g = 0.05;
  const auto sol0 = solve_floquet(kFig, 0.0), sol = solve_floquet(kFig, g);
  const BathSpec bath{g, 0.5, default_cutoff(sol0), 1.0, 1.0};
  const double T = sol.period(), start = 20.0 / g;
  double worst = 0.0;
  CovarianceState s0;
  s0.sigma_xx = s0.sigma_pp = 0.5;
  for (const auto& d : {make_simple(bath, std::sqrt(6.5)), make_improved(sol0, bath), make_rwa(sol0, bath)}) {
    std::vector<double> times;
    for (int j = 0; j < 8; ++j) times.push_back(start + T * j / 8.0);
    for (int j = 0; j < 8; ++j) times.push_back(start + T + T * j / 8.0);
    const auto o = propagate_moments(sol, d, s0, times, 1e-12);
    for (int j = 0; j < 8; ++j) {
      const auto& a = o[std::size_t(j)];
      const auto& b = o[std::size_t(j + 8)];
      const double scale = std::sqrt(a.sigma_xx * a.sigma_pp);
      worst = std::max({worst, rel(b.sigma_xx, a.sigma_xx), rel(b.sigma_pp, a.sigma_pp),
                        std::abs(b.sigma_xp - a.sigma_xp) / scale});
    }
  }
  return {worst < 1e-8, fmt("max relative change over one period after 20/gamma: %.2e (3 schemes)", worst)};
}

Outcome rwa_determinant() {
  const auto sol0 = solve_floquet(kFig, 0.0);
  const BathSpec bath{0.05, 0.5, default_cutoff(sol0), 1.0, 1.0};
  const double N = effective_N(sol0, bath);
  double worst = 0.0, worst0 = 0.0;
  for (int j = 0; j < 64; ++j) {
    const double t = sol0.period() * j / 64.0;
    const double d = rwa_asymptotic_covariance(sol0, N, t).det();
    worst = std::max(worst, rel(d, (N + 0.5) * (N + 0.5)));
    worst0 = std::max(worst0, rel(rwa_asymptotic_covariance(sol0, 0.0, t).det(), 0.25));
  }
  return {worst < 1e-10 && worst0 < 1e-10, fmt("max relative deviation %.1e (N = %.4f), %.1e (N = 0)", worst, N, worst0)};
}

Outcome rwa_relaxation() {
  const double N = 0.408, g = 0.05;
  double worst = 0.0;
  rwa_density_propagate(FloquetDensityMatrix::fock(48, 4), N, g, 10.0 / g, 0.01,
                        [&](double t, const FloquetDensityMatrix& r) {
                          worst = std::max(worst, std::abs(r.mean_level() - (N + (4.0 - N) * std::exp(-g * t))));
                        });
  const auto th = FloquetDensityMatrix::thermal(48, N);
  const auto after = rwa_density_propagate(th, N, g, 10.0 / g, 0.01);
  const double drift = (after.rho - th.rho).cwiseAbs().maxCoeff();
  return {worst < 1e-6 && drift < 1e-8,
          fmt("max |<a>(t) - law| = %.1e, stationary distribution drift %.1e after 10/gamma", worst, drift)};
}

double wigner_residual(const FloquetSolution& sol, const DiffusionSet& d, int n, int np, double t) {
  const double ht = 1e-3;
  const WignerFloquetState ws[4] = {wigner_floquet_state(sol, d, n, np, t - 2 * ht),
                                    wigner_floquet_state(sol, d, n, np, t - ht),
                                    wigner_floquet_state(sol, d, n, np, t + ht),
                                    wigner_floquet_state(sol, d, n, np, t + 2 * ht)};
  const auto W = wigner_floquet_state(sol, d, n, np, t);
  const double sx = std::sqrt(W.gaussian.sigma_xx), sp = std::sqrt(W.gaussian.sigma_pp);
  const double hx = 1e-3 * sx, hp = 1e-3 * sp;
  const double m = d.m, g = d.gamma, k = sol.stiffness(t) * m;
  const double off[4] = {-2.0, -1.0, 1.0, 2.0}, c1[4] = {1.0 / 12, -8.0 / 12, 8.0 / 12, -1.0 / 12};
  double worst = 0.0, scale = 0.0;
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j) {
      const double x = sx * (-6.0 + 12.0 * i / 63.0), p = sp * (-6.0 + 12.0 * j / 63.0);
      cdouble wt = 0.0, wx = 0.0, wp = 0.0, wxp = 0.0;
      for (int a = 0; a < 4; ++a) {
        wt += c1[a] * ws[a](x, p) / ht;
        wx += c1[a] * W(x + off[a] * hx, p) / hx;
        wp += c1[a] * W(x, p + off[a] * hp) / hp;
        for (int b = 0; b < 4; ++b) wxp += c1[a] * c1[b] * W(x + off[a] * hx, p + off[b] * hp) / (hx * hp);
      }
      const cdouble w0 = W(x, p);
      const cdouble wpp =
          (-W(x, p + 2 * hp) + 16.0 * W(x, p + hp) - 30.0 * w0 + 16.0 * W(x, p - hp) - W(x, p - 2 * hp)) /
          (12.0 * hp * hp);
      const cdouble LW = -(p / m) * wx + g * w0 + (k * x + g * p) * wp + g * d.d_pp * wpp + g * d.d_xp * wxp;
      worst = std::max(worst, std::abs(LW - wt));
      scale = std::max(scale, std::abs(wt));
    }
  return worst / scale;
}

Outcome wigner_floquet() {
  const double g = 0.05;
  const auto sol0 = solve_floquet(kFig, 0.0), sol = solve_floquet(kFig, g);
  const BathSpec bath{g, 0.5, default_cutoff(sol0), 1.0, 1.0};
  const auto a = make_improved(sol0, bath);
  DiffusionSet b = a;
  b.d_pp *= 3.0;
  b.d_xp = 0.7;
  double worst = 0.0;
  bool independent = true;
  for (int n = 0; n <= 4; ++n)
    for (int np = 0; n + np <= 4; ++np) {
      worst = std::max(worst, wigner_residual(sol, a, n, np, 0.9));
      const cdouble ma = wigner_floquet_state(sol, a, n, np, 0.9).quasi_eigenvalue;
      const cdouble mb = wigner_floquet_state(sol, b, n, np, 0.9).quasi_eigenvalue;
      independent = independent && ma.real() == mb.real() && ma.imag() == mb.imag();
    }
  return {worst < 1e-6 && independent,
          fmt("max relative residual %.1e for n + n' <= 4; exponents %s of D_pp, D_xp", worst,
              independent ? "bitwise independent" : "DEPEND ON")};
}

Outcome oracle_comparison() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto sol0 = solve_floquet(kFig, 0.0);
  const int M = 32;
  std::vector<double> es, ei;
  for (double g : {0.01, 0.05, 0.1}) {
    const auto sol = solve_floquet(kFig, g);
    const BathSpec bath{g, 0.5, default_cutoff(sol0), 1.0, 1.0};
    const auto simple = make_simple(bath, std::sqrt(6.5));
    const auto improved = make_improved(sol0, bath);
    const NoiseKernel K(bath);
    double s = 0.0, i = 0.0;
    for (int j = 0; j < M; ++j) {
      const double t = sol.period() * j / M;
      const auto I = green_integrals(sol, t);
      const double ex = exact_variances(sol, K, t, 1e-8).sigma_xx;
      s += std::abs(covariance_from_integrals(I, simple, t).sigma_xx / ex - 1.0) / M;
      i += std::abs(covariance_from_integrals(I, improved, t).sigma_xx / ex - 1.0) / M;
    }
    es.push_back(s);
    ei.push_back(i);
  }
  const double secs = seconds_since(t0);
  const double reduction = 1.0 - ei[1] / es[1];
  const bool better = ei[1] < es[1];
  const bool band = reduction >= 0.15 && reduction <= 0.50;
  const bool monotone = es[0] < es[1] && es[1] < es[2] && ei[0] < ei[1] && ei[1] < ei[2];
  return {better && band && monotone && secs < 300.0,
          fmt("gamma = 0.01/0.05/0.1: simple %.4f/%.4f/%.4f, improved %.4f/%.4f/%.4f; reduction at 0.05 = %.1f%% "
              "[%s]; increasing with gamma [%s]; %.1f s",
              es[0], es[1], es[2], ei[0], ei[1], ei[2], 100.0 * reduction, band && better ? "ok" : "FAIL",
              monotone ? "ok" : "FAIL", secs)};
}

Outcome additive_driving() {
  const double g = 0.05;
  const auto sol0 = solve_floquet(kFig, 0.0), sol = solve_floquet(kFig, g);
  const BathSpec bath{g, 0.5, default_cutoff(sol0), 1.0, 1.0};
  const HarmonicForce F{1.0, {0.1, 0.8, -0.3, 0.2}, {0.0, 0.5, 0.4, -0.1}};
  std::vector<double> ts;
  for (int j = 0; j < 20; ++j) ts.push_back(0.37 * j);
  double worst_f = 0.0;
  const auto a = effective_force(F, sol0, bath, SpectralModel::Ohmic, ts);
  for (std::size_t j = 0; j < ts.size(); ++j) worst_f = std::max(worst_f, std::abs(a[j] - F(ts[j])));
  double worst_c = 0.0;
  const CovarianceState s0{0.0, 0.2, -0.1, 0.6, 0.05, 0.8};
  const std::function<double(double)> f = F;
  for (const auto& d : {make_simple(bath, std::sqrt(6.5)), make_improved(sol0, bath), make_rwa(sol0, bath)}) {
    const auto with = mean_response_with_force(sol, d, f, s0, ts, 1e-10);
    const auto without = propagate_moments(sol, d, s0, ts, 1e-10);
    for (std::size_t j = 0; j < ts.size(); ++j)
      worst_c = std::max({worst_c, rel(with[j].sigma_xx, without[j].sigma_xx), rel(with[j].sigma_pp, without[j].sigma_pp),
                          std::abs(with[j].sigma_xp - without[j].sigma_xp) /
                              std::sqrt(without[j].sigma_xx * without[j].sigma_pp)});
  }
  return {worst_f <= 1e-12 && worst_c <= 1e-12, fmt("max |F~ - F| = %.1e, max covariance change %.1e", worst_f, worst_c)};
}

Outcome uncertainty_floor() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> w2(0.1, 12.0), e(0.0, 9.0), kT(0.02, 2.0);
  double worst_margin = 1e300, worst_det = 0.0;
  int found = 0;
  while (found < 20) {
    const auto k = PeriodicStiffness::mathieu(w2(rng), e(rng));
    const auto sol0 = solve_floquet(k, 0.0);
    if (!sol0.stable || sol0.borderline) continue;
    const double gs = 1e-4;
    const auto sol = solve_floquet(k, gs);
    if (!sol.stable) continue;
    ++found;
    const BathSpec bath{gs, kT(rng), default_cutoff(sol0), 1.0, 1.0};
    const auto d = make_improved(sol0, bath);
    const double floor = std::pow(d.d_pp * sol0.weight_A() / bath.m, 2);
    worst_margin = std::min(worst_margin, floor / 0.25);
    // weak-damping covariance has exactly this determinant
    const auto c = covariance_from_integrals(green_integrals(sol, 0.3), d, 0.3, DiffusionWeight::LeadingOrder);
    worst_det = std::max(worst_det, rel(c.det(), floor));
  }
  return {worst_margin >= 1.0 && worst_det < 1e-2,
          fmt("min (D_pp A/m)^2 / (hbar^2/4) = %.4f over 20 points; weak-damping det matches to %.1e", worst_margin,
              worst_det)};
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, floquet_index},     {2, sum_rule_wronskian}, {3, degeneracy},       {4, kramers},
      {5, route_equivalence}, {6, periodicity},        {7, rwa_determinant},  {8, rwa_relaxation},
      {9, wigner_floquet},    {10, oracle_comparison}, {11, additive_driving}, {12, uncertainty_floor},
  };
  int failures = 0;
  for (const auto& [id, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s criterion %d: %s\n", o.pass ? "PASS" : "FAIL", id, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failures, criteria.size());
  return failures;
}
