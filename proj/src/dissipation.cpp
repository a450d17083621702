#include "parosc/dissipation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "parosc/errors.hpp"
#include "parosc/special.hpp"

namespace parosc {

namespace {

void require_conservative(const FloquetSolution& sol0, const char* where) {
  if (!sol0.stable) throw UnstableSolution(where);
  if (sol0.gamma != 0.0)
    throw std::invalid_argument(std::string(where) + ": expects the gamma = 0 Floquet solution");
}

}  // namespace

void BathSpec::validate() const {
  auto ok = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!ok(gamma) || !ok(kT) || !ok(omega_D) || !ok(m) || !ok(hbar))
    throw std::invalid_argument("BathSpec: gamma, kT, omega_D, m and hbar must be positive");
}

double relevant_frequency(const FloquetSolution& sol) {
  const int N = sol.n_max;
  double wmax = 0.0;
  for (int n = -N; n <= N; ++n)
    wmax = std::max(wmax, std::abs(sol.coeffs_complex[std::size_t(n + N)] * (sol.mu + double(n) * sol.Omega())));
  double out = 0.0;
  for (int n = -N; n <= N; ++n) {
    const cdouble w = sol.mu + double(n) * sol.Omega();
    if (std::abs(sol.coeffs_complex[std::size_t(n + N)] * w) >= 1e-6 * wmax) out = std::max(out, std::abs(w));
  }
  return out;
}

double default_cutoff(const FloquetSolution& sol) {
  return 50.0 * std::max({sol.Omega(), std::sqrt(std::abs(sol.stiffness.mean())), relevant_frequency(sol)});
}

bool cutoff_adequate(const BathSpec& bath, const FloquetSolution& sol) {
  return bath.omega_D >= 10.0 * std::max({sol.Omega(), std::sqrt(std::abs(sol.stiffness.mean())),
                                          relevant_frequency(sol)});
}

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::Simple: return "simple";
    case Scheme::ImprovedAveraged: return "improved";
    case Scheme::RWA: return "rwa";
  }
  return "?";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "simple") return Scheme::Simple;
  if (name == "improved") return Scheme::ImprovedAveraged;
  if (name == "rwa") return Scheme::RWA;
  throw std::invalid_argument("unknown scheme '" + name + "' (expected simple, improved or rwa)");
}

RwaCoefficients DiffusionSet::rwa_at(double t) const {
  if (scheme != Scheme::RWA || !rwa_basis)
    throw std::logic_error("DiffusionSet::rwa_at: not an RWA diffusion set");
  return rwa_coefficients(*rwa_basis, N, t, m, hbar);
}

double thermal_occupation(const BathSpec& bath, double omega) {
  if (omega == 0.0) throw ZeroFrequency("thermal_occupation: omega = 0");
  return 1.0 / std::expm1(bath.hbar * omega / bath.kT);
}

double d_pp_simple(const BathSpec& bath, double omega0) {
  if (!(omega0 > 0.0)) throw std::invalid_argument("d_pp_simple: omega0 must be positive");
  // (1/2) m hbar w coth(hbar w / 2kT) = m kT x coth(x) with x = hbar w / 2kT
  return bath.m * bath.kT * x_coth(0.5 * bath.hbar * omega0 / bath.kT);
}

double d_xp_drude(const BathSpec& bath) {
  const double arg = 1.0 + bath.hbar * bath.omega_D / (2.0 * std::numbers::pi * bath.kT);
  return -bath.hbar / std::numbers::pi * (digamma(arg) + kEulerGamma);
}

double d_pp_improved(const FloquetSolution& sol0, const BathSpec& bath) {
  require_conservative(sol0, "d_pp_improved");
  const int N = sol0.n_max;
  double s = 0.0;
  for (int n = -N; n <= N; ++n) {
    const double c = sol0.coeff(n);
    const double w = sol0.frequency(n);
    s += c * c * w * x_coth(0.5 * bath.hbar * w / bath.kT);
  }
  return bath.m * bath.kT * s;
}

ContinuedValue d_pp_improved_continued(const FloquetSolution& sol0, const BathSpec& bath) {
  const int N = sol0.n_max;
  cdouble s = 0.0;
  for (int n = -N; n <= N; ++n) {
    const cdouble c = sol0.coeffs_complex[std::size_t(n + N)];
    const cdouble w = sol0.mu + double(n) * sol0.Omega();
    s += c * c * w * x_coth(0.5 * bath.hbar * w / bath.kT);
  }
  return {bath.m * bath.kT * s.real(), sol0.stable && !sol0.borderline};
}

double effective_N(const FloquetSolution& sol0, const BathSpec& bath) {
  require_conservative(sol0, "effective_N");
  const int N = sol0.n_max;
  double s = 0.0;
  for (int n = -N; n <= N; ++n) {
    const double c = sol0.coeff(n);
    if (c == 0.0) continue;
    const double w = sol0.frequency(n);
    if (std::abs(w) < 1e-10 * sol0.Omega())
      throw ResonantTerm("effective_N: quasienergy mu + n Omega vanishes for n = " + std::to_string(n));
    s += c * c * w * thermal_occupation(bath, w);
  }
  return s;
}

RwaCoefficients rwa_coefficients(const FloquetSolution& sol0, double N, double t, double m,
                                 double hbar) {
  require_conservative(sol0, "rwa_coefficients");
  const auto f = fundamental_solutions(sol0, t);
  const double w = N + 0.5;
  return {hbar * (f.xi1 * f.xi2).real() * w / m, hbar * (f.dxi1 * f.xi2 + f.xi1 * f.dxi2).real() * w,
          m * hbar * (f.dxi1 * f.dxi2).real() * w};
}

DiffusionSet make_simple(const BathSpec& bath, double omega0) {
  bath.validate();
  DiffusionSet d;
  d.scheme = Scheme::Simple;
  d.d_pp = d_pp_simple(bath, omega0);
  d.d_xp = d_xp_drude(bath);
  d.gamma = bath.gamma;
  d.m = bath.m;
  d.hbar = bath.hbar;
  return d;
}

DiffusionSet make_improved(const FloquetSolution& sol0, const BathSpec& bath) {
  bath.validate();
  DiffusionSet d;
  d.scheme = Scheme::ImprovedAveraged;
  d.d_pp = d_pp_improved(sol0, bath);
  d.d_xp = d_xp_drude(bath);
  d.gamma = bath.gamma;
  d.m = bath.m;
  d.hbar = bath.hbar;
  return d;
}

DiffusionSet make_rwa(const FloquetSolution& sol0, const BathSpec& bath) {
  bath.validate();
  DiffusionSet d;
  d.scheme = Scheme::RWA;
  d.N = effective_N(sol0, bath);
  d.gamma = bath.gamma;
  d.m = bath.m;
  d.hbar = bath.hbar;
  d.rwa_basis = std::make_shared<const FloquetSolution>(sol0);
  return d;
}

}  // namespace parosc
