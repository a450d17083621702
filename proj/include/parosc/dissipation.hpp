#pragma once

#include <memory>
#include <string>

#include "parosc/floquet.hpp"

namespace parosc {

/// Ohmic heat bath with Drude cutoff: I(w) = m gamma w / (1 + w^2/omega_D^2).
struct BathSpec {
  double gamma = 0.05;
  double kT = 0.5;
  double omega_D = 100.0;
  double m = 1.0;
  double hbar = 1.0;

  /// Throws std::invalid_argument unless every field is positive and finite.
  void validate() const;
};

/// Largest |mu + n Omega| whose weight |c_n (mu + n Omega)| exceeds 1e-6 of the maximum.
double relevant_frequency(const FloquetSolution& sol);
/// 50 max(Omega, sqrt(mean stiffness), relevant_frequency).
double default_cutoff(const FloquetSolution& sol);

/// False when omega_D is not at least ten times every relevant frequency
/// (omega0, Omega and relevant_frequency).
bool cutoff_adequate(const BathSpec& bath, const FloquetSolution& sol);

enum class Scheme { Simple, ImprovedAveraged, RWA };

const char* scheme_name(Scheme s);
/// Parses "simple", "improved" or "rwa"; throws std::invalid_argument.
Scheme parse_scheme(const std::string& name);

struct RwaCoefficients {
  double d_xx = 0.0;
  double d_xp = 0.0;
  double d_pp = 0.0;
};

/// Transport coefficients of one Markov scheme. The RWA set is time
/// dependent and keeps the conservative (gamma = 0) Floquet basis around.
struct DiffusionSet {
  Scheme scheme = Scheme::Simple;
  double d_pp = 0.0;
  double d_xp = 0.0;
  double N = 0.0;
  double gamma = 0.0;
  double m = 1.0;
  double hbar = 1.0;
  std::shared_ptr<const FloquetSolution> rwa_basis;

  [[nodiscard]] RwaCoefficients rwa_at(double t) const;
};

/// Bose factor 1/(exp(hbar w / kT) - 1). Throws ZeroFrequency at w = 0.
double thermal_occupation(const BathSpec& bath, double omega);

/// (1/2) m hbar w0 coth(hbar w0 / 2kT).
double d_pp_simple(const BathSpec& bath, double omega0);

/// Cross diffusion -(hbar/pi) [psi(1 + hbar wD / 2 pi kT) + C].
double d_xp_drude(const BathSpec& bath);

/// Period-averaged quasienergy diffusion
///   (1/2) m hbar sum_n [c_n (mu + n Omega)]^2 coth(hbar (mu + n Omega) / 2kT)
/// from the conservative Floquet solution. Throws UnstableSolution.
double d_pp_improved(const FloquetSolution& sol0, const BathSpec& bath);

/// Same expression evaluated with complex mu and c_n, real part taken. Inside
/// unstable zones this is the smooth interpolation the formula provides; the
/// flag tells whether the value is physically meaningful.
struct ContinuedValue {
  double value = 0.0;
  bool valid = false;
};
ContinuedValue d_pp_improved_continued(const FloquetSolution& sol0, const BathSpec& bath);

/// N = sum_k c_k^2 (mu + k Omega) n_th(mu + k Omega). Throws UnstableSolution,
/// ResonantTerm when a quasienergy vanishes.
double effective_N(const FloquetSolution& sol0, const BathSpec& bath);

/// RWA coefficients at time t from xi1 xi2 products of the conservative basis.
RwaCoefficients rwa_coefficients(const FloquetSolution& sol0, double N, double t, double m = 1.0,
                                 double hbar = 1.0);

/// Convenience constructors. `omega0` for the simple scheme is sqrt(mean stiffness).
DiffusionSet make_simple(const BathSpec& bath, double omega0);
DiffusionSet make_improved(const FloquetSolution& sol0, const BathSpec& bath);
DiffusionSet make_rwa(const FloquetSolution& sol0, const BathSpec& bath);

}  // namespace parosc
