#pragma once

#include <cmath>

namespace parosc {

/// Dimensionless "scaled" quantities used for presentation:
///   t~ = Omega t / 2,  w0~^2 = 4 w0^2 / Omega^2,  eps~ = 2 eps / Omega^2,
///   x~ = x / sqrt(2 hbar / m Omega),  p~ = p / sqrt(m hbar Omega / 2),
/// extended consistently to rates (gamma~ = 2 gamma / Omega) and energies
/// (in units of hbar Omega / 2). A scaled Mathieu equation reads
///   x~'' + (w0~^2 + 2 eps~ cos 2 t~) x~ = 0,  with period pi.
struct ScaledUnits {
  double Omega = 1.0;
  double m = 1.0;
  double hbar = 1.0;

  [[nodiscard]] double time_to_scaled(double t) const { return 0.5 * Omega * t; }
  [[nodiscard]] double time_from_scaled(double t) const { return 2.0 * t / Omega; }
  [[nodiscard]] double rate_to_scaled(double w) const { return 2.0 * w / Omega; }
  [[nodiscard]] double rate_from_scaled(double w) const { return 0.5 * w * Omega; }
  [[nodiscard]] double omega0_sq_to_scaled(double w2) const { return 4.0 * w2 / (Omega * Omega); }
  [[nodiscard]] double omega0_sq_from_scaled(double w2) const { return 0.25 * w2 * Omega * Omega; }
  [[nodiscard]] double eps_to_scaled(double e) const { return 2.0 * e / (Omega * Omega); }
  [[nodiscard]] double eps_from_scaled(double e) const { return 0.5 * e * Omega * Omega; }
  [[nodiscard]] double energy_to_scaled(double E) const { return 2.0 * E / (hbar * Omega); }
  [[nodiscard]] double energy_from_scaled(double E) const { return 0.5 * E * hbar * Omega; }

  [[nodiscard]] double x_unit() const { return std::sqrt(2.0 * hbar / (m * Omega)); }
  [[nodiscard]] double p_unit() const { return std::sqrt(0.5 * m * hbar * Omega); }
  [[nodiscard]] double x_to_scaled(double x) const { return x / x_unit(); }
  [[nodiscard]] double x_from_scaled(double x) const { return x * x_unit(); }
  [[nodiscard]] double p_to_scaled(double p) const { return p / p_unit(); }
  [[nodiscard]] double p_from_scaled(double p) const { return p * p_unit(); }
  [[nodiscard]] double sxx_to_scaled(double s) const { return s / (x_unit() * x_unit()); }
  [[nodiscard]] double sxp_to_scaled(double s) const { return s / (x_unit() * p_unit()); }
  [[nodiscard]] double spp_to_scaled(double s) const { return s / (p_unit() * p_unit()); }
  [[nodiscard]] double sxx_from_scaled(double s) const { return s * x_unit() * x_unit(); }
  [[nodiscard]] double sxp_from_scaled(double s) const { return s * x_unit() * p_unit(); }
  [[nodiscard]] double spp_from_scaled(double s) const { return s * p_unit() * p_unit(); }
};

}  // namespace parosc
