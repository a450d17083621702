#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <variant>
#include <vector>

namespace parosc {

/// k(t)/m = omega0_sq + epsilon cos(Omega t).
struct Mathieu {
  double omega0_sq = 0.0;
  double epsilon = 0.0;
  double Omega = 1.0;
};

/// k(t)/m = sum_l a[l] cos(l Omega t).
struct GeneralCosine {
  double Omega = 1.0;
  std::vector<double> a;
};

/// Periodic, time-symmetric stiffness per unit mass. All quantities carry
/// units of frequency squared; the mass is supplied separately by the bath.
class PeriodicStiffness {
 public:
  PeriodicStiffness(Mathieu m) : form_(m), a_{m.omega0_sq, m.epsilon} { validate(); }  // NOLINT
  PeriodicStiffness(GeneralCosine g) : form_(g), a_(std::move(g.a)) { validate(); }  // NOLINT

  static PeriodicStiffness mathieu(double omega0_sq, double epsilon, double Omega = 1.0) {
    return PeriodicStiffness(Mathieu{omega0_sq, epsilon, Omega});
  }

  [[nodiscard]] double Omega() const {
    return std::visit([](const auto& f) { return f.Omega; }, form_);
  }
  [[nodiscard]] double period() const { return 2.0 * std::numbers::pi / Omega(); }

  /// Mean value a_0, i.e. omega0^2 of the undriven oscillator.
  [[nodiscard]] double mean() const { return a_.empty() ? 0.0 : a_.front(); }

  /// Cosine coefficients a_0..a_L, Mathieu mapped to {omega0_sq, epsilon}.
  [[nodiscard]] const std::vector<double>& cosine_coefficients() const { return a_; }

  [[nodiscard]] bool is_mathieu() const { return std::holds_alternative<Mathieu>(form_); }
  [[nodiscard]] const Mathieu* as_mathieu() const { return std::get_if<Mathieu>(&form_); }

  /// True when every oscillating coefficient vanishes.
  [[nodiscard]] bool undriven() const {
    for (std::size_t l = 1; l < a_.size(); ++l)
      if (a_[l] != 0.0) return false;
    return true;
  }

  /// k(t)/m.
  [[nodiscard]] double operator()(double t) const {
    const auto& a = a_;
    const double w = Omega();
    double s = a.empty() ? 0.0 : a[0];
    for (std::size_t l = 1; l < a.size(); ++l) s += a[l] * std::cos(double(l) * w * t);
    return s;
  }

  /// d/dt of k(t)/m.
  [[nodiscard]] double derivative(double t) const {
    const auto& a = a_;
    const double w = Omega();
    double s = 0.0;
    for (std::size_t l = 1; l < a.size(); ++l)
      s -= a[l] * double(l) * w * std::sin(double(l) * w * t);
    return s;
  }

 private:
  void validate() const {
    if (!(Omega() > 0.0) || !std::isfinite(Omega()))
      throw std::invalid_argument("PeriodicStiffness: Omega must be positive");
    for (double c : a_)
      if (!std::isfinite(c)) throw std::invalid_argument("PeriodicStiffness: non-finite coefficient");
  }

  std::variant<Mathieu, GeneralCosine> form_;
  std::vector<double> a_;
};

}  // namespace parosc
