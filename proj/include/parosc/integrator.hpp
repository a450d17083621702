#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Core>

#include "parosc/errors.hpp"

namespace parosc {

struct StepControl {
  double rtol = 1e-9;
  double atol = 1e-12;
  double h_max = std::numeric_limits<double>::infinity();
  long max_steps = 50'000'000;
};

/// Embedded Dormand-Prince 5(4) stepper with FSAL and PI-free classic step
/// control. State is any Eigen column vector. The stepper remembers its step
/// size between advance() calls so that sampling a trajectory at many output
/// times does not restart the step-size search.
template <class State>
class DormandPrince {
 public:
  explicit DormandPrince(StepControl ctl = {}) : ctl_(ctl) {}

  /// Integrate dy/dt = f(t, y) from t to t_end (t_end >= t), landing exactly on t_end.
  template <class Rhs>
  void advance(Rhs&& f, double& t, State& y, double t_end) {
    if (t_end <= t) return;
    if (!fsal_valid_) {
      k1_ = f(t, y);
      fsal_valid_ = true;
    }
    if (h_ <= 0.0) h_ = initial_step(f, t, y, t_end);
    while (t < t_end) {
      if (++steps_ > ctl_.max_steps) throw StepFailure("DormandPrince: step budget exhausted");
      double h = std::min({h_, ctl_.h_max, t_end - t});
      const bool last = (h == t_end - t);
      State k2 = f(t + c2 * h, y + h * (a21 * k1_));
      State k3 = f(t + c3 * h, y + h * (a31 * k1_ + a32 * k2));
      State k4 = f(t + c4 * h, y + h * (a41 * k1_ + a42 * k2 + a43 * k3));
      State k5 = f(t + c5 * h, y + h * (a51 * k1_ + a52 * k2 + a53 * k3 + a54 * k4));
      State k6 = f(t + h, y + h * (a61 * k1_ + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      State y_new = y + h * (b1 * k1_ + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      State k7 = f(t + h, y_new);
      State err = h * (e1 * k1_ + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      const auto scale =
          (ctl_.atol + ctl_.rtol * y.cwiseAbs().cwiseMax(y_new.cwiseAbs()).array()).eval();
      const double en = std::sqrt((err.array() / scale).square().mean());
      if (!std::isfinite(en)) throw StepFailure("DormandPrince: non-finite error estimate");

      if (en <= 1.0) {
        t = last ? t_end : t + h;
        y = std::move(y_new);
        k1_ = std::move(k7);
        const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
        // Keep the unclipped step when the last step was shortened to hit t_end.
        if (!last || h == h_) h_ = h * fac;
      } else {
        h_ = h * std::max(0.2, 0.9 * std::pow(en, -0.2));
        if (h_ < 1e-14 * std::max(1.0, std::abs(t)))
          throw StepFailure("DormandPrince: step size underflow");
      }
    }
  }

  /// Invalidate the cached derivative (needed when y is modified externally).
  void reset() { fsal_valid_ = false; }
  [[nodiscard]] long steps() const { return steps_; }

 private:
  template <class Rhs>
  double initial_step(Rhs& f, double t, const State& y, double t_end) {
    const auto sc = (ctl_.atol + ctl_.rtol * y.cwiseAbs().array()).eval();
    const double d0 = std::sqrt((y.array() / sc).square().mean());
    const double d1 = std::sqrt((k1_.array() / sc).square().mean());
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, t_end - t);
    State y1 = y + h0 * k1_;
    State f1 = f(t + h0, y1);
    const double d2 = std::sqrt(((f1 - k1_).array() / sc).square().mean()) / h0;
    const double h1 = std::max(d1, d2) <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                                : std::pow(0.01 / std::max(d1, d2), 0.2);
    return std::min({100.0 * h0, h1, ctl_.h_max});
  }

  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // b - b* (fifth minus fourth order weights)
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  StepControl ctl_;
  double h_ = 0.0;
  State k1_;
  bool fsal_valid_ = false;
  long steps_ = 0;
};

}  // namespace parosc
