#include <cmath>
#include <stdexcept>

#include "parosc/errors.hpp"
#include "parosc/evolution.hpp"

namespace parosc {

namespace {

constexpr double kTopPopulationLimit = 1e-8;

/// Lindblad generator with the truncated shift operator; Gamma Gamma^dagger
/// vanishes on the top level so the trace is conserved exactly.
Eigen::MatrixXcd generator(const Eigen::MatrixXcd& r, double N, double gamma) {
  const int A = int(r.rows()) - 1;
  Eigen::MatrixXcd d(r.rows(), r.cols());
  auto down = [A](int a) { return a < A ? double(a + 1) : 0.0; };  // (Gamma Gamma^dagger)_aa
  for (int a = 0; a <= A; ++a) {
    for (int b = 0; b <= A; ++b) {
      cdouble v = -(N + 1.0) * double(a + b) * r(a, b) - N * (down(a) + down(b)) * r(a, b);
      if (a < A && b < A) v += 2.0 * (N + 1.0) * std::sqrt(double(a + 1) * double(b + 1)) * r(a + 1, b + 1);
      if (a > 0 && b > 0) v += 2.0 * N * std::sqrt(double(a) * double(b)) * r(a - 1, b - 1);
      d(a, b) = 0.5 * gamma * v;
    }
  }
  return d;
}

void check_top(const Eigen::MatrixXcd& r, double t) {
  const int A = int(r.rows()) - 1;
  double top = r(A, A).real();
  if (A > 0) top += r(A - 1, A - 1).real();
  if (top > kTopPopulationLimit)
    throw TruncationOverflow("rwa_density_propagate: top-level population " + std::to_string(top) +
                             " at t = " + std::to_string(t) + "; raise a_max");
}

}  // namespace

FloquetDensityMatrix FloquetDensityMatrix::fock(int a_max, int level) {
  if (a_max < 1 || level < 0 || level > a_max)
    throw std::invalid_argument("FloquetDensityMatrix::fock: level outside 0..a_max");
  FloquetDensityMatrix d{a_max, Eigen::MatrixXcd::Zero(a_max + 1, a_max + 1)};
  d.rho(level, level) = 1.0;
  return d;
}

FloquetDensityMatrix FloquetDensityMatrix::thermal(int a_max, double N) {
  if (a_max < 1 || !(N >= 0.0)) throw std::invalid_argument("FloquetDensityMatrix::thermal: bad input");
  FloquetDensityMatrix d{a_max, Eigen::MatrixXcd::Zero(a_max + 1, a_max + 1)};
  const double q = N / (N + 1.0);
  double p = 1.0 / (N + 1.0);
  double total = 0.0;
  for (int a = 0; a <= a_max; ++a, p *= q) {
    d.rho(a, a) = p;
    total += p;
  }
  d.rho /= total;
  return d;
}

double FloquetDensityMatrix::trace() const { return rho.trace().real(); }

double FloquetDensityMatrix::mean_level() const {
  double s = 0.0;
  for (int a = 0; a <= a_max; ++a) s += a * rho(a, a).real();
  return s;
}

FloquetDensityMatrix rwa_density_propagate(
    const FloquetDensityMatrix& rho0, double N, double gamma, double t1, double dt,
    const std::function<void(double, const FloquetDensityMatrix&)>& observer) {
  if (!(N >= 0.0) || !(gamma > 0.0) || !(dt > 0.0) || !(t1 >= 0.0))
    throw std::invalid_argument("rwa_density_propagate: need N >= 0, gamma > 0, dt > 0, t1 >= 0");
  if (rho0.rho.rows() != rho0.a_max + 1 || rho0.rho.cols() != rho0.a_max + 1)
    throw std::invalid_argument("rwa_density_propagate: matrix size does not match a_max");
  FloquetDensityMatrix cur = rho0;
  check_top(cur.rho, 0.0);
  const long steps = std::max(1L, long(std::ceil(t1 / dt - 1e-9)));
  const double h = t1 / double(steps);
  for (long s = 1; s <= steps; ++s) {
    const Eigen::MatrixXcd& r = cur.rho;
    const Eigen::MatrixXcd k1 = generator(r, N, gamma);
    const Eigen::MatrixXcd k2 = generator(r + 0.5 * h * k1, N, gamma);
    const Eigen::MatrixXcd k3 = generator(r + 0.5 * h * k2, N, gamma);
    const Eigen::MatrixXcd k4 = generator(r + h * k3, N, gamma);
    cur.rho = r + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double t = h * double(s);
    check_top(cur.rho, t);
    if (observer) observer(t, cur);
  }
  return cur;
}

}  // namespace parosc
