#include <cmath>
#include <exception>
#include <limits>

#include "parosc/floquet.hpp"

namespace parosc {

namespace {

double grid_point(Range r, int n, int i) {
  return n == 1 ? r.lo : r.lo + (r.hi - r.lo) * double(i) / double(n - 1);
}

ChartRecord chart_node(Range omega0_sq, Range eps, int n0, int ne, int idx, double gamma,
                       double Omega, double tol) {
  ChartRecord rec;
  rec.omega0_sq = grid_point(omega0_sq, n0, idx / ne);
  rec.eps = grid_point(eps, ne, idx % ne);
  try {
    const auto sol = solve_floquet(PeriodicStiffness::mathieu(rec.omega0_sq, rec.eps, Omega), gamma, tol);
    rec.mu_re = sol.mu.real();
    rec.mu_im = sol.mu.imag();
    rec.stable = sol.stable;
  } catch (const std::exception&) {
    rec.mu_re = rec.mu_im = std::numeric_limits<double>::quiet_NaN();
    rec.converged = false;
  }
  return rec;
}

void check_grid(int n0, int ne) {
  if (n0 < 1 || ne < 1) throw std::invalid_argument("stability_chart: grid sizes must be positive");
}

}  // namespace

std::vector<ChartRecord> stability_chart(Range omega0_sq, Range eps, int n0, int ne, double gamma,
                                         double Omega, double tol) {
  check_grid(n0, ne);
  const int total = n0 * ne;
  std::vector<ChartRecord> out(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(dynamic, 4)
  for (int i = 0; i < total; ++i)
    out[std::size_t(i)] = chart_node(omega0_sq, eps, n0, ne, i, gamma, Omega, tol);
  return out;
}

std::vector<ChartRecord> stability_chart_serial(Range omega0_sq, Range eps, int n0, int ne,
                                                double gamma, double Omega, double tol) {
  check_grid(n0, ne);
  const int total = n0 * ne;
  std::vector<ChartRecord> out;
  out.reserve(std::size_t(total));
  for (int i = 0; i < total; ++i) out.push_back(chart_node(omega0_sq, eps, n0, ne, i, gamma, Omega, tol));
  return out;
}

}  // namespace parosc
