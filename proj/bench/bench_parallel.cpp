#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <vector>

#include <omp.h>

#include "parosc/dissipation.hpp"
#include "parosc/evolution.hpp"
#include "parosc/floquet.hpp"
#include "parosc/oracle.hpp"

using namespace parosc;

namespace {

double best_of(int reps, const std::function<void()>& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto a = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - a).count());
  }
  return best;
}

void report(const char* name, double serial, double parallel, double diff) {
  std::printf("%-18s serial %9.4f s  parallel %9.4f s  speedup %5.2f  max |diff| %.2e\n", name, serial,
              parallel, serial / parallel, diff);
}

}  // namespace

int main() {
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
  const double Omega = 2.0;
  const auto k = PeriodicStiffness::mathieu(6.5, 7.0, Omega);

  {
    std::vector<ChartRecord> a, b;
    const double ts = best_of(3, [&] { a = stability_chart_serial({0, 10}, {0, 10}, 60, 60, 0.0, Omega, 1e-10); });
    const double tp = best_of(3, [&] { b = stability_chart({0, 10}, {0, 10}, 60, 60, 0.0, Omega, 1e-10); });
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i].converged && b[i].converged) d = std::max(d, std::abs(a[i].mu_re - b[i].mu_re));
    report("stability_chart", ts, tp, d);
  }

  const auto sol = solve_floquet(k, 0.05);
  {
    GreenIntegrals a, b;
    const double t = 0.3, t0 = -400.0;
    const double ts = best_of(5, [&] { a = green_integrals_serial(sol, t, t0); });
    const double tp = best_of(5, [&] { b = green_integrals(sol, t, t0); });
    report("green_integrals", ts, tp,
           std::max({std::abs(a.gg - b.gg), std::abs(a.g_dg - b.g_dg), std::abs(a.dg_dg - b.dg_dg)}));
  }
  {
    const BathSpec bath{0.05, 0.5, default_cutoff(solve_floquet(k, 0.0)), 1.0, 1.0};
    const NoiseKernel K(bath);
    CovarianceState a, b;
    const double ts = best_of(2, [&] { a = exact_variances_serial(sol, K, 0.7, 1e-8); });
    const double tp = best_of(2, [&] { b = exact_variances(sol, K, 0.7, 1e-8); });
    report("exact_variances", ts, tp,
           std::max({std::abs(a.sigma_xx - b.sigma_xx), std::abs(a.sigma_xp - b.sigma_xp),
                     std::abs(a.sigma_pp - b.sigma_pp)}));
  }
}
