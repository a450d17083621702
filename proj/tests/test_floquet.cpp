#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "parosc/errors.hpp"
#include "parosc/floquet.hpp"
#include "support/reference.hpp"

using namespace parosc;

namespace {

const auto kFig = PeriodicStiffness::mathieu(6.5, 7.0);

}  // namespace

TEST_CASE("fifth-zone Floquet index of the reference oscillator") {
  const auto sol = solve_floquet(kFig, 0.0);
  REQUIRE(sol.stable);
  CHECK(std::abs(sol.mu.real() - 4.53513 * 0.5) < 5e-5);
  CHECK(sol.mu.imag() == 0.0);
  CHECK(std::abs(sol.sum_rule() - 1.0) < 1e-12);
  CHECK(sol.residual < 1e-12);
  CHECK(sol.edge_ratio() < 1e-12);
}

TEST_CASE("monodromy trace agrees with an independent integrator") {
  for (auto [w2, e, g] : {std::tuple{6.5, 7.0, 0.0}, {2.0, 1.0, 0.1}, {0.3, 0.2, 0.0}, {10.0, 4.0, 0.05}}) {
    const auto k = PeriodicStiffness::mathieu(w2, e);
    CHECK(monodromy_trace(k, g) == doctest::Approx(ref::rk_monodromy_trace(k, g)).epsilon(1e-8));
  }
}

TEST_CASE("2 cos(mu T) reproduces the monodromy trace, stable or not") {
  for (auto [w2, e, g] : {std::tuple{6.5, 7.0, 0.0}, {1.625, 3.5, 0.0}, {0.25, 0.6, 0.0}, {1.0, 2.0, 0.1}}) {
    const auto k = PeriodicStiffness::mathieu(w2, e);
    const auto sol = solve_floquet(k, g);
    const double T = k.period();
    const double want = ref::rk_monodromy_trace(k, g);
    CHECK(std::abs(2.0 * std::cos(sol.mu * T).real() - want) < 1e-8 * std::max(1.0, std::abs(want)));
    CHECK(std::abs(std::cos(sol.mu * T).imag()) < 1e-8 * std::max(1.0, std::abs(want)));
    if (!sol.stable) {
      const double half = sol.mu.real() / (0.5 * k.Omega());
      CHECK(half == doctest::Approx(std::round(half)).epsilon(1e-12));
    }
  }
}

TEST_CASE("the scaled-unit label (6.5, 7) is an unstable point, the physical one is stable") {
  // (6.5, 7) read as scaled values is omega0^2 = 1.625, eps = 3.5 in units of Omega.
  CHECK_FALSE(solve_floquet(PeriodicStiffness::mathieu(1.625, 3.5), 0.0).stable);
  CHECK(solve_floquet(kFig, 0.0).stable);
  // The scaled equation x'' + (26 + 2*14 cos 2t) x = 0 is the same oscillator.
  const auto scaled = solve_floquet(PeriodicStiffness::mathieu(26.0, 28.0, 2.0), 0.0);
  REQUIRE(scaled.stable);
  CHECK(std::abs(scaled.mu.real() - 4.53513) < 1e-4);
}

TEST_CASE("undriven limit") {
  for (double g : {0.0, 0.3}) {
    const auto sol = solve_floquet(PeriodicStiffness::mathieu(2.0, 0.0), g);
    REQUIRE(sol.stable);
    const double mu = std::sqrt(2.0 - 0.25 * g * g);
    CHECK(sol.mu.real() == doctest::Approx(mu).epsilon(1e-13));
    CHECK(sol.coeff(0) == doctest::Approx(1.0 / std::sqrt(mu)).epsilon(1e-13));
    CHECK(sol.weight_A() == doctest::Approx(1.0 / mu).epsilon(1e-13));
  }
}

TEST_CASE("Mathieu and general cosine forms give the same solution") {
  const auto a = solve_floquet(kFig, 0.02);
  const auto b = solve_floquet(PeriodicStiffness(GeneralCosine{1.0, {6.5, 7.0}}), 0.02);
  CHECK(a.mu.real() == doctest::Approx(b.mu.real()).epsilon(1e-11));
  for (int n = -5; n <= 5; ++n) CHECK(std::abs(a.coeff(n) - b.coeff(n)) < 1e-10);
}

TEST_CASE("general cosine stiffness with several harmonics satisfies the ODE") {
  const PeriodicStiffness k(GeneralCosine{1.3, {3.0, 1.2, -0.5, 0.2}});
  const auto sol = solve_floquet(k, 0.07);
  REQUIRE(sol.stable);
  for (double t : {0.0, 0.4, 1.7, 5.0}) {
    const XiValue x = xi1_series(sol, t);
    const cdouble res = x.ddxi + (k(t) - 0.25 * 0.07 * 0.07) * x.xi;
    CHECK(std::abs(res) < 1e-9 * std::abs(x.ddxi) + 1e-11);
  }
}

TEST_CASE("Floquet series solves the shifted equation") {
  const auto sol = solve_floquet(kFig, 0.05);
  for (double t : {0.0, 0.3, 1.1, 2.9, 4.4}) {
    const XiValue x = xi1_series(sol, t);
    const cdouble res = x.ddxi + (kFig(t) - 0.25 * 0.05 * 0.05) * x.xi;
    CHECK(std::abs(res) < 1e-9 * std::max(1.0, std::abs(x.ddxi)));
    // quasi-periodicity
    const XiValue y = xi1_series(sol, t + sol.period());
    CHECK(std::abs(y.xi - std::exp(cdouble(0.0, sol.mu.real() * sol.period())) * x.xi) < 1e-11);
  }
}

TEST_CASE("Brillouin shifts leave the solution unchanged") {
  const auto sol = solve_floquet(kFig, 0.0);
  const auto s2 = shift_brillouin(sol, 2);
  CHECK(s2.mu.real() == doctest::Approx(sol.mu.real() + 2.0).epsilon(1e-15));
  for (double t : {0.0, 0.7, 2.0}) CHECK(std::abs(xi1_series(s2, t).xi - xi1_series(sol, t).xi) < 1e-12);
  CHECK(s2.sum_rule() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Green function matches direct integration") {
  const double g = 0.05;
  const auto sol = solve_floquet(kFig, g);
  for (auto [t, tp] : {std::pair{1.0, 0.2}, {5.0, 0.0}, {3.3, 2.9}, {12.0, 7.5}}) {
    const auto G = green_function(sol, t, tp);
    const auto r = ref::rk_solution(kFig, g, 0.0, 1.0, tp, t);
    CHECK(std::abs(G.g - r[0]) < 1e-9);
    CHECK(std::abs(G.dt - r[1]) < 1e-8);
    const double h = 1e-5;
    const double fd = (green_function(sol, t, tp + h).g - green_function(sol, t, tp - h).g) / (2 * h);
    CHECK(std::abs(G.dtp - fd) < 1e-6);
    const double fdt = (green_function(sol, t, tp + h).dt - green_function(sol, t, tp - h).dt) / (2 * h);
    CHECK(std::abs(G.dtdtp - fdt) < 1e-5);
    CHECK(std::abs(G.dtt + g * G.dt + kFig(t) * G.g) < 1e-8);
  }
  const auto G = green_function(sol, 2.0, 2.0);
  CHECK(std::abs(G.g) < 1e-15);
  CHECK(G.dt == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("classical trajectory matches direct integration") {
  const double g = 0.05, m = 2.0;
  const auto sol = solve_floquet(kFig, g);
  for (double t : {0.5, 3.0, 17.0}) {
    const auto ph = classical_trajectory(sol, 0.4, -1.2, 0.3, t, m);
    const auto r = ref::rk_solution(kFig, g, 0.4, -1.2 / m, 0.3, t);
    CHECK(std::abs(ph.x - r[0]) < 1e-9);
    CHECK(std::abs(ph.p - m * r[1]) < 1e-8);
  }
}

TEST_CASE("unstable solutions refuse real-valued evaluation") {
  const auto sol = solve_floquet(PeriodicStiffness::mathieu(1.625, 3.5), 0.0);
  CHECK_FALSE(sol.stable);
  CHECK(sol.coeffs.empty());
  CHECK_THROWS_AS(fundamental_solutions(sol, 0.0), UnstableSolution);
  CHECK_THROWS_AS(green_function(sol, 1.0, 0.0), UnstableSolution);
  CHECK_THROWS_AS(solve_floquet(kFig, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(PeriodicStiffness::mathieu(1.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("sum rule and Wronskian on random stable points") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> w2(0.2, 12.0), e(0.0, 8.0);
  int found = 0;
  while (found < 20) {
    const auto k = PeriodicStiffness::mathieu(w2(rng), e(rng));
    const auto sol = solve_floquet(k, 0.0);
    if (!sol.stable || sol.borderline) continue;
    ++found;
    CHECK(std::abs(sol.sum_rule() - 1.0) < 1e-10);
    const auto f0 = fundamental_solutions(sol, 0.0);
    const cdouble W0 = f0.xi1 * f0.dxi2 - f0.dxi1 * f0.xi2;
    CHECK(std::abs(std::abs(W0) - 2.0) < 1e-9);
    for (double t : {0.9, 2.5, 4.0}) {
      const auto f = fundamental_solutions(sol, t);
      CHECK(std::abs(f.xi1 * f.dxi2 - f.dxi1 * f.xi2 - W0) < 1e-9);
    }
  }
}

TEST_CASE("stability chart") {
  const Range r0{0.5, 10.0}, re{0.0, 8.0};
  const auto par = stability_chart(r0, re, 12, 9, 0.0);
  const auto ser = stability_chart_serial(r0, re, 12, 9, 0.0);
  REQUIRE(par.size() == 108);
  for (std::size_t i = 0; i < par.size(); ++i) {
    CHECK(par[i].omega0_sq == ser[i].omega0_sq);
    CHECK(par[i].eps == ser[i].eps);
    CHECK(par[i].mu_re == ser[i].mu_re);
    CHECK(par[i].mu_im == ser[i].mu_im);
    CHECK(par[i].stable == ser[i].stable);
    CHECK(par[i].converged);
    if (par[i].eps == 0.0) CHECK(par[i].stable);
  }
  // rows are omega0_sq-major
  CHECK(par[1].omega0_sq == par[0].omega0_sq);
  CHECK(par[9].omega0_sq > par[0].omega0_sq);
}
