#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/digamma.hpp>

#include "parosc/errors.hpp"
#include "parosc/evolution.hpp"
#include "parosc/special.hpp"
#include "support/reference.hpp"

using namespace parosc;

namespace {

const auto kFig = PeriodicStiffness::mathieu(6.5, 7.0);

}  // namespace

TEST_CASE("bath validation and occupation numbers") {
  CHECK_THROWS_AS(BathSpec({0.0, 0.5, 100.0, 1.0, 1.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(BathSpec({0.1, -1.0, 100.0, 1.0, 1.0}).validate(), std::invalid_argument);
  const BathSpec bath{0.05, 0.5, 100.0, 1.0, 1.0};
  CHECK_THROWS_AS(thermal_occupation(bath, 0.0), ZeroFrequency);
  CHECK(thermal_occupation(bath, 1.0) == doctest::Approx(1.0 / (std::exp(2.0) - 1.0)).epsilon(1e-15));
  CHECK(thermal_occupation(bath, -1.0) == doctest::Approx(-1.0 - 1.0 / (std::exp(2.0) - 1.0)).epsilon(1e-14));
}

TEST_CASE("simple diffusion constant limits") {
  const double w0 = 1.7;
  BathSpec hot{0.05, 1e4, 100.0, 2.0, 1.0};
  CHECK(d_pp_simple(hot, w0) / (hot.m * hot.kT) == doctest::Approx(1.0).epsilon(1e-8));
  BathSpec cold{0.05, 1e-3, 100.0, 2.0, 1.0};
  CHECK(d_pp_simple(cold, w0) == doctest::Approx(0.5 * cold.m * cold.hbar * w0).epsilon(1e-14));
  CHECK_THROWS_AS(d_pp_simple(cold, 0.0), std::invalid_argument);
}

TEST_CASE("cross diffusion matches its digamma expression") {
  for (double kT : {0.05, 0.5, 3.0})
    for (double wD : {10.0, 463.0}) {
      const BathSpec bath{0.05, kT, wD, 1.0, 1.0};
      const double want = -1.0 / std::numbers::pi *
                          (boost::math::digamma(1.0 + wD / (2.0 * std::numbers::pi * kT)) + kEulerGamma);
      CHECK(d_xp_drude(bath) == doctest::Approx(want).epsilon(1e-13));
      CHECK(d_xp_drude(bath) < 0.0);
    }
  // vanishes logarithmically slowly; at hbar wD / kT = 1e-3 it is tiny
  const BathSpec hot{0.05, 100.0, 0.1, 1.0, 1.0};
  CHECK(std::abs(d_xp_drude(hot)) < 1e-4);
}

TEST_CASE("improved scheme equals the simple one without driving") {
  for (double w2 : {0.5, 2.0, 6.5}) {
    const auto sol0 = solve_floquet(PeriodicStiffness::mathieu(w2, 0.0), 0.0);
    const BathSpec bath{0.05, 0.5, 200.0, 1.3, 1.0};
    CHECK(d_pp_improved(sol0, bath) == doctest::Approx(d_pp_simple(bath, std::sqrt(w2))).epsilon(1e-12));
    CHECK(effective_N(sol0, bath) == doctest::Approx(thermal_occupation(bath, std::sqrt(w2))).epsilon(1e-12));
  }
}

TEST_CASE("improved diffusion matches the Lorentzian-regularized frequency integral") {
  const auto sol0 = solve_floquet(kFig, 0.0);
  const BathSpec bath{0.05, 0.5, 1e4, 1.0, 1.0};
  const double want = ref::lorentzian_dpp(sol0, bath, 1e-4);
  CHECK(d_pp_improved(sol0, bath) == doctest::Approx(want).epsilon(2e-3));
}

TEST_CASE("improved diffusion needs the conservative stable solution") {
  const BathSpec bath{0.05, 0.5, 100.0, 1.0, 1.0};
  CHECK_THROWS_AS(d_pp_improved(solve_floquet(kFig, 0.05), bath), std::invalid_argument);
  CHECK_THROWS_AS(d_pp_improved(solve_floquet(PeriodicStiffness::mathieu(1.625, 3.5), 0.0), bath),
                  UnstableSolution);
  CHECK_THROWS_AS(effective_N(solve_floquet(PeriodicStiffness::mathieu(1.625, 3.5), 0.0), bath), UnstableSolution);
}

TEST_CASE("continued improved diffusion stays finite through unstable zones") {
  const BathSpec bath{0.05, 0.5, 100.0, 1.0, 1.0};
  int unstable = 0;
  for (int i = 0; i <= 60; ++i) {
    const auto sol0 = solve_floquet(PeriodicStiffness::mathieu(6.5, 7.0 * i / 60.0), 0.0);
    const auto cv = d_pp_improved_continued(sol0, bath);
    CHECK(std::isfinite(cv.value));
    if (cv.valid) {
      CHECK(cv.value == doctest::Approx(d_pp_improved(sol0, bath)).epsilon(1e-13));
    } else {
      ++unstable;
    }
  }
  // also a point deep inside the first resonance tongue
  const auto tongue = solve_floquet(PeriodicStiffness::mathieu(0.25, 0.3), 0.0);
  CHECK_FALSE(tongue.stable);
  CHECK(std::isfinite(d_pp_improved_continued(tongue, bath).value));
  CHECK_FALSE(d_pp_improved_continued(tongue, bath).valid);
  CHECK(unstable > 0);
}

TEST_CASE("RWA coefficients yield the minimum-uncertainty-type determinant") {
  const auto sol0 = solve_floquet(kFig, 0.0);
  const BathSpec bath{0.05, 0.5, 100.0, 1.0, 1.0};
  const double N = effective_N(sol0, bath);
  for (double t : {0.0, 0.6, 2.2}) {
    const auto c = rwa_coefficients(sol0, N, t);
    CHECK(c.d_xx * c.d_pp - 0.25 * c.d_xp * c.d_xp == doctest::Approx((N + 0.5) * (N + 0.5)).epsilon(1e-10));
  }
}

TEST_CASE("scheme names and cutoff helpers") {
  CHECK(parse_scheme("simple") == Scheme::Simple);
  CHECK(parse_scheme("improved") == Scheme::ImprovedAveraged);
  CHECK(parse_scheme("rwa") == Scheme::RWA);
  CHECK_THROWS_AS(parse_scheme("exact"), std::invalid_argument);
  CHECK(std::string(scheme_name(Scheme::RWA)) == "rwa");
  const auto sol0 = solve_floquet(kFig, 0.0);
  CHECK(relevant_frequency(sol0) > 9.0);
  CHECK(relevant_frequency(sol0) < 30.0);
  BathSpec bath{0.05, 0.5, default_cutoff(sol0), 1.0, 1.0};
  CHECK(cutoff_adequate(bath, sol0));
  bath.omega_D = 20.0;
  CHECK_FALSE(cutoff_adequate(bath, sol0));
}

TEST_CASE("convenience constructors") {
  const auto sol0 = solve_floquet(kFig, 0.0);
  const BathSpec bath{0.05, 0.5, 100.0, 1.0, 1.0};
  const auto s = make_simple(bath, std::sqrt(6.5));
  const auto i = make_improved(sol0, bath);
  const auto r = make_rwa(sol0, bath);
  CHECK(s.scheme == Scheme::Simple);
  CHECK(i.d_xp == s.d_xp);
  CHECK(i.d_pp < s.d_pp);
  CHECK(r.rwa_basis != nullptr);
  CHECK(r.N == doctest::Approx(effective_N(sol0, bath)).epsilon(1e-15));
  CHECK_THROWS_AS((void)s.rwa_at(0.0), std::logic_error);
}
