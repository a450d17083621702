#include "parosc/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "parosc/errors.hpp"
#include "parosc/special.hpp"

namespace parosc {

NoiseKernel::NoiseKernel(BathSpec bath, int matsubara_terms) : bath_(bath), terms_(matsubara_terms) {
  bath_.validate();
  if (terms_ < 10) throw std::invalid_argument("NoiseKernel: need at least 10 Matsubara terms");
}

double NoiseKernel::spectrum(double omega) const {
  const double wD = bath_.omega_D;
  const double x = 0.5 * bath_.hbar * omega / bath_.kT;
  // (hbar/pi) m gamma w coth(x) = (2 m gamma kT / pi) x coth(x)
  return 2.0 * bath_.m * bath_.gamma * bath_.kT / std::numbers::pi * wD * wD / (omega * omega + wD * wD) *
         x_coth(x);
}

double NoiseKernel::operator()(double tau) const {
  tau = std::abs(tau);
  if (tau == 0.0) return std::numeric_limits<double>::infinity();
  const double wD = bath_.omega_D;
  const double nu1 = 2.0 * std::numbers::pi * bath_.kT / bath_.hbar;
  const double eD = std::exp(-wD * tau);
  // sum_k (wD e^{-wD tau} - nu_k e^{-nu_k tau}) / (wD^2 - nu_k^2)
  //   = sum_k [wD eD / (wD^2 - nu_k^2) + e^{-nu_k tau} wD^2 / (nu_k (nu_k^2 - wD^2))]
  //     + sum_k e^{-nu_k tau} / nu_k
  double s = -std::log1p(-std::exp(-nu1 * tau)) / nu1;
  for (int k = 1; k <= terms_; ++k) {
    const double nu = nu1 * k;
    const double en = std::exp(-nu * tau);
    if (std::abs(nu - wD) < 1e-6 * wD) {
      s += (1.0 - wD * tau) * eD / (2.0 * wD) - en / nu;  // confluent limit of the full term
    } else {
      s += wD * eD / (wD * wD - nu * nu) + en * wD * wD / (nu * (nu * nu - wD * wD));
    }
  }
  // remaining wD eD / (wD^2 - nu_k^2) ~ -wD eD / nu_k^2 for k > terms
  s -= wD * eD / (nu1 * nu1 * (terms_ + 0.5));
  return bath_.m * bath_.gamma * bath_.kT * wD * (eD + 2.0 * wD * s);
}

std::vector<double> NoiseKernel::sample(const std::vector<double>& taus) const {
  std::vector<double> out(taus.size());
  for (std::size_t i = 0; i < taus.size(); ++i) out[i] = (*this)(taus[i]);
  return out;
}

namespace {

struct Resolvent {
  const FloquetSolution& sol;
  std::vector<cdouble> cp;  // c_n e^{-i w_n t}
  std::vector<double> wn;
  cdouble xi, eta;          // xi(t), xi'(t) - gamma xi(t)/2
  double half_gamma;

  Resolvent(const FloquetSolution& s, double t) : sol(s), half_gamma(0.5 * s.gamma) {
    const int N = s.n_max;
    double cmax = 0.0;
    for (int n = -N; n <= N; ++n) cmax = std::max(cmax, std::abs(s.coeff(n)));
    for (int n = -N; n <= N; ++n) {
      if (std::abs(s.coeff(n)) <= 1e-17 * cmax) continue;
      wn.push_back(s.frequency(n));
      cp.push_back(s.coeff(n) * std::polar(1.0, -s.frequency(n) * t));
    }
    const XiValue x = xi1_series(s, t);
    xi = x.xi;
    eta = x.dxi - half_gamma * x.xi;
  }

  /// Fourier transforms (phase removed) of G(t, .) and dG/dt(t, .).
  std::array<cdouble, 2> operator()(double w) const {
    const cdouble I(0.0, 1.0);
    cdouble A = 0.0, B = 0.0;
    for (std::size_t i = 0; i < wn.size(); ++i) {
      A += cp[i] / (half_gamma + I * (w - wn[i]));
      B += std::conj(cp[i]) / (half_gamma + I * (w + wn[i]));
    }
    const cdouble R = (xi * A - std::conj(xi) * B) / (2.0 * I);
    const cdouble Rt = (eta * A - std::conj(eta) * B) / (2.0 * I);
    return {R, Rt};
  }
};

std::vector<double> breakpoints(const FloquetSolution& sol, const BathSpec& bath) {
  const int N = sol.n_max;
  double cmax = 0.0;
  for (int n = -N; n <= N; ++n) cmax = std::max(cmax, std::abs(sol.coeff(n)));
  const double g = std::max(sol.gamma, 1e-6 * sol.Omega());
  std::vector<double> b{0.0, bath.omega_D};
  for (int n = -N; n <= N; ++n) {
    if (std::abs(sol.coeff(n)) < 1e-10 * cmax) continue;
    const double w = std::abs(sol.frequency(n));
    for (double off : {0.0, 0.5, 2.0, 8.0, 32.0}) {
      b.push_back(w + off * g);
      if (w - off * g > 0.0) b.push_back(w - off * g);
    }
  }
  std::sort(b.begin(), b.end());
  std::vector<double> u;
  for (double v : b)
    if (u.empty() || v - u.back() > 1e-12 * std::max(1.0, v)) u.push_back(v);
  return u;
}

using Parts = std::array<double, 3>;

/// Gauss-Kronrod (7, 15) estimate of the three covariance integrands on [a, b]
/// of the variable u, with w = map(u) and dw/du = jac(u).
struct Piece {
  double a = 0.0, b = 0.0;
  Parts value{}, error{}, l1{};
};

class OracleIntegrand {
 public:
  OracleIntegrand(const Resolvent& res, const NoiseKernel& K, double m, double lo, double hi)
      : res_(res), K_(K), m_(m), lo_(lo), infinite_(std::isinf(hi)), hi_(hi) {}

  /// The integration variable runs over [0, 1]; the tail uses w = lo + u/(1-u).
  Parts operator()(double u) const {
    double w = 0.0, jac = 0.0;
    if (infinite_) {
      if (u >= 1.0) return {0.0, 0.0, 0.0};
      w = lo_ + u / (1.0 - u);
      jac = 1.0 / ((1.0 - u) * (1.0 - u));
    } else {
      w = lo_ + (hi_ - lo_) * u;
      jac = hi_ - lo_;
    }
    const auto r = res_(w);
    const double S = K_.spectrum(w) * jac;
    return {S * std::norm(r[0]) / (m_ * m_), S * std::real(r[0] * std::conj(r[1])) / m_, S * std::norm(r[1])};
  }

 private:
  const Resolvent& res_;
  const NoiseKernel& K_;
  double m_, lo_;
  bool infinite_;
  double hi_;
};

Piece gk15(const OracleIntegrand& f, double a, double b) {
  using K = boost::math::quadrature::gauss_kronrod<double, 15>;
  using G = boost::math::quadrature::gauss<double, 7>;
  const auto& x = K::abscissa();
  const auto& wk = K::weights();
  const auto& wg = G::weights();
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  Piece p{a, b, {}, {}, {}};
  Parts gauss{};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const int sides = x[i] == 0.0 ? 1 : 2;
    for (int s = 0; s < sides; ++s) {
      const Parts v = f(c + (s == 0 ? h : -h) * x[i]);
      for (std::size_t k = 0; k < 3; ++k) {
        p.value[k] += wk[i] * h * v[k];
        p.l1[k] += wk[i] * h * std::abs(v[k]);
        if (i % 2 == 0) gauss[k] += wg[i / 2] * h * v[k];
      }
    }
  }
  for (std::size_t k = 0; k < 3; ++k) p.error[k] = std::abs(p.value[k] - gauss[k]);
  return p;
}

constexpr long kPieceBudget = 200000;

/// Bisect until every component error is within allowed * (piece length).
Parts refine(const OracleIntegrand& f, const Parts& allowed_density, long& pieces, bool& exhausted) {
  Parts total{};
  std::vector<Piece> stack{gk15(f, 0.0, 1.0)};
  while (!stack.empty()) {
    Piece p = stack.back();
    stack.pop_back();
    bool ok = true;
    for (std::size_t k = 0; k < 3; ++k)
      if (p.error[k] > allowed_density[k] * (p.b - p.a)) ok = false;
    if (ok || p.b - p.a < 1e-13 || pieces >= kPieceBudget) {
      if (!ok) exhausted = true;
      for (std::size_t k = 0; k < 3; ++k) total[k] += p.value[k];
      continue;
    }
    ++pieces;
    const double mid = 0.5 * (p.a + p.b);
    stack.push_back(gk15(f, mid, p.b));
    stack.push_back(gk15(f, p.a, mid));
  }
  return total;
}

struct Plan {
  std::vector<double> edges;
  std::vector<Piece> coarse;
  Parts allowed{};  // per unit length of the mapped variable, per interval
};

Plan coarse_pass(const Resolvent& res, const NoiseKernel& K, double tol, bool parallel) {
  Plan p;
  p.edges = breakpoints(res.sol, K.bath());
  p.edges.push_back(std::numeric_limits<double>::infinity());
  const int n = int(p.edges.size()) - 1;
  p.coarse.resize(static_cast<std::size_t>(n));
  const double m = K.bath().m;
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int i = 0; i < n; ++i) {
    const OracleIntegrand f(res, K, m, p.edges[std::size_t(i)], p.edges[std::size_t(i) + 1]);
    p.coarse[std::size_t(i)] = gk15(f, 0.0, 1.0);
  }
  Parts l1{};
  for (const auto& c : p.coarse)
    for (std::size_t k = 0; k < 3; ++k) l1[k] += c.l1[k];
  // The cross term may cancel pointwise (it vanishes identically without
  // driving), so its error is measured against sqrt(sigma_xx sigma_pp).
  l1[1] = std::max(l1[1], std::sqrt(l1[0] * l1[2]));
  for (std::size_t k = 0; k < 3; ++k) p.allowed[k] = tol * l1[k] / n;
  return p;
}

CovarianceState run_oracle(const FloquetSolution& sol, const NoiseKernel& K, double t, double tol,
                           bool parallel) {
  const Resolvent res(sol, t);
  const Plan plan = coarse_pass(res, K, tol, parallel);
  const int n = int(plan.coarse.size());
  std::vector<Parts> parts(static_cast<std::size_t>(n));
  std::vector<char> exhausted(static_cast<std::size_t>(n), 0);
  const double m = K.bath().m;
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int i = 0; i < n; ++i) {
    const OracleIntegrand f(res, K, m, plan.edges[std::size_t(i)], plan.edges[std::size_t(i) + 1]);
    long pieces = 0;
    bool ex = false;
    parts[std::size_t(i)] = refine(f, plan.allowed, pieces, ex);
    exhausted[std::size_t(i)] = ex;
  }
  for (char e : exhausted)
    if (e) throw QuadratureBudget("exact_variances: adaptive quadrature exhausted its budget");
  CovarianceState s;
  s.t = t;
  for (const auto& p : parts) {
    s.sigma_xx += p[0];
    s.sigma_xp += p[1];
    s.sigma_pp += p[2];
  }
  return s;
}

void check_oracle_input(const FloquetSolution& sol, double tol) {
  if (!sol.stable) throw UnstableSolution("exact_variances");
  if (!(sol.gamma > 0.0)) throw std::invalid_argument("exact_variances: needs gamma > 0");
  if (!(tol > 0.0)) throw std::invalid_argument("exact_variances: tol must be positive");
}

}  // namespace

CovarianceState exact_variances(const FloquetSolution& sol, const NoiseKernel& kernel, double t,
                                double tol) {
  check_oracle_input(sol, tol);
  return run_oracle(sol, kernel, t, tol, true);
}

CovarianceState exact_variances_serial(const FloquetSolution& sol, const NoiseKernel& kernel, double t,
                                       double tol) {
  check_oracle_input(sol, tol);
  return run_oracle(sol, kernel, t, tol, false);
}

}  // namespace parosc
