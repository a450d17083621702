#include "parosc/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "parosc/errors.hpp"
#include "parosc/integrator.hpp"

namespace parosc {

namespace {

constexpr double kEdgeThreshold = 1e-12;
constexpr int kMaxTruncation = 1024;

/// y'' + (b0 + sum_{l>=1} b_l cos(l Omega t)) y = 0 in Fourier space.
struct Recurrence {
  std::vector<double> b;
  double Omega = 1.0;

  [[nodiscard]] cdouble diagonal(cdouble mu, int n) const {
    const cdouble w = mu + double(n) * Omega;
    return b[0] - w * w;
  }
  [[nodiscard]] int bandwidth() const { return int(b.size()) - 1; }
};

struct Pinned {
  cdouble F;
  std::vector<cdouble> c;  // index n + N, c_{n0} = 1
};

/// Continued-fraction elimination of the three-term recurrence with c_{n0}
/// pinned to 1; F is the residual of row n0.
Pinned pinned_tridiagonal(const Recurrence& r, cdouble mu, int N, int n0) {
  const double h = 0.5 * r.b[1];
  const std::size_t size = std::size_t(2 * N + 1);
  std::vector<cdouble> ratio(size, 0.0);
  auto guard = [](cdouble d) { return std::abs(d) < 1e-300 ? cdouble(1e-300) : d; };

  cdouble next = 0.0;  // c_{N+1}/c_N = 0
  for (int n = N; n > n0; --n) {
    next = -h / guard(r.diagonal(mu, n) + h * next);
    ratio[std::size_t(n + N)] = next;  // c_n / c_{n-1}
  }
  cdouble prev = 0.0;
  for (int n = -N; n < n0; ++n) {
    prev = -h / guard(r.diagonal(mu, n) + h * prev);
    ratio[std::size_t(n + N)] = prev;  // c_n / c_{n+1}
  }
  const cdouble up = n0 < N ? ratio[std::size_t(n0 + 1 + N)] : cdouble(0.0);
  const cdouble down = n0 > -N ? ratio[std::size_t(n0 - 1 + N)] : cdouble(0.0);

  Pinned out;
  out.F = r.diagonal(mu, n0) + h * (up + down);
  out.c.assign(size, 0.0);
  out.c[std::size_t(n0 + N)] = 1.0;
  for (int n = n0 + 1; n <= N; ++n)
    out.c[std::size_t(n + N)] = ratio[std::size_t(n + N)] * out.c[std::size_t(n - 1 + N)];
  for (int n = n0 - 1; n >= -N; --n)
    out.c[std::size_t(n + N)] = ratio[std::size_t(n + N)] * out.c[std::size_t(n + 1 + N)];
  return out;
}

/// Banded recurrence: eliminate all rows except n0 by a dense LU solve.
Pinned pinned_banded(const Recurrence& r, cdouble mu, int N, int n0) {
  const int size = 2 * N + 1;
  const int L = r.bandwidth();
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(size, size);
  for (int i = 0; i < size; ++i) {
    M(i, i) = r.diagonal(mu, i - N);
    for (int l = 1; l <= L; ++l) {
      if (i - l >= 0) M(i, i - l) += 0.5 * r.b[std::size_t(l)];
      if (i + l < size) M(i, i + l) += 0.5 * r.b[std::size_t(l)];
    }
  }
  const int p = n0 + N;
  std::vector<int> rest;
  rest.reserve(std::size_t(size - 1));
  for (int i = 0; i < size; ++i)
    if (i != p) rest.push_back(i);
  Eigen::MatrixXcd A(size - 1, size - 1);
  Eigen::VectorXcd rhs(size - 1);
  for (int i = 0; i < size - 1; ++i) {
    rhs(i) = -M(rest[std::size_t(i)], p);
    for (int j = 0; j < size - 1; ++j) A(i, j) = M(rest[std::size_t(i)], rest[std::size_t(j)]);
  }
  const Eigen::VectorXcd x = A.partialPivLu().solve(rhs);
  Pinned out;
  out.c.assign(std::size_t(size), 0.0);
  out.c[std::size_t(p)] = 1.0;
  for (int i = 0; i < size - 1; ++i) out.c[std::size_t(rest[std::size_t(i)])] = x(i);
  out.F = 0.0;
  for (int j = 0; j < size; ++j) out.F += M(p, j) * out.c[std::size_t(j)];
  return out;
}

Pinned pinned(const Recurrence& r, cdouble mu, int N, int n0) {
  return r.bandwidth() == 1 ? pinned_tridiagonal(r, mu, N, n0) : pinned_banded(r, mu, N, n0);
}

/// Secant iteration on the pinned-row residual. Returns the refined index.
cdouble refine_mu(const Recurrence& r, cdouble mu0, int N, int n0, double scale) {
  cdouble x0 = mu0;
  cdouble x1 = mu0 + cdouble(1e-6 * r.Omega, 0.0);
  cdouble f0 = pinned(r, x0, N, n0).F / scale;
  cdouble f1 = pinned(r, x1, N, n0).F / scale;
  for (int it = 0; it < 200; ++it) {
    if (std::abs(f1) < 1e-15) return x1;
    const cdouble df = f1 - f0;
    if (df == 0.0) break;
    cdouble x2 = x1 - f1 * (x1 - x0) / df;
    // Keep a real iteration real; the secant should never leave the real axis
    // for a real starting pair, but round-off can add a tiny imaginary part.
    if (mu0.imag() == 0.0) x2.imag(0.0);
    x0 = x1;
    f0 = f1;
    x1 = x2;
    f1 = pinned(r, x1, N, n0).F / scale;
    if (std::abs(x1 - x0) < 1e-15 * (std::abs(x1) + r.Omega)) return x1;
  }
  if (std::abs(f1) < 1e-9) return x1;
  throw NoConvergence("solve_floquet: continued-fraction root search did not converge");
}

double recurrence_residual(const Recurrence& r, cdouble mu, const std::vector<cdouble>& c, int N) {
  double cmax = 0.0;
  int nbest = 0;
  for (int n = -N; n <= N; ++n) {
    const double a = std::abs(c[std::size_t(n + N)]);
    if (a > cmax) {
      cmax = a;
      nbest = n;
    }
  }
  double scale = std::max(std::abs(r.b[0]), std::norm(mu + double(nbest) * r.Omega));
  for (std::size_t l = 1; l < r.b.size(); ++l) scale = std::max(scale, std::abs(r.b[l]));
  if (cmax == 0.0 || scale == 0.0) return 0.0;
  const int L = r.bandwidth();
  double worst = 0.0;
  for (int n = -N; n <= N; ++n) {
    cdouble row = r.diagonal(mu, n) * c[std::size_t(n + N)];
    for (int l = 1; l <= L; ++l) {
      const double h = 0.5 * r.b[std::size_t(l)];
      if (n - l >= -N) row += h * c[std::size_t(n - l + N)];
      if (n + l <= N) row += h * c[std::size_t(n + l + N)];
    }
    worst = std::max(worst, std::abs(row) / (scale * cmax));
  }
  return worst;
}

double edge_ratio_of(const std::vector<cdouble>& c) {
  double cmax = 0.0;
  for (const auto& v : c) cmax = std::max(cmax, std::abs(v));
  if (cmax == 0.0) return 0.0;
  return std::max(std::abs(c.front()), std::abs(c.back())) / cmax;
}

/// c'_m = c_{m+shift}, widening the truncation so nothing is dropped.
std::vector<cdouble> reindex(const std::vector<cdouble>& c, int N, int shift, int& N_out) {
  N_out = N + std::abs(shift);
  std::vector<cdouble> out(std::size_t(2 * N_out + 1), 0.0);
  for (int m = -N_out; m <= N_out; ++m) {
    const int n = m + shift;
    if (n >= -N && n <= N) out[std::size_t(m + N_out)] = c[std::size_t(n + N)];
  }
  return out;
}

/// Samples of phi(t) = sum c_n e^{i n Omega t} over one period.
std::vector<cdouble> sample_phi(const std::vector<cdouble>& c, int N, double Omega, int M) {
  std::vector<cdouble> out(std::size_t(M + 1));
  for (int k = 0; k <= M; ++k) {
    const double t = 2.0 * std::numbers::pi / Omega * double(k) / double(M);
    const cdouble z = std::polar(1.0, Omega * t);
    cdouble zn = std::polar(1.0, -double(N) * Omega * t);
    cdouble s = 0.0;
    for (int n = -N; n <= N; ++n) {
      s += c[std::size_t(n + N)] * zn;
      zn *= z;
    }
    out[std::size_t(k)] = s;
  }
  return out;
}

int effective_harmonics(const std::vector<cdouble>& c, int N) {
  double cmax = 0.0;
  for (const auto& v : c) cmax = std::max(cmax, std::abs(v));
  int reach = 0;
  for (int n = -N; n <= N; ++n)
    if (std::abs(c[std::size_t(n + N)]) > 1e-14 * cmax) reach = std::max(reach, std::abs(n));
  return reach;
}

/// Winding number of phi around the origin over one period.
int winding_number(const std::vector<cdouble>& c, int N, double Omega) {
  int M = std::max(512, 32 * (2 * effective_harmonics(c, N) + 1));
  for (int attempt = 0; attempt < 6; ++attempt, M *= 2) {
    const auto phi = sample_phi(c, N, Omega, M);
    double total = 0.0;
    double worst = 0.0;
    for (std::size_t k = 1; k < phi.size(); ++k) {
      const double d = std::arg(phi[k] / phi[k - 1]);
      total += d;
      worst = std::max(worst, std::abs(d));
    }
    if (worst < 0.5 * std::numbers::pi) return int(std::lround(total / (2.0 * std::numbers::pi)));
  }
  throw NoConvergence("solve_floquet: Floquet function winding is unresolved");
}

/// Number of zeros per period of the real (anti)periodic solution
/// psi(t) = e^{i Re(mu) t} phi(t), after removing its constant phase.
int zeros_per_period(const std::vector<cdouble>& c, int N, double Omega, double mu_re) {
  const int M = std::max(2048, 64 * (2 * effective_harmonics(c, N) + 1));
  auto phi = sample_phi(c, N, Omega, M);
  std::vector<cdouble> psi(phi.size());
  std::size_t kbest = 0;
  for (std::size_t k = 0; k < phi.size(); ++k) {
    const double t = 2.0 * std::numbers::pi / Omega * double(k) / double(M);
    psi[k] = std::polar(1.0, mu_re * t) * phi[k];
    if (std::abs(psi[k]) > std::abs(psi[kbest])) kbest = k;
  }
  const cdouble rot = std::conj(psi[kbest]) / std::abs(psi[kbest]);
  int zeros = 0;
  double prev = (rot * psi[0]).real();
  for (std::size_t k = 1; k < psi.size(); ++k) {
    const double cur = (rot * psi[k]).real();
    if ((prev < 0.0 && cur >= 0.0) || (prev > 0.0 && cur <= 0.0)) ++zeros;
    if (cur != 0.0) prev = cur;
  }
  return zeros;
}

FloquetSolution undriven_solution(const PeriodicStiffness& k, double gamma, double tol, int N) {
  FloquetSolution sol;
  sol.stiffness = k;
  sol.gamma = gamma;
  const double b0 = k.mean() - 0.25 * gamma * gamma;
  sol.n_max = N;
  sol.coeffs_complex.assign(std::size_t(2 * N + 1), 0.0);
  if (b0 > 0.0) {
    sol.mu = std::sqrt(b0);
  } else {
    sol.mu = cdouble(0.0, std::sqrt(-b0));
  }
  sol.stable = std::abs(sol.mu.imag()) < tol;
  if (std::abs(sol.mu) < tol) {
    sol.borderline = true;
    sol.coeffs_complex[std::size_t(N)] = 1.0;
  } else {
    sol.coeffs_complex[std::size_t(N)] = 1.0 / std::sqrt(sol.mu);
  }
  if (sol.stable) {
    sol.coeffs.assign(std::size_t(2 * N + 1), 0.0);
    sol.coeffs[std::size_t(N)] = sol.coeffs_complex[std::size_t(N)].real();
  }
  sol.residual = 0.0;
  return sol;
}

}  // namespace

double FloquetSolution::sum_rule() const {
  double s = 0.0;
  for (int n = -n_max; n <= n_max; ++n) {
    const double c = coeff(n);
    s += c * c * frequency(n);
  }
  return s;
}

double FloquetSolution::weight_A() const {
  double s = 0.0;
  for (double c : coeffs) s += c * c;
  return s;
}

double FloquetSolution::edge_ratio() const { return edge_ratio_of(coeffs_complex); }

double monodromy_trace(const PeriodicStiffness& k, double gamma) {
  const double q0 = 0.25 * gamma * gamma;
  auto rhs = [&](double t, const Eigen::Vector4d& y) {
    const double q = k(t) - q0;
    return Eigen::Vector4d(y(1), -q * y(0), y(3), -q * y(2));
  };
  DormandPrince<Eigen::Vector4d> stepper({.rtol = 1e-13, .atol = 1e-15});
  Eigen::Vector4d y(1.0, 0.0, 0.0, 1.0);
  double t = 0.0;
  stepper.advance(rhs, t, y, k.period());
  return y(0) + y(3);
}

FloquetSolution solve_floquet(const PeriodicStiffness& k, double gamma, double tol, int n_max) {
  if (!(tol > 0.0)) throw std::invalid_argument("solve_floquet: tol must be positive");
  if (n_max < 8) throw std::invalid_argument("solve_floquet: n_max must be at least 8");
  if (!(gamma >= 0.0) || !std::isfinite(gamma))
    throw std::invalid_argument("solve_floquet: gamma must be non-negative");

  if (k.undriven()) return undriven_solution(k, gamma, tol, n_max);

  Recurrence rec;
  rec.b = k.cosine_coefficients();
  rec.b[0] -= 0.25 * gamma * gamma;
  rec.Omega = k.Omega();
  const double Omega = rec.Omega;
  const double T = k.period();

  // Monodromy estimate: cos(mu T) = trace / 2.
  const double trace = monodromy_trace(k, gamma);
  cdouble mu0 = std::acos(cdouble(0.5 * trace, 0.0)) / T;
  if (mu0.imag() < 0.0) mu0 = std::conj(mu0);
  bool borderline = false;
  if (std::abs(mu0.imag()) < tol) {
    mu0.imag(0.0);
    const double half = 0.5 * Omega;
    const double to_edge = std::min(mu0.real(), half - mu0.real());
    if (std::abs(std::abs(0.5 * trace) - 1.0) < 1e-12 || to_edge < tol) borderline = true;
  }
  if (mu0.imag() != 0.0) mu0.real(std::abs(std::cos(mu0.real() * T) + 1.0) < 1e-6 ? 0.5 * Omega : 0.0);
  if (borderline) mu0.real(mu0.real() < 0.25 * Omega ? 0.0 : 0.5 * Omega);

  double scale = std::max(Omega * Omega, std::abs(rec.b[0]));
  for (std::size_t l = 1; l < rec.b.size(); ++l) scale = std::max(scale, std::abs(rec.b[l]));

  int N = n_max;
  cdouble mu = mu0;
  std::vector<cdouble> c;
  for (;;) {
    // Pin the row of the dominant coefficient.
    int n0 = 0;
    {
      const double target = std::sqrt(std::max(rec.b[0], 0.0));
      double best = std::numeric_limits<double>::infinity();
      for (int n = -N / 2; n <= N / 2; ++n) {
        const double w = std::abs(mu0.real() + n * Omega);
        if (std::abs(w - target) < best) {
          best = std::abs(w - target);
          n0 = n;
        }
      }
    }
    for (int pass = 0; pass < 4; ++pass) {
      mu = borderline ? mu0 : refine_mu(rec, mu0, N, n0, scale);
      c = pinned(rec, mu, N, n0).c;
      int nbest = n0;
      double cbest = 0.0;
      for (int n = -N; n <= N; ++n)
        if (std::abs(c[std::size_t(n + N)]) > cbest) {
          cbest = std::abs(c[std::size_t(n + N)]);
          nbest = n;
        }
      if (nbest == n0) break;
      n0 = nbest;
    }
    if (edge_ratio_of(c) < kEdgeThreshold) break;
    if (2 * N > kMaxTruncation)
      throw TruncationTooSmall("solve_floquet: edge coefficients above threshold at n_max = " +
                               std::to_string(N));
    N *= 2;
  }
  if (borderline || std::abs(mu.imag()) < tol) mu.imag(0.0);

  FloquetSolution sol;
  sol.stiffness = k;
  sol.gamma = gamma;
  sol.stable = std::abs(mu.imag()) < tol;
  sol.borderline = borderline;

  if (sol.stable) {
    // c_n are real up to a common phase.
    std::size_t kmax = 0;
    for (std::size_t i = 0; i < c.size(); ++i)
      if (std::abs(c[i]) > std::abs(c[kmax])) kmax = i;
    const cdouble rot = std::conj(c[kmax]) / std::abs(c[kmax]);
    for (auto& v : c) v = cdouble((v * rot).real(), 0.0);

    double S = 0.0;
    double Sabs = 0.0;
    for (int n = -N; n <= N; ++n) {
      const double cn = c[std::size_t(n + N)].real();
      S += cn * cn * (mu.real() + n * Omega);
      Sabs += cn * cn * std::abs(mu.real() + n * Omega);
    }
    if (std::abs(S) <= 1e-9 * Sabs) sol.borderline = true;

    if (!sol.borderline) {
      if (S < 0.0) {
        mu = -mu;
        std::reverse(c.begin(), c.end());
        S = -S;
      }
      const double norm = 1.0 / std::sqrt(S);
      for (auto& v : c) v *= norm;
      const int w = winding_number(c, N, Omega);
      if (w != 0) {
        int N2 = 0;
        c = reindex(c, N, w, N2);
        N = N2;
        mu += double(w) * Omega;
      }
    }
  } else if (mu.imag() < 0.0) {
    mu = -mu;
    std::reverse(c.begin(), c.end());
  }

  if (!sol.stable || sol.borderline) {
    // Real part fixed by the zero count of the real (anti)periodic solution.
    const int j = zeros_per_period(c, N, Omega, mu.real());
    const int shift = int(std::lround((0.5 * j * Omega - mu.real()) / Omega));
    if (shift != 0) {
      int N2 = 0;
      c = reindex(c, N, shift, N2);
      N = N2;
    }
    mu = cdouble(0.5 * j * Omega, mu.imag());
    if (!sol.stable) {
      cdouble S = 0.0;
      for (int n = -N; n <= N; ++n) S += c[std::size_t(n + N)] * c[std::size_t(n + N)] * (mu + double(n) * Omega);
      double cmax = 0.0;
      for (const auto& v : c) cmax = std::max(cmax, std::abs(v));
      const cdouble norm = std::abs(S) > 1e-12 * cmax * cmax * Omega ? 1.0 / std::sqrt(S) : 1.0 / cmax;
      for (auto& v : c) v *= norm;
    } else {
      double cmax = 0.0;
      for (const auto& v : c) cmax = std::max(cmax, std::abs(v));
      for (auto& v : c) v /= cmax;
    }
  }

  sol.mu = mu;
  sol.n_max = N;
  sol.coeffs_complex = c;
  if (sol.stable) {
    sol.coeffs.resize(c.size());
    std::transform(c.begin(), c.end(), sol.coeffs.begin(), [](cdouble v) { return v.real(); });
  }
  sol.residual = recurrence_residual(rec, mu, c, N);
  return sol;
}

FloquetSolution shift_brillouin(const FloquetSolution& sol, int shift) {
  FloquetSolution out = sol;
  int N2 = 0;
  out.coeffs_complex = reindex(sol.coeffs_complex, sol.n_max, shift, N2);
  out.n_max = N2;
  out.mu = sol.mu + double(shift) * sol.Omega();
  if (!sol.coeffs.empty()) {
    out.coeffs.resize(out.coeffs_complex.size());
    std::transform(out.coeffs_complex.begin(), out.coeffs_complex.end(), out.coeffs.begin(),
                   [](cdouble v) { return v.real(); });
  }
  return out;
}

XiValue xi1_series(const FloquetSolution& sol, double t) {
  const int N = sol.n_max;
  const double Omega = sol.Omega();
  const cdouble z = std::polar(1.0, Omega * t);
  cdouble zn = std::polar(1.0, -double(N) * Omega * t);
  cdouble s0 = 0.0, s1 = 0.0, s2 = 0.0;
  for (int n = -N; n <= N; ++n) {
    const cdouble term = sol.coeffs_complex[std::size_t(n + N)] * zn;
    const cdouble w = sol.mu + double(n) * Omega;
    s0 += term;
    s1 += w * term;
    s2 += w * w * term;
    zn *= z;
  }
  const cdouble e = std::exp(cdouble(0.0, 1.0) * sol.mu * t);
  return {e * s0, cdouble(0.0, 1.0) * e * s1, -e * s2};
}

FundamentalSolutions fundamental_solutions(const FloquetSolution& sol, double t) {
  if (!sol.stable) throw UnstableSolution("fundamental_solutions");
  const XiValue a = xi1_series(sol, t);
  const XiValue b = xi1_series(sol, -t);
  FundamentalSolutions out;
  out.xi1 = a.xi;
  out.dxi1 = a.dxi;
  out.ddxi1 = a.ddxi;
  out.xi2 = b.xi;
  out.dxi2 = -b.dxi;
  out.ddxi2 = b.ddxi;
  const double e = std::exp(-0.5 * sol.gamma * t);
  const double hg = 0.5 * sol.gamma;
  out.f1 = e * out.xi1;
  out.f2 = e * out.xi2;
  out.df1 = e * (out.dxi1 - hg * out.xi1);
  out.df2 = e * (out.dxi2 - hg * out.xi2);
  return out;
}

GreenValue green_function(const FloquetSolution& sol, double t, double tp) {
  if (!sol.stable) throw UnstableSolution("green_function");
  // For real mu and real c_n, xi2 = conj(xi1), so
  // [xi1(t) xi2(t') - xi2(t) xi1(t')]/2i = Im(xi1(t) conj(xi1(t'))).
  const XiValue a = xi1_series(sol, t);
  const XiValue b = xi1_series(sol, tp);
  const double H = std::imag(a.xi * std::conj(b.xi));
  const double Ht = std::imag(a.dxi * std::conj(b.xi));
  const double Htp = std::imag(a.xi * std::conj(b.dxi));
  const double Htt = std::imag(a.ddxi * std::conj(b.xi));
  const double Http = std::imag(a.dxi * std::conj(b.dxi));
  const double g = sol.gamma;
  const double E = std::exp(-0.5 * g * (t - tp));
  GreenValue out;
  out.g = E * H;
  out.dt = E * (Ht - 0.5 * g * H);
  out.dtp = E * (Htp + 0.5 * g * H);
  out.dtt = E * (Htt - g * Ht + 0.25 * g * g * H);
  out.dtdtp = E * (Http + 0.5 * g * Ht - 0.5 * g * Htp - 0.25 * g * g * H);
  return out;
}

PhasePoint classical_trajectory(const FloquetSolution& sol, double x0, double p0, double t0,
                                double t, double m) {
  if (!sol.stable) throw UnstableSolution("classical_trajectory");
  const GreenValue G = green_function(sol, t, t0);
  const double g = sol.gamma;
  // x = x0 (-dG/dt0 + gamma G) + (p0/m) G; the gamma G term restores
  // dx/dt(t0) = p0/m when the oscillator is damped.
  const double x = x0 * (-G.dtp + g * G.g) + p0 / m * G.g;
  const double v = x0 * (-G.dtdtp + g * G.dt) + p0 / m * G.dt;
  return {x, m * v};
}

}  // namespace parosc
