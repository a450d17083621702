#include "cli.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <variant>

#include <CLI11.hpp>
#include <json.hpp>

#include "parosc/errors.hpp"
#include "parosc/oracle.hpp"
#include "parosc/units.hpp"

#ifndef PAROSC_VERSION
#define PAROSC_VERSION "dev"
#endif

namespace parosc::cli {

namespace {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// How a key converts between scaled and natural units.
enum class Dim { None, Omega0Sq, Eps, Rate, Energy, Time };

struct KeyInfo {
  std::string fallback;
  Dim dim = Dim::None;
};

const std::map<std::string, KeyInfo>& known_keys() {
  static const std::map<std::string, KeyInfo> keys{
      {"units", {"natural"}},
      {"Omega", {"1"}},
      {"m", {"1"}},
      {"hbar", {"1"}},
      {"tol", {"1e-10"}},
      {"omega0_sq", {"6.5", Dim::Omega0Sq}},
      {"eps", {"7", Dim::Eps}},
      {"cosine", {""}},
      {"gamma", {"0.05", Dim::Rate}},
      {"kT", {"0.5", Dim::Energy}},
      {"omega_D", {"0", Dim::Rate}},
      {"schemes", {"simple,improved,rwa"}},
      {"weight", {"exact"}},
      {"oracle", {"true"}},
      {"oracle_tol", {"1e-8"}},
      {"t_start", {"0", Dim::Time}},
      {"periods", {"1"}},
      {"samples", {"32"}},
      {"omega0_sq_min", {"0", Dim::Omega0Sq}},
      {"omega0_sq_max", {"10", Dim::Omega0Sq}},
      {"omega0_sq_n", {"101"}},
      {"eps_min", {"0", Dim::Eps}},
      {"eps_max", {"10", Dim::Eps}},
      {"eps_n", {"101"}},
      {"path", {"6.5,0;6.5,7"}},
      {"path_n", {"101"}},
      {"gammas", {"0.001,0.01,0.05,0.1"}},
      {"a_max", {"40"}},
      {"initial_level", {"0"}},
      {"t_end", {"0", Dim::Time}},
      {"dt", {"0", Dim::Time}},
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': '" + v + "' is not a number");
  }
  if (pos != v.size()) throw ConfigError("key '" + key + "': '" + v + "' is not a number");
  return d;
}

/// Key-value configuration. Values are stored as given (in the selected unit
/// mode); getters return natural units. Every key read is echoed in the output.
class Config {
 public:
  void set(const std::string& key, const std::string& value) {
    if (!known_keys().count(key)) throw ConfigError("unknown configuration key '" + key + "'");
    values_[key] = trim(value);
  }

  void load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
      set(trim(line.substr(0, eq)), line.substr(eq + 1));
    }
  }

  /// Command-specific default, used when the key was not set.
  void fallback(const std::string& key, const std::string& value) { fallbacks_[key] = value; }

  std::string str(const std::string& key) {
    const auto it = values_.find(key);
    const auto fb = fallbacks_.find(key);
    const std::string v = it != values_.end()   ? it->second
                          : fb != fallbacks_.end() ? fb->second
                                                   : known_keys().at(key).fallback;
    used_[key] = v;
    return v;
  }

  bool scaled() {
    const std::string u = str("units");
    if (u != "natural" && u != "scaled") throw ConfigError("units must be 'natural' or 'scaled'");
    return u == "scaled";
  }

  ScaledUnits units() { return {positive("Omega"), positive("m"), positive("hbar")}; }

  double raw(const std::string& key) { return parse_double(key, str(key)); }

  double positive(const std::string& key) {
    const double v = raw(key);
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("key '" + key + "' must be positive");
    return v;
  }

  long integer(const std::string& key, long lo) {
    const double v = raw(key);
    if (v != std::floor(v) || v < double(lo)) throw ConfigError("key '" + key + "' must be an integer >= " + std::to_string(lo));
    return long(v);
  }

  bool flag(const std::string& key) {
    const std::string v = str(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("key '" + key + "' must be true or false");
  }

  /// Natural-unit value of a dimensioned key.
  double natural(const std::string& key) { return to_natural(known_keys().at(key).dim, raw(key)); }

  double to_natural(Dim d, double v) {
    if (!scaled()) return v;
    const ScaledUnits u = units();
    switch (d) {
      case Dim::Omega0Sq: return u.omega0_sq_from_scaled(v);
      case Dim::Eps: return u.eps_from_scaled(v);
      case Dim::Rate: return u.rate_from_scaled(v);
      case Dim::Energy: return u.energy_from_scaled(v);
      case Dim::Time: return u.time_from_scaled(v);
      case Dim::None: break;
    }
    return v;
  }

  double to_output(Dim d, double v) {
    if (!scaled()) return v;
    const ScaledUnits u = units();
    switch (d) {
      case Dim::Omega0Sq: return u.omega0_sq_to_scaled(v);
      case Dim::Eps: return u.eps_to_scaled(v);
      case Dim::Rate: return u.rate_to_scaled(v);
      case Dim::Energy: return u.energy_to_scaled(v);
      case Dim::Time: return u.time_to_scaled(v);
      case Dim::None: break;
    }
    return v;
  }

  std::vector<double> list(const std::string& key, Dim d) {
    std::vector<double> out;
    for (const auto& s : split(str(key), ',')) out.push_back(to_natural(d, parse_double(key, s)));
    return out;
  }

  [[nodiscard]] const std::map<std::string, std::string>& used() const { return used_; }

 private:
  std::map<std::string, std::string> values_;
  std::map<std::string, std::string> fallbacks_;
  std::map<std::string, std::string> used_;
};

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::pair<std::string, Cell>> results;
};

std::string format_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    if (std::isnan(*d)) return "nan";
    if (*d == 0.0) return "0";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", *d);
    return buf;
  }
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

nlohmann::ordered_json json_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return std::isfinite(*d) ? nlohmann::ordered_json(*d) : nullptr;
  if (const auto* i = std::get_if<long long>(&c)) return *i;
  return std::get<std::string>(c);
}

void write_csv(std::ostream& os, const std::string& command, const Config& cfg, const Table& t) {
  os << "# parosc " << PAROSC_VERSION << "\n# command = " << command << "\n";
  for (const auto& [k, v] : cfg.used()) os << "# " << k << " = " << v << "\n";
  for (const auto& [k, v] : t.results) os << "# result " << k << " = " << format_cell(v) << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_cell(row[i]);
    os << "\n";
  }
}

void write_json(std::ostream& os, const std::string& command, const Config& cfg, const Table& t) {
  nlohmann::ordered_json j;
  j["version"] = PAROSC_VERSION;
  j["command"] = command;
  j["config"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : cfg.used()) j["config"][k] = v;
  j["results"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : t.results) j["results"][k] = json_cell(v);
  j["columns"] = t.columns;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    auto r = nlohmann::ordered_json::array();
    for (const auto& c : row) r.push_back(json_cell(c));
    j["rows"].push_back(r);
  }
  os << j.dump(1) << "\n";
}

// ---- physics set-up shared by the commands ----

PeriodicStiffness stiffness(Config& cfg) {
  const double Omega = cfg.positive("Omega");
  const std::string cos = cfg.str("cosine");
  if (!cos.empty()) {
    std::vector<double> a;
    for (const auto& s : split(cos, ',')) a.push_back(parse_double("cosine", s));
    if (a.empty()) throw ConfigError("key 'cosine' is empty");
    a[0] = cfg.to_natural(Dim::Omega0Sq, a[0]);
    for (std::size_t l = 1; l < a.size(); ++l) a[l] = cfg.to_natural(Dim::Eps, a[l]);
    return PeriodicStiffness(GeneralCosine{Omega, a});
  }
  return PeriodicStiffness::mathieu(cfg.natural("omega0_sq"), cfg.natural("eps"), Omega);
}

struct Setup {
  FloquetSolution sol;   // damped
  FloquetSolution sol0;  // conservative
  BathSpec bath;
};

Setup setup(Config& cfg, double gamma) {
  const PeriodicStiffness k = stiffness(cfg);
  const double tol = cfg.positive("tol");
  Setup s;
  s.sol0 = solve_floquet(k, 0.0, tol);
  s.sol = gamma > 0.0 ? solve_floquet(k, gamma, tol) : s.sol0;
  if (!s.sol0.stable) throw UnstableSolution("conservative Floquet problem");
  const double wD = cfg.natural("omega_D");
  s.bath = {gamma, cfg.natural("kT"), wD > 0.0 ? wD : default_cutoff(s.sol0), cfg.positive("m"),
            cfg.positive("hbar")};
  s.bath.validate();
  return s;
}

DiffusionSet make_scheme(Scheme sc, const Setup& s) {
  switch (sc) {
    case Scheme::Simple: {
      const double mean = s.sol0.stiffness.mean();
      if (!(mean > 0.0)) throw std::invalid_argument("simple scheme needs a positive mean stiffness");
      return make_simple(s.bath, std::sqrt(mean));
    }
    case Scheme::ImprovedAveraged: return make_improved(s.sol0, s.bath);
    case Scheme::RWA: return make_rwa(s.sol0, s.bath);
  }
  throw std::logic_error("make_scheme");
}

std::vector<Scheme> schemes(Config& cfg) {
  std::vector<Scheme> out;
  for (const auto& n : split(cfg.str("schemes"), ',')) {
    try {
      out.push_back(parse_scheme(n));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (out.empty()) throw ConfigError("no scheme selected");
  return out;
}

DiffusionWeight weight(Config& cfg) {
  const std::string w = cfg.str("weight");
  if (w == "exact") return DiffusionWeight::Exact;
  if (w == "leading") return DiffusionWeight::LeadingOrder;
  throw ConfigError("weight must be 'exact' or 'leading'");
}

std::vector<double> sample_times(Config& cfg, double period) {
  const double t0 = cfg.natural("t_start");
  const double periods = cfg.positive("periods");
  const long n = cfg.integer("samples", 1);
  std::vector<double> t(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) t[std::size_t(i)] = t0 + periods * period * double(i) / double(n);
  return t;
}

// Output conversions.
struct Out {
  Config& cfg;
  double t(double v) { return cfg.to_output(Dim::Time, v); }
  double rate(double v) { return cfg.to_output(Dim::Rate, v); }
  double xx(double v) { return cfg.scaled() ? cfg.units().sxx_to_scaled(v) : v; }
  double xp(double v) { return cfg.scaled() ? cfg.units().sxp_to_scaled(v) : v; }
  double pp(double v) { return cfg.scaled() ? cfg.units().spp_to_scaled(v) : v; }
};

// ---- commands ----

Table cmd_stability(Config& cfg) {
  cfg.fallback("gamma", "0");
  const long n0 = cfg.integer("omega0_sq_n", 1), ne = cfg.integer("eps_n", 1);
  const Range r0{cfg.natural("omega0_sq_min"), cfg.natural("omega0_sq_max")};
  const Range re{cfg.natural("eps_min"), cfg.natural("eps_max")};
  const double gamma = cfg.natural("gamma");
  if (gamma < 0.0) throw ConfigError("gamma must be non-negative");
  const auto chart = stability_chart(r0, re, int(n0), int(ne), gamma, cfg.positive("Omega"), cfg.positive("tol"));
  Table t;
  t.columns = {"omega0_sq", "eps", "mu_re", "mu_im", "stable"};
  Out o{cfg};
  long long failed = 0;
  for (const auto& r : chart) {
    failed += r.converged ? 0 : 1;
    t.rows.push_back({cfg.to_output(Dim::Omega0Sq, r.omega0_sq), cfg.to_output(Dim::Eps, r.eps), o.rate(r.mu_re),
                      o.rate(r.mu_im), static_cast<long long>(r.stable)});
  }
  t.results.emplace_back("unconverged_nodes", failed);
  return t;
}

Table cmd_floquet(Config& cfg) {
  cfg.fallback("gamma", "0");
  const double gamma = cfg.natural("gamma");
  if (gamma < 0.0) throw ConfigError("gamma must be non-negative");
  const auto sol = solve_floquet(stiffness(cfg), gamma, cfg.positive("tol"));
  Out o{cfg};
  Table t;
  t.results = {{"mu_re", o.rate(sol.mu.real())},
               {"mu_im", o.rate(sol.mu.imag())},
               {"stable", static_cast<long long>(sol.stable)},
               {"borderline", static_cast<long long>(sol.borderline)},
               {"n_max", static_cast<long long>(sol.n_max)},
               {"residual", sol.residual}};
  if (sol.stable) {
    t.results.emplace_back("sum_rule", sol.sum_rule());
    t.results.emplace_back("weight_A", sol.weight_A());
    t.results.emplace_back("relevant_frequency", o.rate(relevant_frequency(sol)));
  }
  t.columns = {"n", "frequency", "c_re", "c_im"};
  double cmax = 0.0;
  for (const auto& c : sol.coeffs_complex) cmax = std::max(cmax, std::abs(c));
  for (int n = -sol.n_max; n <= sol.n_max; ++n) {
    const cdouble c = sol.coeffs_complex[std::size_t(n + sol.n_max)];
    if (std::abs(c) < 1e-15 * cmax) continue;
    t.rows.push_back({static_cast<long long>(n), o.rate(sol.frequency(n)), c.real(), c.imag()});
  }
  return t;
}

Table cmd_diffusion_scan(Config& cfg) {
  std::vector<std::array<double, 2>> nodes;
  for (const auto& pt : split(cfg.str("path"), ';')) {
    const auto xy = split(pt, ',');
    if (xy.size() != 2) throw ConfigError("path points must be 'omega0_sq,eps' separated by ';'");
    nodes.push_back({cfg.to_natural(Dim::Omega0Sq, parse_double("path", xy[0])),
                     cfg.to_natural(Dim::Eps, parse_double("path", xy[1]))});
  }
  if (nodes.size() < 2) throw ConfigError("path needs at least two points");
  const long n = cfg.integer("path_n", 2);
  const double Omega = cfg.positive("Omega"), tol = cfg.positive("tol");
  BathSpec bath{1.0, cfg.natural("kT"), 1.0, cfg.positive("m"), cfg.positive("hbar")};
  const double wD = cfg.natural("omega_D");
  bath.omega_D = wD > 0.0 ? wD : 1.0;
  bath.validate();
  const double mkT = bath.m * bath.kT;
  const double segs = double(nodes.size() - 1);

  Table t;
  t.columns = {"s", "omega0_sq", "eps", "dpp_simple_over_mkT", "dpp_improved_over_mkT", "valid"};
  t.rows.resize(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    const double s = n == 1 ? 0.0 : double(i) / double(n - 1);
    const auto seg = std::min<std::size_t>(std::size_t(s * segs), nodes.size() - 2);
    const double u = s * segs - double(seg);
    const double w2 = nodes[seg][0] + u * (nodes[seg + 1][0] - nodes[seg][0]);
    const double e = nodes[seg][1] + u * (nodes[seg + 1][1] - nodes[seg][1]);
    const double simple = w2 > 0.0 ? d_pp_simple(bath, std::sqrt(w2)) / mkT : std::nan("");
    double improved = std::nan("");
    bool valid = false;
    try {
      const auto sol0 = solve_floquet(PeriodicStiffness::mathieu(w2, e, Omega), 0.0, tol);
      const auto v = d_pp_improved_continued(sol0, bath);
      improved = v.value / mkT;
      valid = v.valid;
    } catch (const NumericalError&) {
    }
    t.rows[std::size_t(i)] = {s, cfg.to_output(Dim::Omega0Sq, w2), cfg.to_output(Dim::Eps, e), simple, improved,
                              static_cast<long long>(valid)};
  }
  return t;
}

Table cmd_variances(Config& cfg) {
  cfg.positive("gamma");
  const Setup s = setup(cfg, cfg.natural("gamma"));
  if (!s.sol.stable) throw UnstableSolution("damped Floquet problem");
  const auto list = schemes(cfg);
  const auto w = weight(cfg);
  const bool oracle = cfg.flag("oracle");
  const double otol = cfg.positive("oracle_tol");
  const auto times = sample_times(cfg, s.sol.period());
  std::vector<DiffusionSet> sets;
  for (Scheme sc : list) sets.push_back(make_scheme(sc, s));
  const NoiseKernel kernel(s.bath);

  Out o{cfg};
  Table t;
  t.columns = {"t", "scheme", "sigma_xx", "sigma_xp", "sigma_pp", "oracle_xx", "oracle_xp", "oracle_pp", "eta_xx"};
  std::vector<double> err(list.size(), 0.0);
  for (double tt : times) {
    const GreenIntegrals I = green_integrals(s.sol, tt);
    CovarianceState ex;
    ex.sigma_xx = ex.sigma_xp = ex.sigma_pp = std::nan("");
    if (oracle) ex = exact_variances(s.sol, kernel, tt, otol);
    for (std::size_t k = 0; k < list.size(); ++k) {
      const CovarianceState c = list[k] == Scheme::RWA ? asymptotic_covariance(s.sol, sets[k], tt)
                                                      : covariance_from_integrals(I, sets[k], tt, w);
      const double eta = c.sigma_xx / ex.sigma_xx;
      err[k] += std::abs(eta - 1.0) / double(times.size());
      t.rows.push_back({o.t(tt), std::string(scheme_name(list[k])), o.xx(c.sigma_xx), o.xp(c.sigma_xp),
                        o.pp(c.sigma_pp), o.xx(ex.sigma_xx), o.xp(ex.sigma_xp), o.pp(ex.sigma_pp), eta});
    }
  }
  t.results.emplace_back("omega_D", o.rate(s.bath.omega_D));
  t.results.emplace_back("cutoff_adequate", static_cast<long long>(cutoff_adequate(s.bath, s.sol0)));
  for (std::size_t k = 0; k < list.size(); ++k)
    t.results.emplace_back(std::string("mean_abs_eta_minus_1_") + scheme_name(list[k]), oracle ? err[k] : std::nan(""));
  return t;
}

Table cmd_gamma_sweep(Config& cfg) {
  const auto gammas = cfg.list("gammas", Dim::Rate);
  if (gammas.empty()) throw ConfigError("gammas is empty");
  for (double g : gammas)
    if (!(g > 0.0)) throw ConfigError("gammas must be positive");
  const bool oracle = cfg.flag("oracle");
  const double otol = cfg.positive("oracle_tol");
  const long n = cfg.integer("samples", 1);
  const auto w = weight(cfg);
  Out o{cfg};
  Table t;
  t.columns = {"gamma",     "sigma_xx_simple",   "sigma_xx_improved",    "sigma_xx_rwa",        "sigma_xx_oracle",
               "err_simple", "err_improved", "err_rwa", "conservative_simple", "conservative_improved"};
  for (double g : gammas) {
    const Setup s = setup(cfg, g);
    if (!s.sol.stable) throw UnstableSolution("damped Floquet problem");
    const DiffusionSet simple = make_scheme(Scheme::Simple, s), improved = make_scheme(Scheme::ImprovedAveraged, s),
                       rwa = make_scheme(Scheme::RWA, s);
    const NoiseKernel kernel(s.bath);
    double a_s = 0, a_i = 0, a_r = 0, a_o = 0;
    for (long i = 0; i < n; ++i) {
      const double tt = s.sol.period() * double(i) / double(n);
      const GreenIntegrals I = green_integrals(s.sol, tt);
      a_s += covariance_from_integrals(I, simple, tt, w).sigma_xx / double(n);
      a_i += covariance_from_integrals(I, improved, tt, w).sigma_xx / double(n);
      a_r += asymptotic_covariance(s.sol, rwa, tt).sigma_xx / double(n);
      a_o += oracle ? exact_variances(s.sol, kernel, tt, otol).sigma_xx / double(n) : std::nan("");
    }
    // gamma -> 0 limit: sigma_xx(t) -> A D_pp |xi(t)|^2 / m^2, averaging to A^2 D_pp / m^2.
    const double A = s.sol0.weight_A(), m = s.bath.m;
    t.rows.push_back({o.rate(g), o.xx(a_s), o.xx(a_i), o.xx(a_r), o.xx(a_o), a_s / a_o - 1.0, a_i / a_o - 1.0,
                      a_r / a_o - 1.0, o.xx(A * A * simple.d_pp / (m * m)), o.xx(A * A * improved.d_pp / (m * m))});
  }
  return t;
}

Table cmd_rwa_relax(Config& cfg) {
  const Setup s = setup(cfg, cfg.natural("gamma"));
  const double g = s.bath.gamma;
  const double N = effective_N(s.sol0, s.bath);
  const long a_max = cfg.integer("a_max", 1);
  const long level = cfg.integer("initial_level", 0);
  if (level > a_max) throw ConfigError("initial_level exceeds a_max");
  double t_end = cfg.natural("t_end");
  if (!(t_end > 0.0)) t_end = 10.0 / g;
  double dt = cfg.natural("dt");
  if (!(dt > 0.0)) dt = 0.2 / (g * (2.0 * N + 1.0) * double(a_max + 1));
  const long n = cfg.integer("samples", 1);
  const double mean0 = double(level);

  Out o{cfg};
  Table t;
  t.columns = {"t", "mean_level", "mean_level_exact", "trace", "p0", "p0_stationary"};
  FloquetDensityMatrix rho = FloquetDensityMatrix::fock(int(a_max), int(level));
  double now = 0.0;
  for (long i = 0; i <= n; ++i) {
    const double target = t_end * double(i) / double(n);
    if (target > now) {
      const double span = target - now;
      const double step = span / std::ceil(span / dt);
      rho = rwa_density_propagate(rho, N, g, span, step);
      now = target;
    }
    t.rows.push_back({o.t(now), rho.mean_level(), N + (mean0 - N) * std::exp(-g * now), rho.trace(), rho.population(0),
                      1.0 / (N + 1.0)});
  }
  t.results.emplace_back("N", N);
  return t;
}

Table cmd_oracle(Config& cfg) {
  const Setup s = setup(cfg, cfg.natural("gamma"));
  if (!s.sol.stable) throw UnstableSolution("damped Floquet problem");
  const NoiseKernel kernel(s.bath);
  const double otol = cfg.positive("oracle_tol");
  Out o{cfg};
  Table t;
  t.columns = {"t", "sigma_xx", "sigma_xp", "sigma_pp"};
  for (double tt : sample_times(cfg, s.sol.period())) {
    const auto c = exact_variances(s.sol, kernel, tt, otol);
    t.rows.push_back({o.t(tt), o.xx(c.sigma_xx), o.xp(c.sigma_xp), o.pp(c.sigma_pp)});
  }
  t.results.emplace_back("omega_D", o.rate(s.bath.omega_D));
  return t;
}

const std::map<std::string, std::function<Table(Config&)>>& commands() {
  static const std::map<std::string, std::function<Table(Config&)>> c{
      {"stability", cmd_stability},     {"floquet", cmd_floquet},         {"diffusion-scan", cmd_diffusion_scan},
      {"variances", cmd_variances},     {"gamma-sweep", cmd_gamma_sweep}, {"rwa-relax", cmd_rwa_relax},
      {"oracle", cmd_oracle},
  };
  return c;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Floquet-Markov dynamics of the parametrically driven, damped quantum oscillator"};
  app.require_subcommand(1);
  std::string config_path, format = "csv", out_path, units;
  std::vector<std::string> sets;
  double tol = 0.0;
  for (const auto& [name, fn] : commands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "key = value configuration file");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", out_path, "output file (default: stdout)");
    sub->add_option("--units", units, "natural or scaled")->check(CLI::IsMember({"natural", "scaled"}));
    sub->add_option("--tol", tol, "Floquet solver tolerance");
    sub->add_option("--set", sets, "override a configuration key: key=value");
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    Config cfg;
    if (!config_path.empty()) cfg.load(config_path);
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
      cfg.set(trim(kv.substr(0, eq)), kv.substr(eq + 1));
    }
    if (!units.empty()) cfg.set("units", units);
    if (tol > 0.0) {
      std::ostringstream ss;
      ss.precision(17);
      ss << tol;
      cfg.set("tol", ss.str());
    }
    cfg.scaled();

    const Table table = commands().at(command)(cfg);

    std::ofstream file;
    if (!out_path.empty()) {
      file.open(out_path);
      if (!file) throw ConfigError("cannot open output file '" + out_path + "'");
    }
    std::ostream& os = out_path.empty() ? out : file;
    if (format == "json")
      write_json(os, command, cfg, table);
    else
      write_csv(os, command, cfg, table);
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace parosc::cli
