#pragma once

#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

namespace parosc::detail {

/// Gauss-Legendre rule on [-1, 1], nodes in ascending order.
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

template <unsigned N>
GaussRule expand_rule() {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& a = G::abscissa();
  const auto& wt = G::weights();
  GaussRule r;
  for (std::size_t i = a.size(); i-- > 0;) {
    if (a[i] == 0.0) continue;
    r.x.push_back(-a[i]);
    r.w.push_back(wt[i]);
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    r.x.push_back(a[i]);
    r.w.push_back(wt[i]);
  }
  return r;
}

inline const GaussRule& gauss_rule(int order) {
  static const GaussRule r10 = expand_rule<10>();
  static const GaussRule r15 = expand_rule<15>();
  static const GaussRule r20 = expand_rule<20>();
  static const GaussRule r25 = expand_rule<25>();
  static const GaussRule r30 = expand_rule<30>();
  switch (order) {
    case 10: return r10;
    case 15: return r15;
    case 20: return r20;
    case 25: return r25;
    case 30: return r30;
    default: throw std::invalid_argument("Gauss-Legendre order must be one of 10, 15, 20, 25, 30");
  }
}

}  // namespace parosc::detail
