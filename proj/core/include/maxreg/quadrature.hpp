#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <type_traits>

#include <boost/math/quadrature/gauss.hpp>

namespace maxreg::quadrature {

/// Points per Gauss-Legendre panel.
inline constexpr unsigned kGaussPoints = 20;

/// Upper bound on b/a for a single panel on [a,b] with a > 0. Power weights x^p
/// are analytic in a Bernstein ellipse with parameter >= 3 under this ratio, so
/// a 20-point rule reaches full double precision.
inline constexpr double kMaxPanelRatio = 4.0;

/// Integrates f over [a,b] (0 < a < b) with 20-point Gauss-Legendre panels on a
/// geometric subdivision of [a,b].
template <class F>
auto integrate(F&& f, double a, double b) {
  using R = std::decay_t<decltype(f(a))>;
  using Rule = boost::math::quadrature::gauss<double, kGaussPoints>;
  const auto& xs = Rule::abscissa();
  const auto& ws = Rule::weights();

  auto panel = [&](double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    const double rad = 0.5 * (hi - lo);
    R sum{};
    for (std::size_t k = 0; k < xs.size(); ++k) {
      if (xs[k] == 0.0) {
        sum += ws[k] * f(mid);
      } else {
        sum += ws[k] * (f(mid - rad * xs[k]) + f(mid + rad * xs[k]));
      }
    }
    return R(sum * rad);
  };

  if (!(b > a)) return R{};
  if (a <= 0.0 || b / a <= kMaxPanelRatio) return panel(a, b);
  const int pieces = static_cast<int>(std::ceil(std::log(b / a) / std::log(kMaxPanelRatio)));
  R total{};
  double lo = a;
  for (int j = 1; j <= pieces; ++j) {
    const double hi = (j == pieces) ? b : a * std::pow(b / a, static_cast<double>(j) / pieces);
    total += panel(lo, hi);
    lo = hi;
  }
  return total;
}

}  // namespace maxreg::quadrature
