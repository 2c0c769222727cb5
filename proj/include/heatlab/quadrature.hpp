#pragma once

// Thin wrappers over Boost fixed-order Gauss and adaptive Gauss-Kronrod,
// plus the sin²-substitution used for inverse-square-root endpoint
// singularities of the orbit densities.

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>

namespace heatlab {

template <class F>
inline double integrate_gl64(const F& f, double a, double b, int panels = 1) {
  using boost::math::quadrature::gauss;
  double h = (b - a) / panels, acc = 0.0;
  for (int p = 0; p < panels; ++p) acc += gauss<double, 64>::integrate(f, a + p * h, a + (p + 1) * h);
  return acc;
}

template <class F>
inline double integrate_gl96(const F& f, double a, double b, int panels = 1) {
  using boost::math::quadrature::gauss;
  double h = (b - a) / panels, acc = 0.0;
  for (int p = 0; p < panels; ++p) acc += gauss<double, 96>::integrate(f, a + p * h, a + (p + 1) * h);
  return acc;
}

template <class F>
inline double integrate_adaptive(const F& f, double a, double b, double tol = 1e-10) {
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 61>::integrate(f, a, b, 12, tol);
}

// ∫_a^b f dr with f ~ C/sqrt((r-a)(b-r)) near the ends: substitute
// r = a + (b-a) sin²u, dr = (b-a) sin(2u) du, u ∈ (0, π/2).
template <class F>
inline double integrate_endpoint_aware(const F& f, double a, double b, int panels = 2) {
  auto g = [&](double u) {
    double s = std::sin(u);
    double r = a + (b - a) * s * s;
    return f(r) * (b - a) * std::sin(2.0 * u);
  };
  return integrate_gl96(g, 0.0, std::acos(-1.0) / 2.0, panels);
}

}  // namespace heatlab
