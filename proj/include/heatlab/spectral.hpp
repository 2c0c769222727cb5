#pragma once

// Reference heat kernels by eigenfunction expansion on S^1, S^2, S^3, the
// closed-form kernel on H^3 / the complex rank-one preset, and the spherical
// transform used by the wrapping theorem checks.  Everything runs under the
// half-generator convention: spectral weights are exp(-lambda_eig t / 2).

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>

#include "heatlab/quadrature.hpp"
#include "heatlab/root_system.hpp"
#include "heatlab/scalar_series.hpp"

namespace heatlab {

struct SpectralTruncation {
  int max_index = 0;       // last index included in the sum
  double tail_bound = 0.0; // geometric estimate of the omitted tail
};

/** @brief Heat kernel on S^n, n in {1,2,3}, against the Riemannian volume.
 *
 * S^1: (2pi)^-1 (1 + 2 sum e^{-k^2 t/2} cos k theta)
 * S^2: sum (2l+1)/(4pi) e^{-l(l+1)t/2} P_l(cos theta)
 * S^3: sum (m+1)/(2pi^2) e^{-((m+1)^2-1)t/2} U_m(cos theta)
 *
 * The alternating sums near theta = pi cancel to values far below one, so
 * accumulation runs in long double.  Truncation stops once the term envelope
 * drops under tol/100; the tail bound is the next envelope divided by the
 * remaining geometric ratio.
 */
inline std::pair<double, SpectralTruncation> heat_kernel_sphere(int n, double theta, double t,
                                                                double tol = 1e-12) {
  constexpr double kPi = 3.14159265358979323846;
  if (t <= 0.0) throw std::domain_error("heat_kernel_sphere: t must be positive");
  if (theta < 0.0 || theta > kPi + 1e-12)
    throw std::domain_error("heat_kernel_sphere: theta outside [0, pi]");
  if (n < 1 || n > 3) throw std::invalid_argument("heat_kernel_sphere: n must be 1, 2, or 3");

  const long double tl = t;
  const long double x = std::cos(static_cast<long double>(theta));
  const double stop = tol * 1e-2;
  const int cap = static_cast<int>(std::sqrt(60.0 / t)) + 60;

  long double sum = 0.0L;
  SpectralTruncation tr;

  auto finish = [&](int k, long double envelope_next, long double ratio) {
    tr.max_index = k;
    tr.tail_bound = static_cast<double>(
        (ratio < 1.0L) ? envelope_next / (1.0L - ratio) : envelope_next * cap);
    return std::make_pair(static_cast<double>(sum), tr);
  };

  if (n == 1) {
    sum = 1.0L / (2.0L * kPi);
    for (int k = 1; k <= cap; ++k) {
      long double env = std::exp(-0.5L * k * k * tl) / kPi;  // |2 e^{-k^2 t/2} cos| / 2pi
      if (env < stop)
        return finish(k - 1, env, std::exp(-(k + 0.5L) * tl));
      sum += env * std::cos(k * static_cast<long double>(theta));
    }
    long double env = std::exp(-0.5L * (cap + 1.0L) * (cap + 1.0L) * tl) / kPi;
    return finish(cap, env, std::exp(-(cap + 1.5L) * tl));
  }

  if (n == 2) {
    long double pm1 = 0.0L, p = 1.0L;  // P_{l-1}, P_l
    for (int l = 0; l <= cap; ++l) {
      long double env = (2.0L * l + 1.0L) / (4.0L * kPi) * std::exp(-0.5L * l * (l + 1.0L) * tl);
      if (env < stop && l > 0)
        return finish(l - 1, env,
                      (2.0L * l + 3.0L) / (2.0L * l + 1.0L) * std::exp(-(l + 1.0L) * tl));
      sum += env * p;
      long double pnext = ((2.0L * l + 1.0L) * x * p - l * pm1) / (l + 1.0L);
      pm1 = p;
      p = pnext;
    }
    long double env =
        (2.0L * cap + 3.0L) / (4.0L * kPi) * std::exp(-0.5L * (cap + 1.0L) * (cap + 2.0L) * tl);
    return finish(cap, env, std::exp(-(cap + 2.0L) * tl));
  }

  // n == 3: Chebyshev U recurrence, |U_m(cos theta)| <= m+1
  long double um1 = 0.0L, u = 1.0L;  // U_{m-1}, U_m
  for (int m = 0; m <= cap; ++m) {
    long double lam = (m + 1.0L) * (m + 1.0L) - 1.0L;
    long double env =
        (m + 1.0L) * (m + 1.0L) / (2.0L * kPi * kPi) * std::exp(-0.5L * lam * tl);
    if (env < stop && m > 0) {
      long double ratio = std::exp(-(m + 1.5L) * tl) * (m + 2.0L) * (m + 2.0L) /
                          ((m + 1.0L) * (m + 1.0L));
      return finish(m - 1, env, ratio);
    }
    sum += (m + 1.0L) / (2.0L * kPi * kPi) * std::exp(-0.5L * lam * tl) * u;
    long double unext = 2.0L * x * u - um1;
    um1 = u;
    u = unext;
  }
  long double env = (cap + 2.0L) * (cap + 2.0L) / (2.0L * kPi * kPi) *
                    std::exp(-0.5L * ((cap + 2.0L) * (cap + 2.0L) - 1.0L) * tl);
  return finish(cap, env, std::exp(-(cap + 2.0L) * tl));
}

namespace detail {
inline bool complex_like_preset(const Space& s) {
  return (s.kind == SpaceKind::hyperbolic && s.dim == 3) ||
         s.kind == SpaceKind::complex_group_rank1;
}
}  // namespace detail

// Flat radial Gaussian (2 pi t)^{-n/2} e^{-r^2/2t} for the half-Laplacian semigroup on R^n.
inline double heat_kernel_flat(int n, double r, double t) {
  if (n < 1) throw std::invalid_argument("heat_kernel_flat: dimension must be >= 1");
  if (t <= 0.0) throw std::domain_error("heat_kernel_flat: t must be positive");
  return std::pow(2.0 * 3.14159265358979323846 * t, -0.5 * n) * std::exp(-r * r / (2.0 * t));
}

/** @brief Exact kernel q_t(r) = (2 pi t)^{-n/2} e^{-t|rho|^2/2} j(r)^{-1} e^{-r^2/2t}
 *  on H^3 and the complex rank-one preset (each with its own j and |rho|^2). */
inline double heat_kernel_complex_group(const Space& s, double r, double t) {
  if (!detail::complex_like_preset(s))
    throw std::invalid_argument(
        "heat_kernel_complex_group: needs the H3 or complex rank-one preset");
  if (t <= 0.0) throw std::domain_error("heat_kernel_complex_group: t must be positive");
  if (r < 0.0) throw std::domain_error("heat_kernel_complex_group: r must be nonnegative");
  return std::pow(2.0 * 3.14159265358979323846 * t, -0.5 * s.dim) *
         std::exp(-0.5 * t * rho_norm_sq(s)) * std::exp(-r * r / (2.0 * t)) / j_eval(s, r);
}

/** @brief phi_lambda(r) = sin(lambda r) / (lambda sinh r), normalized to phi(0) = 1. */
inline double spherical_function_complex(const Space& s, double lambda, double r) {
  if (!detail::complex_like_preset(s))
    throw std::invalid_argument(
        "spherical_function_complex: needs the H3 or complex rank-one preset");
  if (r < 0.0) throw std::domain_error("spherical_function_complex: r must be nonnegative");
  if (lambda < 0.0) throw std::domain_error("spherical_function_complex: lambda >= 0");
  return sinc(lambda * r) / sinhc(r);  // both limits removable
}

/** @brief Spherical transform on H^3: integral of f(r) phi_lambda(r) 4 pi sinh^2 r dr. */
template <class F>
inline double spherical_transform(const Space& s, F&& f, double lambda, double rmax,
                                  int panels = 8) {
  if (!(s.kind == SpaceKind::hyperbolic && s.dim == 3))
    throw std::invalid_argument("spherical_transform: implemented on the H3 preset");
  constexpr double kPi = 3.14159265358979323846;
  return integrate_gl96(
      [&](double r) {
        double sh = std::sinh(r);
        return f(r) * spherical_function_complex(s, lambda, r) * 4.0 * kPi * sh * sh;
      },
      0.0, rmax, panels);
}

/** @brief Gridded spherical transform (trapezoid over the sample grid).
 *  Throws when the grid cannot resolve the sin(lambda r) oscillation. */
inline double spherical_transform(const Space& s, const RadialFunction& f, double lambda) {
  if (!(s.kind == SpaceKind::hyperbolic && s.dim == 3))
    throw std::invalid_argument("spherical_transform: implemented on the H3 preset");
  if (f.weight != MeasureWeight::none)
    throw std::invalid_argument("spherical_transform: plain radial samples expected");
  validate(f);
  constexpr double kPi = 3.14159265358979323846;
  double hmax = 0.0;
  for (std::size_t i = 1; i < f.grid.size(); ++i)
    hmax = std::max(hmax, f.grid[i] - f.grid[i - 1]);
  if (lambda * hmax > 0.5)
    throw std::invalid_argument(
        "spherical_transform: grid too coarse to resolve the requested lambda");
  auto integrand = [&](std::size_t i) {
    double r = f.grid[i], sh = std::sinh(r);
    return f.values[i] * spherical_function_complex(s, lambda, r) * 4.0 * kPi * sh * sh;
  };
  double acc = 0.0;
  double prev = integrand(0);
  for (std::size_t i = 1; i < f.grid.size(); ++i) {
    double cur = integrand(i);
    acc += 0.5 * (prev + cur) * (f.grid[i] - f.grid[i - 1]);
    prev = cur;
  }
  return acc;
}

}  // namespace heatlab
