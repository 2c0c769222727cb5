#pragma once

// Twisted convolution of flat radial densities and the orbit convolution on
// the two-sphere.
//
// The twisted product of two densities mu, nu taken against dm = 2 pi r dr is
//   T(r) = (2 pi r)^{-1} iint mu(r1) nu(r2) e(r1,r2,r) f_{r1,r2}(r)
//                              (2 pi r1)(2 pi r2) dr1 dr2,
// with f the planar orbit-composition density and e the correction kernel of
// the chosen space.  Because (r +- r1 +- r2) enters f symmetrically, the
// triangle substitution r2(phi) = sqrt(r^2 + r1^2 - 2 r r1 cos phi) turns the
// inner integral into a smooth one:
//   T(r) = 2 int r1 mu(r1) int_0^pi nu(r2(phi)) e(r1, r2(phi), r) dphi dr1,
// so no endpoint-aware rule is needed.  With e = 1 this is exactly the radial
// convolution of the plane.
//
// The sphere convolution uses the same substitution through the spherical law
// of cosines, cos r2 = cos r1 cos r + sin r1 sin r cos phi; inputs and output
// are pointwise kernel samples (densities against 2 pi sin(theta) dtheta).

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "heatlab/orbit.hpp"
#include "heatlab/quadrature.hpp"
#include "heatlab/root_system.hpp"
#include "heatlab/util.hpp"

namespace heatlab {

// Kernel selection: the space's own correction kernel, or 1 forced.
enum class EMode { from_space, identity };

namespace detail {

inline double sample_table(const RadialFunction& f, double x) {
  if (x < f.grid.front() || x > f.grid.back()) return 0.0;
  return interp_cubic(f.grid, f.values, x);
}

// Inputs must be pointwise samples on a grid fine enough that no single step
// jumps a quarter of the peak; coarser tables alias the kernel.
inline void require_resolved(const RadialFunction& f, const char* who) {
  validate(f);
  if (f.weight != MeasureWeight::none)
    throw std::invalid_argument(std::string(who) +
                                ": inputs must be pointwise samples (weight none)");
  double peak = 0.0;
  for (double v : f.values) peak = std::max(peak, std::abs(v));
  if (peak <= 0.0) return;
  for (std::size_t i = 1; i < f.values.size(); ++i)
    if (std::abs(f.values[i] - f.values[i - 1]) > 0.25 * peak)
      throw std::domain_error(std::string(who) +
                              ": grid too coarse to resolve the sampled kernel");
}

inline void check_out_grid(const std::vector<double>& g, const char* who) {
  if (g.empty()) throw std::invalid_argument(std::string(who) + ": output grid is empty");
  if (g.front() < 0.0)
    throw std::invalid_argument(std::string(who) + ": output radii must be nonnegative");
  for (std::size_t i = 1; i < g.size(); ++i)
    if (!(g[i] > g[i - 1]))
      throw std::invalid_argument(std::string(who) + ": output grid must increase strictly");
}

// e-kernel lookup: the closed-form family inside the principal region, and the
// flat continuation e = 1 outside it (far sheets, antipodal fold).
inline double twisted_kernel(const Space& sp, OrbitGeometry g, double r1, double r2, double r) {
  constexpr double kPi = 3.14159265358979323846;
  if (g == OrbitGeometry::spherical) {
    if (!(r1 < kPi && r2 < kPi && r < kPi)) return 1.0;
    OrbitTriple tri{r1, r2, r};
    if (!in_support(tri, OrbitGeometry::spherical)) return 1.0;
    return e_convolution(sp, tri);
  }
  return e_convolution(sp, {r1, r2, r});
}

// Angle at which the law-of-cosines chord from radii (r, r1) reaches `target`.
inline bool chord_angle(double r, double r1, double target, double& phi) {
  if (!(target > std::abs(r - r1) && target < r + r1)) return false;
  double c = (r * r + r1 * r1 - target * target) / (2.0 * r * r1);
  phi = std::acos(std::clamp(c, -1.0, 1.0));
  return true;
}

}  // namespace detail

/** @brief Twisted product of two flat radial densities against dm = 2 pi r dr.
 *
 * The correction kernel comes from the space (EMode::from_space) or is forced
 * to one (EMode::identity), in which case the result is the plain radial
 * convolution of the plane and the space argument is ignored.
 */
inline RadialFunction twisted_convolution(const Space& sp, const RadialFunction& mu,
                                          const RadialFunction& nu,
                                          const std::vector<double>& grid,
                                          EMode mode = EMode::from_space) {
  constexpr double kPi = 3.14159265358979323846;
  detail::require_resolved(mu, "twisted_convolution");
  detail::require_resolved(nu, "twisted_convolution");
  detail::check_out_grid(grid, "twisted_convolution");

  const bool corrected = (mode == EMode::from_space);
  // resolve the geometry up front so unsupported spaces fail loudly
  const OrbitGeometry geom =
      corrected ? detail::geometry_of(sp) : OrbitGeometry::flat;

  const double a = mu.grid.front();
  const double b = mu.grid.back();
  const int outer_panels = std::max(8, static_cast<int>(std::lround((b - a) / 0.4)));

  RadialFunction out;
  out.grid = grid;
  out.values.assign(grid.size(), 0.0);
  parallel_for(grid.size(), [&](std::size_t i) {
    const double r = grid[i];
    // On a sphere the correction kernel blows up like an inverse square root
    // where r + r1 + rho meets the antipodal fold 2 pi, and it loses smoothness
    // at the principal walls rho = pi and r1 = pi.  Those curves are located in
    // closed form, the inner integral is cut there (with the fold handled by
    // the endpoint-aware rule), and the outer integral is cut at the radii
    // where the crossings appear or vanish.  In dimension three the kernel is
    // identically one, so nothing needs cutting.
    const bool folded =
        corrected && geom == OrbitGeometry::spherical && sp.dim != 3 && r < kPi;
    auto outer = [&](double r1) {
      const double m = detail::sample_table(mu, r1);
      if (m == 0.0) return 0.0;
      auto inner = [&](double phi) {
        const double rho =
            std::sqrt(std::max(0.0, r * r + r1 * r1 - 2.0 * r * r1 * std::cos(phi)));
        const double v = detail::sample_table(nu, rho);
        if (v == 0.0) return 0.0;
        return corrected ? v * detail::twisted_kernel(sp, geom, r1, rho, r) : v;
      };
      double cuts[2];
      int ncuts = 0;
      if (folded && r1 < kPi) {
        double phi_fold = 0.0, phi_wall = 0.0;
        if (detail::chord_angle(r, r1, 2.0 * kPi - r - r1, phi_fold)) cuts[ncuts++] = phi_fold;
        if (detail::chord_angle(r, r1, kPi, phi_wall)) cuts[ncuts++] = phi_wall;
        std::sort(cuts, cuts + ncuts);
      }
      double acc = 0.0, lo = 0.0;
      for (int c = 0; c < ncuts; ++c) {
        acc += integrate_endpoint_aware(inner, lo, cuts[c], 1);
        lo = cuts[c];
      }
      acc += integrate_gl64(inner, lo, kPi, ncuts == 0 ? 2 : 1);
      return r1 * m * acc;
    };
    if (!folded) {
      out.values[i] = 2.0 * integrate_gl64(outer, a, b, outer_panels);
      return;
    }
    double marks[5] = {a, kPi - r, kPi, kPi + r, b};
    double acc = 0.0;
    for (int seg = 0; seg < 4; ++seg) {
      double lo = std::clamp(marks[seg], a, b);
      double hi = std::clamp(marks[seg + 1], a, b);
      if (hi > lo)
        acc += integrate_gl64(outer, lo, hi,
                              std::max(1, static_cast<int>(std::lround((hi - lo) / 0.4))));
    }
    out.values[i] = 2.0 * acc;
  });
  return out;
}

/** @brief Orbit convolution on the two-sphere of pointwise kernel samples.
 *
 * (mu * nu)(r) = int mu(th) [2 int_0^pi nu(rho(th, phi, r)) dphi] sin(th) dth,
 * which integrates nu over the composition orbit; the true heat kernels form
 * a semigroup under it.  Output radii must stay within [0, pi].
 */
inline RadialFunction sphere_convolution(const RadialFunction& mu, const RadialFunction& nu,
                                         const std::vector<double>& grid) {
  constexpr double kPi = 3.14159265358979323846;
  detail::require_resolved(mu, "sphere_convolution");
  detail::require_resolved(nu, "sphere_convolution");
  detail::check_out_grid(grid, "sphere_convolution");
  if (grid.back() > kPi + 1e-12)
    throw std::invalid_argument("sphere_convolution: output radii must lie in [0, pi]");

  const double a = std::max(0.0, mu.grid.front());
  const double b = std::min(kPi, mu.grid.back());
  if (!(b > a)) throw std::invalid_argument("sphere_convolution: mu table misses [0, pi]");

  RadialFunction out;
  out.grid = grid;
  out.values.assign(grid.size(), 0.0);
  parallel_for(grid.size(), [&](std::size_t i) {
    const double r = grid[i];
    const double cr = std::cos(r), sr = std::sin(r);
    auto outer = [&](double th) {
      const double m = detail::sample_table(mu, th);
      if (m == 0.0) return 0.0;
      const double c1 = std::cos(th), s1 = std::sin(th);
      auto inner = [&](double phi) {
        const double c = std::clamp(c1 * cr + s1 * sr * std::cos(phi), -1.0, 1.0);
        return detail::sample_table(nu, std::acos(c));
      };
      return s1 * m * 2.0 * integrate_gl64(inner, 0.0, kPi, 6);
    };
    out.values[i] = integrate_gl64(outer, a, b, 8);
  });
  return out;
}

}  // namespace heatlab
