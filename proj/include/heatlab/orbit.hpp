#pragma once

// Orbit-composition densities in the plane, on the two-sphere, and on the
// hyperbolic plane, plus the closed-form e-functions built from them.
//
// All four symmetric combinations enter through s1 = r + (r1+r2),
// s2 = r + (r1-r2), s3 = r - (r1-r2), s4 = r - (r1+r2); products are grouped
// (s1 s4)(s2 s3) so that swapping r1 and r2 is exact in floating point.

#include <array>
#include <cmath>
#include <stdexcept>

#include "root_system.hpp"
#include "scalar_series.hpp"

namespace heatlab {

struct OrbitTriple {
  double r1 = 0.0;
  double r2 = 0.0;
  double r = 0.0;
};

enum class OrbitGeometry { flat, spherical, hyperbolic };

namespace detail {

inline std::array<double, 4> orbit_svars(const OrbitTriple& t) {
  return {t.r + (t.r1 + t.r2), t.r + (t.r1 - t.r2), t.r - (t.r1 - t.r2),
          t.r - (t.r1 + t.r2)};
}

inline void check_orbit_radii(const OrbitTriple& t, OrbitGeometry g) {
  if (!(t.r1 > 0.0) || !(t.r2 > 0.0))
    throw std::invalid_argument("orbit density: circle radii must be positive");
  if (g == OrbitGeometry::spherical &&
      (t.r1 >= 3.14159265358979323846 || t.r2 >= 3.14159265358979323846))
    throw std::invalid_argument("orbit density: spherical radii must lie in (0, pi)");
}

}  // namespace detail

inline bool in_support(const OrbitTriple& t, OrbitGeometry g) {
  if (t.r1 < 0.0 || t.r2 < 0.0 || t.r < 0.0)
    throw std::invalid_argument("in_support: radii must be nonnegative");
  if (t.r < std::abs(t.r1 - t.r2) || t.r > t.r1 + t.r2) return false;
  if (g == OrbitGeometry::spherical &&
      t.r > 2.0 * 3.14159265358979323846 - (t.r1 + t.r2))
    return false;  // composition cannot pass the antipode
  return true;
}

/** @brief Distance density of the sum of two independent uniform circle points,
 *  f(r) = 2r / (pi sqrt|Pi_(r +- r1 +- r2)|) on its support. */
inline double planar_orbit_density(const OrbitTriple& t) {
  detail::check_orbit_radii(t, OrbitGeometry::flat);
  if (!in_support(t, OrbitGeometry::flat)) return 0.0;
  auto s = detail::orbit_svars(t);
  for (double si : s)
    if (std::abs(si) < 1e-12)
      throw std::domain_error(
          "planar_orbit_density: integrable singularity at a support endpoint");
  double prod = std::abs((s[0] * s[3]) * (s[1] * s[2]));
  return 2.0 * t.r / (3.14159265358979323846 * std::sqrt(prod));
}

/** @brief The two-sphere analogue: 2 sin r / (pi sqrt(Pi |2 sin((r +- r1 +- r2)/2)|)),
 *  with the support folded back at 2 pi - r1 - r2. */
inline double spherical_orbit_density(const OrbitTriple& t) {
  detail::check_orbit_radii(t, OrbitGeometry::spherical);
  if (!in_support(t, OrbitGeometry::spherical)) return 0.0;
  auto s = detail::orbit_svars(t);
  auto h = [](double x) { return std::abs(2.0 * std::sin(0.5 * x)); };
  for (double si : s)
    if (h(si) < 1e-12)
      throw std::domain_error(
          "spherical_orbit_density: integrable singularity at a support endpoint");
  double prod = (h(s[0]) * h(s[3])) * (h(s[1]) * h(s[2]));
  return 2.0 * std::sin(t.r) / (3.14159265358979323846 * std::sqrt(prod));
}

/** @brief Hyperbolic-plane analogue with sinh in place of sin. */
inline double hyperbolic_orbit_density(const OrbitTriple& t) {
  detail::check_orbit_radii(t, OrbitGeometry::hyperbolic);
  if (!in_support(t, OrbitGeometry::hyperbolic)) return 0.0;
  auto s = detail::orbit_svars(t);
  auto h = [](double x) { return std::abs(2.0 * std::sinh(0.5 * x)); };
  for (double si : s)
    if (h(si) < 1e-12)
      throw std::domain_error(
          "hyperbolic_orbit_density: integrable singularity at a support endpoint");
  double prod = (h(s[0]) * h(s[3])) * (h(s[1]) * h(s[2]));
  return 2.0 * std::sinh(t.r) / (3.14159265358979323846 * std::sqrt(prod));
}

namespace detail {

// Ratio Pi |halfsinc(s_i)| / (sinc r1 sinc r2 sinc r), circular or hyperbolic
// flavor; the exponent (n-3)/2 turns it into the e-function family.
inline double e_ratio(const OrbitTriple& t, bool circular) {
  auto s = orbit_svars(t);
  auto h = [circular](double x) {
    return std::abs(circular ? half_angle_sinc(x) : half_angle_sinhc(x));
  };
  auto base = [circular](double x) { return circular ? sinc(x) : sinhc(x); };
  double num = (h(s[0]) * h(s[3])) * (h(s[1]) * h(s[2]));
  double den = (base(t.r1) * base(t.r2)) * base(t.r);
  return num / den;
}

inline OrbitGeometry geometry_of(const Space& s) {
  if (s.kind == SpaceKind::sphere) return OrbitGeometry::spherical;
  if (s.kind == SpaceKind::hyperbolic) return OrbitGeometry::hyperbolic;
  throw std::invalid_argument("e-function: space must be a sphere or hyperbolic preset");
}

}  // namespace detail

/** @brief Closed-form e-function: the exponent-(n-3)/2 family on spheres and
 *  hyperbolic spaces, except that the two-sphere uses its dedicated
 *  density-ratio display g/f.  Out-of-support triples give 0. */
inline double e_closed_form(const Space& sp, const OrbitTriple& t) {
  OrbitGeometry g = detail::geometry_of(sp);
  if (sp.dim < 2) throw std::invalid_argument("e_closed_form: dimension must be >= 2");
  if (!in_support(t, g)) return 0.0;
  if (sp.dim == 3) return 1.0;  // the only dimension where e collapses to 1
  const bool circular = (g == OrbitGeometry::spherical);
  if (circular && sp.dim == 2) {
    // g/f = sinc(r) Pi |halfsinc(s_i)|^{-1/2}
    auto s = detail::orbit_svars(t);
    auto h = [](double x) { return std::abs(half_angle_sinc(x)); };
    double prod = (h(s[0]) * h(s[3])) * (h(s[1]) * h(s[2]));
    return sinc(t.r) / std::sqrt(prod);
  }
  return std::pow(detail::e_ratio(t, circular), 0.5 * (sp.dim - 3));
}

/** @brief The e-kernel the twisted convolution actually integrates against:
 *  the exponent family at every dimension (on S^2 this differs from the
 *  density-ratio display by the factor j(r1) j(r2) / j(r)). */
inline double e_convolution(const Space& sp, const OrbitTriple& t) {
  OrbitGeometry g = detail::geometry_of(sp);
  if (sp.dim < 2) throw std::invalid_argument("e_convolution: dimension must be >= 2");
  if (!in_support(t, g)) return 0.0;
  if (sp.dim == 3) return 1.0;
  return std::pow(detail::e_ratio(t, g == OrbitGeometry::spherical), 0.5 * (sp.dim - 3));
}

}  // namespace heatlab
