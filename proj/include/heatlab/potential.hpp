#pragma once

// The scalar potential Omega* = j^{-1} (flat radial Laplacian) j in closed
// form.  Written as a singularity-free combination of
//   S_c(a) = cosec^2 a - 1/a^2   (compact)
//   S_n(a) = csch^2 a - 1/a^2    (noncompact)
// in which every 1/a^2 piece cancels identically:
//
//   Omega*(r) = -sgn |rho|^2
//             + sum_alpha  m(m-2)/4 |alpha|^2 S(alpha(H))
//             + sum_{2alpha also a root}  m_a m_2a / 2 |alpha|^2 S(alpha(H))
//
// with sgn = +1 on compact, -1 on noncompact spaces.  The coupling term is
// the stable rewrite of the cot(a)cot(2a) / coth(a)coth(2a) cross terms:
//   2 cot a cot 2a + 2 = cosec^2 a,   coth a coth 2a - 1 = csch^2(a)/2.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "heatlab/root_system.hpp"
#include "heatlab/scalar_series.hpp"

namespace heatlab {

struct PotentialValue {
  double value = 0.0;
  enum class Regime { generic, series_near_zero, series_near_wall } regime = Regime::generic;
};

// Perturbed dynamics either carry the full potential or switch it off (the
// flat control run used by solver and sampler tests).
enum class PotentialMode { omega_star, zero };

/** @brief Closed-form potential at radial coordinate r (rank-one spaces).
 *
 * Evaluates on the root data as given (no half-angle rescaling): presets with
 * all multiplicities equal to two have an identically vanishing F-part, so
 * the value is exactly -+|rho|^2 either way.
 */
inline PotentialValue omega_star(const Space& s, double r) {
  if (s.roots.rank != 1)
    throw std::invalid_argument("omega_star: radial evaluation needs a rank-one space");
  constexpr double kPi = 3.14159265358979323846;
  const bool compact = s.curvature_sign > 0;

  PotentialValue out;
  out.value = (compact ? -1.0 : 1.0) * rho_norm_sq(s);

  bool near_zero = false, near_wall = false;
  auto s_term = [&](double a, double coef) {
    if (coef == 0.0) return 0.0;
    double aa = std::abs(a);
    if (aa < 1e-3) {
      near_zero = true;
    } else if (compact) {
      // genuine divergence: a at a nonzero multiple of pi
      if (std::abs(std::sin(aa)) < 1e-9)
        throw std::domain_error("omega_star: pole, alpha(H) at a nonzero multiple of pi");
      double k = std::round(aa / kPi);
      if (k >= 1.0 && std::abs(aa - k * kPi) < 1e-3) near_wall = true;
    }
    return coef * (compact ? csc2_minus_invsq(a) : csch2_minus_invsq(a));
  };

  const auto& roots = s.roots.roots;
  for (const auto& al : roots) {
    double n2 = pairing(s.roots, al.coeffs, al.coeffs);
    double coef = 0.25 * al.multiplicity * (al.multiplicity - 2) * n2;
    out.value += s_term(al.coeffs[0] * r, coef);
  }
  for (const auto& al : roots)
    for (const auto& be : roots) {
      if (&al == &be) continue;
      if (std::abs(be.coeffs[0] - 2.0 * al.coeffs[0]) > 1e-12) continue;
      // multipliable pair: the coupling attaches to the shorter root
      double n2 = pairing(s.roots, al.coeffs, al.coeffs);
      out.value += s_term(al.coeffs[0] * r, 0.5 * al.multiplicity * be.multiplicity * n2);
    }

  out.regime = near_zero   ? PotentialValue::Regime::series_near_zero
               : near_wall ? PotentialValue::Regime::series_near_wall
                           : PotentialValue::Regime::generic;
  return out;
}

/** @brief H -> 0 limit of omega_star.
 *
 * S(a) -> +-1/3, so the limit is -+|rho|^2 + sum m(m-2)/12 |alpha|^2 with the
 * sign of the curvature.  Spheres give n(1-n)/6.  Hyperbolic spaces give
 * n(n-1)/6 by the csch series; a published statement of this constant
 * disagrees with the formula it follows from, and the series value is the
 * one confirmed by the finite-difference oracle.
 */
inline double omega_star_limit(const Space& s) {
  const auto& roots = s.roots.roots;
  for (const auto& al : roots)
    for (const auto& be : roots)
      if (&al != &be && std::abs(be.coeffs[0] - 2.0 * al.coeffs[0]) < 1e-12)
        throw std::invalid_argument(
            "omega_star_limit: multipliable roots unsupported, evaluate omega_star near 0");
  const bool compact = s.curvature_sign > 0;
  double out = (compact ? -1.0 : 1.0) * rho_norm_sq(s);
  for (const auto& al : roots) {
    double n2 = pairing(s.roots, al.coeffs, al.coeffs);
    out += (compact ? 1.0 : -1.0) * al.multiplicity * (al.multiplicity - 2) * n2 / 12.0;
  }
  return out;
}

enum class IdentityKind { rational, compact, noncompact };

/** @brief Left-hand side of the pairwise root identities:
 *  sum over ordered non-proportional pairs of
 *  m_a m_b <a,b> * { 1/(ab) | cot a cot b + 1 | coth a coth b - 1 }.
 *  Cancels to zero on every root system; rank one has no such pairs at all. */
inline double op_identity_residual(const RestrictedRootSystem& rs, const std::vector<double>& H,
                                   IdentityKind which) {
  const auto& roots = rs.roots;
  double res = 0.0;
  for (std::size_t i = 0; i < roots.size(); ++i)
    for (std::size_t j = 0; j < roots.size(); ++j) {
      if (i == j) continue;
      double ab = pairing(rs, roots[i].coeffs, roots[j].coeffs);
      double aa = pairing(rs, roots[i].coeffs, roots[i].coeffs);
      double bb = pairing(rs, roots[j].coeffs, roots[j].coeffs);
      if (std::abs(ab * ab - aa * bb) <= 1e-12 * aa * bb) continue;  // proportional pair
      double a = root_value(rs, roots[i], H);
      double b = root_value(rs, roots[j], H);
      if (a == 0.0 || b == 0.0)
        throw std::domain_error("op_identity_residual: H lies on a root hyperplane");
      double w;
      switch (which) {
        case IdentityKind::rational:
          w = 1.0 / (a * b);
          break;
        case IdentityKind::compact:
          w = cot(a) * cot(b) + 1.0;
          break;
        default:
          w = coth(a) * coth(b) - 1.0;
          break;
      }
      res += roots[i].multiplicity * roots[j].multiplicity * ab * w;
    }
  return res;
}

}  // namespace heatlab
