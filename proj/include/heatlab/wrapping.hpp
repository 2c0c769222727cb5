#pragma once

// Lattice wrapping of flat radial functions onto compact spaces, the
// noncompact "bend" phi -> phi / j, and the rho-shift between the wrapped
// Gaussian scale and the standard heat-kernel scale.
//
// The plain wrap of the flat Gaussian lands on the shifted kernel:
//   compact     wrap(p_t) = e^{-|rho|^2 t/2} x (spectral kernel)
//   noncompact  bend(p_t) = e^{+|rho|^2 t/2} x (heat kernel)
// so to_standard multiplies by exp(+|rho|^2 t/2) on compact spaces and by
// exp(-|rho|^2 t/2) on noncompact ones.

#include <cmath>
#include <concepts>
#include <cstdlib>
#include <stdexcept>

#include "root_system.hpp"
#include "scalar_series.hpp"
#include "util.hpp"

namespace heatlab {

enum class WrapBranch { abs_j, signed_j, maslov };

struct WrapPolicy {
  int lattice_terms = 12;                   // sum over k = -K .. K on the lattice 2 pi Z
  WrapBranch branch = WrapBranch::abs_j;    // how j is continued past its first zero
  bool shift_applied = false;               // bookkeeping: values already on the standard scale
};

enum class ShiftDirection { to_standard, to_shifted };

namespace detail {

// j at a lattice translate under the requested branch.  abs_j takes
// (|sin x|/|x|)^{m/2} per root; signed_j keeps the sign of sin(x)/x, which is
// only real for even m once the factor goes negative; maslov decorates the
// abs_j value with the sign (-1)^{k m}.
inline double branch_jacobian(const Space& s, double x, WrapBranch b, int k) {
  double out = 1.0;
  int total_mult = 0;
  for (const auto& root : s.roots.roots) {
    if (root.coeffs.size() != 1)
      throw std::invalid_argument("branch_jacobian: rank-one spaces only");
    const double arg = s.angle_scale * root.coeffs[0] * x;
    const double f = sinc(arg);
    total_mult += root.multiplicity;
    if (b == WrapBranch::signed_j) {
      if (root.multiplicity % 2 == 0) {
        out *= ipow(f, root.multiplicity / 2);
      } else {
        if (f < 0.0)
          throw std::domain_error(
              "signed branch: negative radicand under odd multiplicity at a lattice "
              "translate");
        out *= std::pow(f, 0.5 * root.multiplicity);
      }
    } else {
      out *= std::pow(std::abs(f), 0.5 * root.multiplicity);
    }
  }
  if (b == WrapBranch::maslov && (std::abs(k) * total_mult) % 2 != 0) out = -out;
  return out;
}

inline void check_compact_wrap_args(const Space& s, double theta, const WrapPolicy& policy) {
  if (s.curvature_sign <= 0)
    throw std::invalid_argument("wrap_compact: space must be compact");
  if (policy.lattice_terms < 1)
    throw std::invalid_argument("wrap_compact: lattice_terms must be >= 1");
  if (theta < 0.0 || theta > s.fundamental_radius + 1e-12)
    throw std::domain_error("wrap_compact: angle outside the fundamental domain");
}

}  // namespace detail

/** @brief Lattice sum Sigma_k (mu / j)(theta + 2 pi k) with the chosen j-branch. */
template <class F>
  requires std::invocable<F&, double>
inline double wrap_compact(const Space& s, F&& mu, double theta, const WrapPolicy& policy) {
  detail::check_compact_wrap_args(s, theta, policy);
  const double period = 2.0 * 3.14159265358979323846;
  double sum = 0.0;
  for (int k = -policy.lattice_terms; k <= policy.lattice_terms; ++k) {
    const double x = theta + period * k;
    sum += mu(x) / detail::branch_jacobian(s, x, policy.branch, k);
  }
  return sum;
}

/** @brief Wrap of a tabulated radial function; samples beyond the table vanish. */
inline double wrap_compact(const Space& s, const RadialFunction& mu, double theta,
                           const WrapPolicy& policy) {
  if (mu.weight != MeasureWeight::none)
    throw std::invalid_argument("wrap_compact: tabulated input must be an unweighted function");
  validate(mu);
  auto eval = [&mu](double x) {
    const double r = std::abs(x);  // radial data: even extension through 0
    if (r < mu.grid.front() || r > mu.grid.back()) return 0.0;
    return interp_cubic(mu.grid, mu.values, r);
  };
  return wrap_compact(s, eval, theta, policy);
}

/** @brief Noncompact bend (phi / j)(r); with phi = j this is identically one. */
template <class F>
  requires std::invocable<F&, double>
inline double wrap_noncompact(const Space& s, F&& phi, double r) {
  if (s.curvature_sign >= 0)
    throw std::invalid_argument("wrap_noncompact: space must be noncompact");
  if (r < 0.0) throw std::domain_error("wrap_noncompact: radius must be nonnegative");
  return phi(r) / j_eval(s, r);
}

inline double wrap_noncompact(const Space& s, const RadialFunction& phi, double r) {
  if (phi.weight != MeasureWeight::none)
    throw std::invalid_argument("wrap_noncompact: tabulated input must be an unweighted function");
  validate(phi);
  if (r < phi.grid.front() || r > phi.grid.back())
    throw std::domain_error("wrap_noncompact: radius outside the tabulated range");
  return wrap_noncompact(s, [&](double x) { return interp_cubic(phi.grid, phi.values, x); }, r);
}

/** @brief Move a value between the wrapped-Gaussian scale and the standard
 *  kernel scale: to_standard multiplies by e^{+|rho|^2 t/2} on compact spaces
 *  and by e^{-|rho|^2 t/2} on noncompact ones; to_shifted is the inverse. */
inline double apply_rho_shift(double value, const Space& s, double t, ShiftDirection dir) {
  if (t <= 0.0) throw std::domain_error("apply_rho_shift: t must be positive");
  const double rho2 = rho_norm_sq(s);
  if (rho2 == 0.0) return value;
  double sign = (s.curvature_sign > 0) ? 1.0 : -1.0;
  if (dir == ShiftDirection::to_shifted) sign = -sign;
  return value * std::exp(0.5 * sign * rho2 * t);
}

}  // namespace heatlab
