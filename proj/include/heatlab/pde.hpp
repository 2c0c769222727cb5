#pragma once

// Radial Laplacians on the tangent and manifold sides, their conjugated
// (potential) form, the intertwining residual, and a Crank-Nicolson solver
// for the perturbed radial heat flow
//
//     du/dt = 1/2 (Delta_flat - Omega*) u
//
// on the tangent coordinate.  Dividing the solution by j (the principal
// sheet of the wrap) gives the standard manifold kernel, so the potential
// enters with a minus sign: on compact presets Omega* < 0 and the perturbed
// flow grows relative to the free one.
//
// All grids are uniform and staggered, r_i = (i + 1/2) h.  Radial functions
// extend evenly across the origin, which the stencils use through mirrored
// ghost values; the far end is closed with one-sided fourth-order stencils.

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "heatlab/potential.hpp"
#include "heatlab/root_system.hpp"
#include "heatlab/spectral.hpp"

namespace heatlab {

enum class OperatorSide { tangent, manifold };
enum class OperatorForm { direct, conjugated };

struct RadialOperator {
  const Space& space;
  OperatorSide side = OperatorSide::tangent;
  OperatorForm form = OperatorForm::direct;
};

struct PerturbedSolution {
  RadialFunction u;             // kernel values at t_final + mollification_time
  double boundary_loss = 0.0;   // mass absorbed at the far face, as a fraction of final mass
  double mollification_time = 0.0;
};

namespace detail {

// Checks the staggered layout and returns the spacing.
inline double staggered_spacing(const std::vector<double>& grid, const std::string& who) {
  if (grid.size() < 8) throw std::invalid_argument(who + ": need at least 8 grid points");
  double h = 2.0 * grid.front();
  if (!(h > 0.0))
    throw std::invalid_argument(who + ": grid must start at half a spacing above zero");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (std::abs(grid[i] - grid[i - 1] - h) > 1e-9 * h)
      throw std::invalid_argument(who + ": grid must be uniform and staggered");
  return h;
}

inline double sum_multiplicities(const Space& s) {
  double sm = 0.0;
  for (const auto& a : s.roots.roots) sm += a.multiplicity;
  return sm;
}

// Fourth-order first and second derivatives on the staggered grid.  Ghost
// values left of the origin are the mirrored samples times `parity`; the two
// rightmost points use one-sided stencils.
inline void derivatives4(const std::vector<double>& f, double h, double parity,
                         std::vector<double>& d1, std::vector<double>& d2) {
  const std::size_t n = f.size();
  d1.assign(n, 0.0);
  d2.assign(n, 0.0);
  auto at = [&](std::ptrdiff_t i) -> double {
    return i >= 0 ? f[static_cast<std::size_t>(i)] : parity * f[static_cast<std::size_t>(-i - 1)];
  };
  const double w1 = 1.0 / (12.0 * h), w2 = 1.0 / (12.0 * h * h);
  for (std::size_t i = 0; i + 2 < n; ++i) {
    std::ptrdiff_t k = static_cast<std::ptrdiff_t>(i);
    d1[i] = (at(k - 2) - 8.0 * at(k - 1) + 8.0 * f[i + 1] - f[i + 2]) * w1;
    d2[i] = (-at(k - 2) + 16.0 * at(k - 1) - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]) * w2;
  }
  d1[n - 2] = (-f[n - 5] + 6.0 * f[n - 4] - 18.0 * f[n - 3] + 10.0 * f[n - 2] + 3.0 * f[n - 1]) * w1;
  d2[n - 2] =
      (f[n - 6] - 6.0 * f[n - 5] + 14.0 * f[n - 4] - 4.0 * f[n - 3] - 15.0 * f[n - 2] +
       10.0 * f[n - 1]) *
      w2;
  d1[n - 1] =
      (3.0 * f[n - 5] - 16.0 * f[n - 4] + 36.0 * f[n - 3] - 48.0 * f[n - 2] + 25.0 * f[n - 1]) * w1;
  d2[n - 1] = (-10.0 * f[n - 6] + 61.0 * f[n - 5] - 156.0 * f[n - 4] + 214.0 * f[n - 3] -
               154.0 * f[n - 2] + 45.0 * f[n - 1]) *
              w2;
}

// delta'/delta for the chosen side: Sum m a cot(a r) (coth in the noncompact
// model) on the manifold, Sum m / r on the tangent side.
inline double radial_drift(const Space& s, OperatorSide side, double r) {
  if (side == OperatorSide::tangent) return sum_multiplicities(s) / r;
  double out = 0.0;
  for (const auto& al : s.roots.roots) {
    double a = s.angle_scale * al.coeffs[0];
    out += (s.curvature_sign > 0) ? al.multiplicity * a / std::tan(a * r)
                                  : al.multiplicity * a / std::tanh(a * r);
  }
  return out;
}

inline void check_wall(const Space& s, double r_max, const std::string& who) {
  if (s.curvature_sign > 0 && std::isfinite(s.fundamental_radius) &&
      r_max >= s.fundamental_radius - 1e-12)
    throw std::domain_error(who + ": grid touches the chamber wall");
}

}  // namespace detail

/** @brief Potential of the conjugated form: V = delta^{-1/2} (delta^{1/2})''.
 *
 * Closed form: with mu = (log delta^{1/2})' the value is mu^2 + mu'.  The
 * square-root density bends downward, so the leading constant is negative
 * (-1/4 - 1/4 csc^2 on the sphere surface, -1/4 r^-2 on the tangent plane).
 */
inline double conjugation_potential(const Space& s, OperatorSide side, double r) {
  if (s.roots.rank != 1)
    throw std::invalid_argument("conjugation_potential: rank-one spaces only");
  if (side == OperatorSide::tangent) {
    double k = 0.5 * detail::sum_multiplicities(s);
    return k * (k - 1.0) / (r * r);
  }
  double mu = 0.0, dmu = 0.0;
  for (const auto& al : s.roots.roots) {
    double a = s.angle_scale * al.coeffs[0];
    double half_m = 0.5 * al.multiplicity;
    if (s.curvature_sign > 0) {
      double sn = std::sin(a * r);
      mu += half_m * a * std::cos(a * r) / sn;
      dmu -= half_m * a * a / (sn * sn);
    } else {
      double sh = std::sinh(a * r);
      mu += half_m * a * std::cosh(a * r) / sh;
      dmu -= half_m * a * a / (sh * sh);
    }
  }
  return mu * mu + dmu;
}

/** @brief Radial Laplacian d^2 + drift d on a staggered grid, fourth order.
 *
 * The conjugated form evaluates delta^{-1/2} D^2 (delta^{1/2} f) - V f with
 * the closed-form potential V; for odd total multiplicity the half density
 * has a cusp at the origin and the conjugated values converge only away
 * from it.
 */
inline RadialFunction apply_radial_laplacian(const RadialOperator& op, const RadialFunction& f) {
  validate(f);
  if (f.weight != MeasureWeight::none)
    throw std::invalid_argument("apply_radial_laplacian: expects plain kernel samples");
  const Space& s = op.space;
  if (s.roots.rank != 1)
    throw std::invalid_argument("apply_radial_laplacian: rank-one spaces only");
  const double h = detail::staggered_spacing(f.grid, "apply_radial_laplacian");
  detail::check_wall(s, f.grid.back(), "apply_radial_laplacian");

  const std::size_t n = f.grid.size();
  RadialFunction out;
  out.grid = f.grid;
  out.values.assign(n, 0.0);

  std::vector<double> d1, d2;
  if (op.form == OperatorForm::direct) {
    detail::derivatives4(f.values, h, 1.0, d1, d2);
    for (std::size_t i = 0; i < n; ++i)
      out.values[i] = d2[i] + detail::radial_drift(s, op.side, f.grid[i]) * d1[i];
    return out;
  }

  // conjugated form; the ghost parity follows the half density r^{sm/2}
  const double sm = detail::sum_multiplicities(s);
  const long half_power = std::lround(0.5 * sm);
  const double parity =
      (std::abs(0.5 * sm - static_cast<double>(half_power)) < 1e-12 && half_power % 2 != 0) ? -1.0
                                                                                            : 1.0;
  const MeasureWeight w =
      op.side == OperatorSide::manifold ? MeasureWeight::delta : MeasureWeight::delta0;
  std::vector<double> g(n);
  std::vector<double> half(n);
  for (std::size_t i = 0; i < n; ++i) {
    half[i] = std::sqrt(density_eval(s, f.grid[i], w));
    g[i] = half[i] * f.values[i];
  }
  detail::derivatives4(g, h, parity, d1, d2);
  for (std::size_t i = 0; i < n; ++i)
    out.values[i] =
        d2[i] / half[i] - conjugation_potential(s, op.side, f.grid[i]) * f.values[i];
  return out;
}

/** @brief Sup-norm residual of the intertwining relation on the principal sheet.
 *
 * For u supported inside the open fundamental domain the wrap reduces to
 * u / j, and the manifold Laplacian of that must equal the bent image of
 * (Delta_flat - Omega*) u.
 */
inline double check_intertwining(const Space& s, const RadialFunction& u) {
  validate(u);
  if (u.weight != MeasureWeight::none)
    throw std::invalid_argument("check_intertwining: expects plain kernel samples");
  if (s.curvature_sign > 0 && std::isfinite(s.fundamental_radius) &&
      u.grid.back() >= s.fundamental_radius - 1e-12)
    throw std::domain_error("check_intertwining: support leaves the open fundamental domain");
  detail::staggered_spacing(u.grid, "check_intertwining");

  const std::size_t n = u.grid.size();
  RadialFunction wrapped;
  wrapped.grid = u.grid;
  wrapped.values.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    wrapped.values[i] = u.values[i] / j_eval(s, u.grid[i]);

  auto lhs = apply_radial_laplacian({s, OperatorSide::manifold, OperatorForm::direct}, wrapped);
  auto flat = apply_radial_laplacian({s, OperatorSide::tangent, OperatorForm::direct}, u);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double bent = (flat.values[i] - omega_star(s, u.grid[i]).value * u.values[i]) /
                  j_eval(s, u.grid[i]);
    worst = std::max(worst, std::abs(lhs.values[i] - bent));
  }
  return worst;
}

/** @brief Crank-Nicolson flow of du/dt = 1/2 (Delta_flat - Omega*) u.
 *
 * Starts from the flat kernel at t0 = 1e-3 (a mollified point mass), keeps
 * an even reflection at the origin and absorbs at the face beyond the last
 * grid point.  Compact spaces must leave a 0.05 buffer before the chamber
 * wall.  The absorbed mass is recorded; above 0.5% of the final mass the
 * run is rejected as unreliable.
 */
inline PerturbedSolution solve_perturbed_heat(const Space& s, double t_final,
                                              const std::vector<double>& grid, double dt,
                                              PotentialMode mode = PotentialMode::omega_star) {
  if (s.roots.rank != 1)
    throw std::invalid_argument("solve_perturbed_heat: rank-one spaces only");
  if (t_final <= 0.0) throw std::domain_error("solve_perturbed_heat: t_final must be positive");
  if (dt <= 0.0) throw std::domain_error("solve_perturbed_heat: dt must be positive");
  const double h = detail::staggered_spacing(grid, "solve_perturbed_heat");
  const long long steps = std::llround(t_final / dt);
  if (steps < 1 || std::abs(static_cast<double>(steps) * dt - t_final) > 1e-9 * std::max(1.0, t_final))
    throw std::invalid_argument("solve_perturbed_heat: dt must divide t_final evenly");
  if (s.curvature_sign > 0 && std::isfinite(s.fundamental_radius)) {
    double face = grid.back() + 0.5 * h;
    if (face > s.fundamental_radius - 0.05 + 1e-9)
      throw std::domain_error(
          "solve_perturbed_heat: grid needs a 0.05 buffer before the chamber wall");
  }

  const std::size_t n = grid.size();
  const double sm = detail::sum_multiplicities(s);
  const int model_dim = static_cast<int>(std::llround(1.0 + sm));
  const double t0 = 1e-3;

  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = heat_kernel_flat(model_dim, grid[i], t0);

  // generator rows: T = 1/2 (second difference + drift - V), folded at the
  // origin (ghost u_{-1} = u_0) and Dirichlet at the far ghost.
  std::vector<double> lower(n, 0.0), diag(n, 0.0), upper(n, 0.0);
  const double ih2 = 1.0 / (h * h);
  for (std::size_t i = 0; i < n; ++i) {
    double V = mode == PotentialMode::zero ? 0.0 : omega_star(s, grid[i]).value;
    double d = sm / grid[i];
    if (i == 0) {
      diag[i] = 0.5 * (-ih2 - d / (2.0 * h) - V);
      upper[i] = 0.5 * (ih2 + d / (2.0 * h));
    } else {
      lower[i] = 0.5 * (ih2 - d / (2.0 * h));
      diag[i] = 0.5 * (-2.0 * ih2 - V);
      if (i + 1 < n) upper[i] = 0.5 * (ih2 + d / (2.0 * h));
    }
  }

  // Thomas factorization of (I - dt/2 T), reused every step
  std::vector<double> a(n), b(n), c(n), cp(n), rhs(n), scratch(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = -0.5 * dt * lower[i];
    b[i] = 1.0 - 0.5 * dt * diag[i];
    c[i] = -0.5 * dt * upper[i];
  }
  cp[0] = c[0] / b[0];
  for (std::size_t i = 1; i < n; ++i) cp[i] = c[i] / (b[i] - a[i] * cp[i - 1]);

  const double face_r = grid.back() + 0.5 * h;
  const double face_w = std::pow(face_r, sm);
  double absorbed = 0.0;
  for (long long step = 0; step < steps; ++step) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = (1.0 + 0.5 * dt * diag[i]) * u[i];
      if (i > 0) acc += 0.5 * dt * lower[i] * u[i - 1];
      if (i + 1 < n) acc += 0.5 * dt * upper[i] * u[i + 1];
      rhs[i] = acc;
    }
    scratch[0] = rhs[0] / b[0];
    for (std::size_t i = 1; i < n; ++i)
      scratch[i] = (rhs[i] - a[i] * scratch[i - 1]) / (b[i] - a[i] * cp[i - 1]);
    double prev_last = u[n - 1];
    u[n - 1] = scratch[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) u[i] = scratch[i] - cp[i] * u[i + 1];
    // outflow through the absorbing face: -1/2 r^sm du/dr with the zero ghost
    absorbed += dt * 0.5 * face_w * 0.5 * (prev_last + u[n - 1]) / h;
  }

  double mass = 0.0;
  for (std::size_t i = 0; i < n; ++i) mass += std::pow(grid[i], sm) * u[i] * h;
  PerturbedSolution out;
  out.u.grid = grid;
  out.u.values = std::move(u);
  out.u.weight = MeasureWeight::none;
  out.mollification_time = t0;
  out.boundary_loss = absorbed <= 0.0 ? 0.0 : absorbed / (mass + absorbed);
  if (out.boundary_loss > 0.005)
    throw std::runtime_error(
        "solve_perturbed_heat: boundary loss above 0.5% of the mass; enlarge the domain or "
        "shorten t_final");
  return out;
}

}  // namespace heatlab
