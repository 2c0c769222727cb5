#pragma once

// Brownian samplers.  The geodesic walk steps along geodesics of the sphere
// or hyperbolic presets with tangent Gaussian increments, and returns radial
// distances from the start.  The weighted flat walk runs in the tangent
// space from the origin, bends each path by exp(-1/2 int Omega* ds)
// (trapezoidal along the path), kills at the 0.05 buffer before the chamber
// wall, and bins the weighted endpoint radii against the flat radial
// measure (the delta0 weight) with a Freedman-Diaconis width.
//
// Every path draws from its own counter-based stream keyed by (seed, path
// index) and endpoints land in path-indexed slots, so results are identical
// under any thread count; the histogram pass is sequential in path order.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "heatlab/potential.hpp"
#include "heatlab/random.hpp"
#include "heatlab/root_system.hpp"
#include "heatlab/util.hpp"

namespace heatlab {

enum class WalkScheme { geodesic_walk, flat_walk_fk };

struct WalkConfig {
  long long step_count = 0;
  long long sample_count = 0;
  double t = 0.0;
  std::uint64_t seed = 0;
  WalkScheme scheme = WalkScheme::geodesic_walk;
};

struct MCEstimate {
  std::vector<double> grid;       // caller's probe points
  std::vector<double> density;    // kernel-value estimate at each probe point's bin
  std::vector<double> std_error;  // one-sigma error of that estimate
  double effective_samples = 0.0;
  double bin_width = 0.0;
  double mass = 0.0;             // integral of the weighted law over the domain
  double killed_mass = 0.0;      // weight absorbed at the kill buffer
  double escape_estimate = 0.0;  // a-priori bound checked by the precondition
  double weight_min = 0.0, weight_max = 0.0;  // weight range over surviving paths
  double omega_min = 0.0, omega_max = 0.0;    // potential range over visited radii
};

namespace detail {

inline void check_walk_config(const WalkConfig& cfg, WalkScheme expected, int walk_dim,
                              double fundamental_radius, const std::string& who) {
  if (cfg.scheme != expected)
    throw std::invalid_argument(who + ": config built for the other sampling scheme");
  if (cfg.step_count < 1) throw std::invalid_argument(who + ": step_count must be positive");
  if (cfg.sample_count < 1) throw std::invalid_argument(who + ": sample_count must be positive");
  if (!(cfg.t > 0.0)) throw std::domain_error(who + ": t must be positive");
  if (std::isfinite(fundamental_radius)) {
    double mean_step =
        std::sqrt(static_cast<double>(walk_dim) * cfg.t / static_cast<double>(cfg.step_count));
    if (!(mean_step < fundamental_radius / 20.0))
      throw std::invalid_argument(who +
                                  ": mean step exceeds a twentieth of the fundamental radius; "
                                  "increase step_count");
  }
}

// surface area of the unit sphere in R^n
inline double unit_sphere_area(int n) {
  return 2.0 * std::pow(3.14159265358979323846, 0.5 * n) / std::tgamma(0.5 * n);
}

}  // namespace detail

/** @brief Geodesic random walk on S^n / H^n (n <= 3): radial endpoint distances.
 *
 * Each step draws an isotropic Gaussian of variance t/step_count per
 * coordinate in an orthonormal tangent frame and moves along the geodesic it
 * spans.  The walk lives in the embedding (unit sphere, or the upper
 * hyperboloid of the Minkowski form), renormalized each step.
 */
inline std::vector<double> geodesic_walk(const Space& s, const WalkConfig& cfg) {
  const bool spherical = s.kind == SpaceKind::sphere;
  if (!spherical && s.kind != SpaceKind::hyperbolic)
    throw std::invalid_argument("geodesic_walk: sphere and hyperbolic presets only");
  const int n = s.dim;
  if (n < 2 || n > 3) throw std::invalid_argument("geodesic_walk: dimension must be 2 or 3");
  detail::check_walk_config(cfg, WalkScheme::geodesic_walk, n, s.fundamental_radius,
                            "geodesic_walk");

  const int N = n + 1;  // embedding dimension
  const double sigma = std::sqrt(cfg.t / static_cast<double>(cfg.step_count));
  std::vector<double> out(static_cast<std::size_t>(cfg.sample_count), 0.0);

  // Minkowski pairing on the hyperboloid, Euclidean dot on the sphere
  auto form = [&](const double* a, const double* b) {
    double v = a[0] * b[0];
    for (int i = 1; i < N; ++i) v += (spherical ? 1.0 : -1.0) * a[i] * b[i];
    return v;
  };

  parallel_for(out.size(), [&](std::size_t path) {
    CounterRng rng(cfg.seed, static_cast<std::uint64_t>(path));
    double x[4] = {1.0, 0.0, 0.0, 0.0};
    double frame[3][4];
    for (long long step = 0; step < cfg.step_count; ++step) {
      // orthonormal tangent frame from projected coordinate axes
      int got = 0;
      for (int k = 0; k < N && got < n; ++k) {
        double v[4];
        double xk = form(x, x);  // == 1 up to roundoff
        double proj = (spherical ? x[k] : (k == 0 ? x[0] : -x[k])) / xk;
        for (int i = 0; i < N; ++i) v[i] = (i == k ? 1.0 : 0.0) - proj * x[i];
        for (int f = 0; f < got; ++f) {
          double c = (spherical ? 1.0 : -1.0) * form(v, frame[f]);
          for (int i = 0; i < N; ++i) v[i] -= c * frame[f][i];
        }
        double nrm2 = (spherical ? 1.0 : -1.0) * form(v, v);
        if (nrm2 < 1e-12) continue;
        double inv = 1.0 / std::sqrt(nrm2);
        for (int i = 0; i < N; ++i) frame[got][i] = v[i] * inv;
        ++got;
      }
      if (got < n) continue;  // degenerate frame (measure zero): stay put this step
      // tangent Gaussian step along the geodesic it spans
      double xi[3], len2 = 0.0;
      for (int f = 0; f < n; ++f) {
        xi[f] = rng.normal();
        len2 += xi[f] * xi[f];
      }
      double len = sigma * std::sqrt(len2);
      if (len == 0.0) continue;
      double ca = spherical ? std::cos(len) : std::cosh(len);
      double sa = spherical ? std::sin(len) : std::sinh(len);
      double y[4];
      for (int i = 0; i < N; ++i) {
        double u = 0.0;
        for (int f = 0; f < n; ++f) u += xi[f] * frame[f][i];
        y[i] = ca * x[i] + sa * u / std::sqrt(len2);
      }
      double scale = 1.0 / std::sqrt(form(y, y));
      for (int i = 0; i < N; ++i) x[i] = y[i] * scale;
    }
    out[path] = spherical ? std::acos(std::clamp(x[0], -1.0, 1.0))
                          : std::acosh(std::max(x[0], 1.0));
  });
  return out;
}

/** @brief Weighted flat walk: kernel-density estimate of the bent endpoint law.
 *
 * The weight bends against the potential, exp(-1/2 int Omega* ds), so on a
 * compact preset the mean weight grows with t and the recorded mass exceeds
 * one; dividing the estimate by j on the principal sheet reproduces the
 * standard kernel.  Paths reaching the 0.05 kill buffer stop and their
 * weight (closed with a one-sided rectangle) is reported as killed mass.
 */
inline MCEstimate flat_walk_feynman_kac(const Space& s, const WalkConfig& cfg,
                                        const std::vector<double>& grid,
                                        PotentialMode mode = PotentialMode::omega_star) {
  if (s.roots.rank != 1)
    throw std::invalid_argument("flat_walk_feynman_kac: rank-one spaces only");
  if (s.curvature_sign <= 0 || !std::isfinite(s.fundamental_radius))
    throw std::invalid_argument("flat_walk_feynman_kac: needs a compact space");
  double sm = 0.0;
  for (const auto& a : s.roots.roots) sm += a.multiplicity;
  const int n = static_cast<int>(std::llround(1.0 + sm));
  if (n < 1 || n > 3)
    throw std::invalid_argument("flat_walk_feynman_kac: tangent dimension must be at most 3");
  detail::check_walk_config(cfg, WalkScheme::flat_walk_fk, n, s.fundamental_radius,
                            "flat_walk_feynman_kac");
  const double kill_radius = s.fundamental_radius - 0.05;

  // a-priori escape bound: twice the chance the endpoint alone lies outside
  const double escape =
      2.0 * boost::math::gamma_q(0.5 * n, kill_radius * kill_radius / (2.0 * cfg.t));
  if (!(escape < 1e-4))
    throw std::invalid_argument(
        "flat_walk_feynman_kac: estimated escape probability reaches 1e-4; reduce t");

  const std::size_t paths = static_cast<std::size_t>(cfg.sample_count);
  const double dt = cfg.t / static_cast<double>(cfg.step_count);
  const double sigma = std::sqrt(dt);
  const double omega0 =
      mode == PotentialMode::zero ? 0.0 : omega_star(s, 0.0).value;

  std::vector<double> radius(paths, 0.0), weight(paths, 0.0);
  std::vector<char> alive(paths, 0);
  std::vector<double> po_min(paths, 0.0), po_max(paths, 0.0);

  parallel_for(paths, [&](std::size_t path) {
    CounterRng rng(cfg.seed, static_cast<std::uint64_t>(path));
    double x[3] = {0.0, 0.0, 0.0};
    double integral = 0.0;
    double prev = omega0, omin = omega0, omax = omega0;
    bool live = true;
    for (long long step = 0; step < cfg.step_count; ++step) {
      double r2 = 0.0;
      for (int i = 0; i < n; ++i) {
        x[i] += sigma * rng.normal();
        r2 += x[i] * x[i];
      }
      double r = std::sqrt(r2);
      if (r >= kill_radius) {
        integral += dt * prev;  // close with a rectangle at the last interior node
        live = false;
        break;
      }
      double cur = mode == PotentialMode::zero ? 0.0 : omega_star(s, r).value;
      integral += dt * 0.5 * (prev + cur);
      omin = std::min(omin, cur);
      omax = std::max(omax, cur);
      prev = cur;
      if (step + 1 == cfg.step_count) radius[path] = r;
    }
    weight[path] = std::exp(-0.5 * integral);
    alive[path] = live ? 1 : 0;
    po_min[path] = omin;
    po_max[path] = omax;
  });

  MCEstimate est;
  est.grid = grid;
  est.escape_estimate = escape;

  // deterministic reductions in path order
  double killed = 0.0, wsum = 0.0, wsq = 0.0;
  double omin = omega0, omax = omega0;
  double wmin = std::numeric_limits<double>::infinity(), wmax = 0.0;
  std::vector<double> surv;
  surv.reserve(paths);
  for (std::size_t i = 0; i < paths; ++i) {
    omin = std::min(omin, po_min[i]);
    omax = std::max(omax, po_max[i]);
    if (!alive[i]) {
      killed += weight[i];
      continue;
    }
    surv.push_back(radius[i]);
    wmin = std::min(wmin, weight[i]);
    wmax = std::max(wmax, weight[i]);
    wsum += weight[i];
    wsq += weight[i] * weight[i];
  }
  const double N = static_cast<double>(paths);
  est.killed_mass = killed / N;
  est.mass = wsum / N;
  est.weight_min = wmin;
  est.weight_max = wmax;
  est.omega_min = omin;
  est.omega_max = omax;
  est.effective_samples = wsq > 0.0 ? wsum * wsum / wsq : 0.0;
  if (est.killed_mass > 0.01)
    throw std::runtime_error("flat_walk_feynman_kac: more than 1% of the mass was killed at "
                             "the wall buffer; reduce t");
  if (surv.empty()) throw std::runtime_error("flat_walk_feynman_kac: no surviving paths");

  // Freedman-Diaconis width from the surviving radii, snapped to tile [0, kill)
  std::vector<double> sorted = surv;
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double q) {
    double idx = q * static_cast<double>(sorted.size() - 1);
    std::size_t lo = static_cast<std::size_t>(idx);
    double frac = idx - static_cast<double>(lo);
    return lo + 1 < sorted.size() ? sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac
                                  : sorted[lo];
  };
  double iqr = quantile(0.75) - quantile(0.25);
  double width = 2.0 * iqr / std::cbrt(static_cast<double>(sorted.size()));
  if (!(width > 0.0)) width = kill_radius / 64.0;
  const std::size_t nb = std::max<std::size_t>(8, static_cast<std::size_t>(
                                                      std::ceil(kill_radius / width)));
  width = kill_radius / static_cast<double>(nb);
  est.bin_width = width;

  std::vector<double> S(nb, 0.0), S2(nb, 0.0);
  for (std::size_t i = 0; i < paths; ++i) {
    if (!alive[i]) continue;
    std::size_t b = std::min(nb - 1, static_cast<std::size_t>(radius[i] / width));
    S[b] += weight[i];
    S2[b] += weight[i] * weight[i];
  }

  const double area = detail::unit_sphere_area(n);
  const double p = sm + 1.0;
  est.density.assign(grid.size(), 0.0);
  est.std_error.assign(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double r = grid[i];
    if (r < 0.0 || r >= kill_radius) continue;
    std::size_t b = std::min(nb - 1, static_cast<std::size_t>(r / width));
    double lo = width * static_cast<double>(b), hi = lo + width;
    double mu = area * (std::pow(hi, p) - std::pow(lo, p)) / p;
    double mean = S[b] / N;
    est.density[i] = mean / mu;
    double var = std::max(0.0, S2[b] / N - mean * mean);
    est.std_error[i] = std::sqrt(var / N) / mu;
  }
  return est;
}

}  // namespace heatlab
