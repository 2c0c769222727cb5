#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "heatlab/root_system.hpp"
#include "heatlab/spectral.hpp"
#include "heatlab/util.hpp"
#include "heatlab/wrapping.hpp"

using namespace heatlab;

namespace {
constexpr double kPi = 3.14159265358979323846;

double rel_gap(double a, double b) { return std::abs(a - b) / std::abs(b); }
}  // namespace

TEST_CASE("circle wrap reproduces the spectral kernel", "[wrapping]") {
  Space s1 = build_space(SpaceKind::circle, 1);
  for (double t : {0.25, 1.0}) {
    auto flat = [t](double x) { return heat_kernel_flat(1, x, t); };
    // cancellation in the alternating spectral sum near theta = pi caps the
    // attainable pointwise accuracy, so compare relative to the peak value
    double peak = heat_kernel_sphere(1, 0.0, t, 1e-18).first;
    for (double theta : {0.0, 0.3, 1.2, 2.2, kPi}) {
      double w = wrap_compact(s1, flat, theta, WrapPolicy{});
      double ref = heat_kernel_sphere(1, theta, t, 1e-18).first;
      CHECK(std::abs(w - ref) <= 1e-12 * peak);
    }
  }
}

TEST_CASE("three-sphere wrap with the signed branch is exact after the rho shift",
          "[wrapping]") {
  Space s3 = build_space(SpaceKind::sphere, 3);
  WrapPolicy pol;
  pol.branch = WrapBranch::signed_j;
  pol.lattice_terms = 12;
  for (double t : {0.25, 0.5, 1.0}) {
    auto flat = [t](double x) { return heat_kernel_flat(3, x, t); };
    for (double theta : linspace(0.1, 3.0, 24)) {
      double w = wrap_compact(s3, flat, theta, pol);
      double spectral = heat_kernel_sphere(3, theta, t, 1e-18).first;
      // the plain lattice wrap lands on the rho-shifted kernel ...
      CHECK(rel_gap(w, spectral * std::exp(-0.5 * t)) < 1e-8);
      // ... and the shift map sends it back to the standard one
      double back = apply_rho_shift(w, s3, t, ShiftDirection::to_standard);
      CHECK(rel_gap(back, spectral) < 1e-10);
    }
  }
}

TEST_CASE("two-sphere wrap is not exact under any branch", "[wrapping]") {
  Space s2 = build_space(SpaceKind::sphere, 2);
  const double t = 1.0, theta = 0.5 * kPi;
  auto flat = [t](double x) { return heat_kernel_flat(2, x, t); };
  double spectral = heat_kernel_sphere(2, theta, t, 1e-18).first;

  WrapPolicy abs_pol;  // default branch
  double w_abs = wrap_compact(s2, flat, theta, abs_pol);
  double best_abs = apply_rho_shift(w_abs, s2, t, ShiftDirection::to_standard);
  CHECK(rel_gap(best_abs, spectral) > 1e-3);

  WrapPolicy mas_pol;
  mas_pol.branch = WrapBranch::maslov;
  double w_mas = wrap_compact(s2, flat, theta, mas_pol);
  double best_mas = apply_rho_shift(w_mas, s2, t, ShiftDirection::to_standard);
  CHECK(rel_gap(best_mas, spectral) > 1e-3);

  // the signed branch cannot even be evaluated: odd multiplicity meets a
  // negative radicand on the k = -1 translate
  WrapPolicy sgn_pol;
  sgn_pol.branch = WrapBranch::signed_j;
  CHECK_THROWS_AS(wrap_compact(s2, flat, theta, sgn_pol), std::domain_error);
}

TEST_CASE("signed branch accepts even multiplicities everywhere", "[wrapping]") {
  Space s3 = build_space(SpaceKind::sphere, 3);
  WrapPolicy pol;
  pol.branch = WrapBranch::signed_j;
  auto flat = [](double x) { return heat_kernel_flat(3, x, 0.5); };
  // translates with sin(x)/x < 0 are fine when m is even: the factor enters as
  // an integer power, and the term just carries the sign
  double w = wrap_compact(s3, flat, 2.9, pol);
  CHECK(std::isfinite(w));
  CHECK(w > 0.0);
}

TEST_CASE("maslov branch flips alternate lattice terms on odd total multiplicity",
          "[wrapping]") {
  Space s2 = build_space(SpaceKind::sphere, 2);
  Space s3 = build_space(SpaceKind::sphere, 3);
  const double t = 1.0, theta = 1.0;

  auto flat2 = [t](double x) { return heat_kernel_flat(2, x, t); };
  WrapPolicy pol;
  pol.lattice_terms = 1;
  pol.branch = WrapBranch::maslov;
  double got = wrap_compact(s2, flat2, theta, pol);
  double manual = 0.0;
  for (int k = -1; k <= 1; ++k) {
    double x = theta + 2.0 * kPi * k;
    double jabs = std::sqrt(std::abs(std::sin(x) / x));
    double sign = (k % 2 == 0) ? 1.0 : -1.0;  // (-1)^{k m} with m = 1
    manual += sign * flat2(x) / jabs;
  }
  CHECK(got == Catch::Approx(manual).epsilon(1e-14));

  // total multiplicity 2 on S^3: the sign (-1)^{2k} is always +1, so the
  // maslov branch coincides with the absolute-value branch
  auto flat3 = [t](double x) { return heat_kernel_flat(3, x, t); };
  WrapPolicy abs_pol;
  abs_pol.lattice_terms = 6;
  WrapPolicy mas_pol = abs_pol;
  mas_pol.branch = WrapBranch::maslov;
  for (double th : {0.4, 1.3, 2.7}) {
    CHECK(wrap_compact(s3, flat3, th, mas_pol) ==
          Catch::Approx(wrap_compact(s3, flat3, th, abs_pol)).epsilon(1e-15));
  }
}

TEST_CASE("lattice truncation has converged at the default depth", "[wrapping]") {
  Space s2 = build_space(SpaceKind::sphere, 2);
  Space s1 = build_space(SpaceKind::circle, 1);
  const double t = 2.0;
  auto flat2 = [t](double x) { return heat_kernel_flat(2, x, t); };
  auto flat1 = [t](double x) { return heat_kernel_flat(1, x, t); };
  WrapPolicy k8, k16;
  k8.lattice_terms = 8;
  k16.lattice_terms = 16;
  for (double theta : {0.3, 1.5708, 2.9}) {
    double a2 = wrap_compact(s2, flat2, theta, k8);
    double b2 = wrap_compact(s2, flat2, theta, k16);
    CHECK(std::abs(a2 - b2) <= 1e-12 * std::abs(b2));
    double a1 = wrap_compact(s1, flat1, theta, k8);
    double b1 = wrap_compact(s1, flat1, theta, k16);
    CHECK(std::abs(a1 - b1) <= 1e-12 * std::abs(b1));
  }
}

TEST_CASE("hyperbolic bend reproduces the closed-form kernel", "[wrapping]") {
  Space h3 = build_space(SpaceKind::hyperbolic, 3);
  for (double t : {0.5, 1.0}) {
    auto flat = [t](double x) { return heat_kernel_flat(3, x, t); };
    for (double r : {0.3, 1.0, 2.5}) {
      double bend = wrap_noncompact(h3, flat, r);
      double q = heat_kernel_complex_group(h3, r, t);
      // the bend sits a factor e^{+|rho|^2 t/2} above the kernel
      CHECK(rel_gap(bend, q * std::exp(0.5 * t)) < 1e-13);
      CHECK(rel_gap(apply_rho_shift(bend, h3, t, ShiftDirection::to_standard), q) < 1e-13);
    }
  }
}

TEST_CASE("bending the jacobian gives the constant function one", "[wrapping]") {
  Space h3 = build_space(SpaceKind::hyperbolic, 3);
  Space h2 = build_space(SpaceKind::hyperbolic, 2);
  for (double r : {0.1, 1.0, 3.0, 7.5}) {
    CHECK(wrap_noncompact(h3, [&](double x) { return j_eval(h3, x); }, r) ==
          Catch::Approx(1.0).epsilon(1e-15));
    CHECK(wrap_noncompact(h2, [&](double x) { return j_eval(h2, x); }, r) ==
          Catch::Approx(1.0).epsilon(1e-15));
  }
  // at the origin the bend degenerates to plain evaluation: j(0) = 1
  auto phi = [](double x) { return std::cos(x) + 2.0; };
  CHECK(wrap_noncompact(h3, phi, 0.0) == Catch::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("rho shift factors and round trip", "[wrapping]") {
  Space h3 = build_space(SpaceKind::hyperbolic, 3);
  Space s3 = build_space(SpaceKind::sphere, 3);
  Space s2 = build_space(SpaceKind::sphere, 2);
  Space s1 = build_space(SpaceKind::circle, 1);

  // noncompact: to_standard divides out the e^{+|rho|^2 t/2} excess
  CHECK(apply_rho_shift(1.0, h3, 1.0, ShiftDirection::to_standard) ==
        Catch::Approx(std::exp(-0.5)).epsilon(1e-15));
  // compact: to_standard boosts the wrapped value up to the kernel
  CHECK(apply_rho_shift(1.0, s3, 0.4, ShiftDirection::to_standard) ==
        Catch::Approx(std::exp(0.2)).epsilon(1e-15));
  CHECK(apply_rho_shift(1.0, s2, 1.0, ShiftDirection::to_standard) ==
        Catch::Approx(std::exp(0.125)).epsilon(1e-15));
  // the circle has rho = 0: the shift is the identity
  CHECK(apply_rho_shift(0.7314, s1, 2.0, ShiftDirection::to_standard) == 0.7314);
  CHECK(apply_rho_shift(0.7314, s1, 2.0, ShiftDirection::to_shifted) == 0.7314);

  for (const Space* sp : {&h3, &s3, &s2}) {
    double v = 0.3183;
    double round = apply_rho_shift(
        apply_rho_shift(v, *sp, 0.7, ShiftDirection::to_standard), *sp, 0.7,
        ShiftDirection::to_shifted);
    CHECK(round == Catch::Approx(v).epsilon(1e-15));
  }
  CHECK_THROWS_AS(apply_rho_shift(1.0, s3, 0.0, ShiftDirection::to_standard),
                  std::domain_error);
}

TEST_CASE("gridded inputs wrap like their analytic counterparts", "[wrapping]") {
  Space s3 = build_space(SpaceKind::sphere, 3);
  const double t = 0.5;
  auto flat = [t](double x) { return heat_kernel_flat(3, x, t); };

  WrapPolicy pol;
  pol.branch = WrapBranch::signed_j;
  pol.lattice_terms = 3;

  RadialFunction mu;
  mu.grid = linspace(0.0, 2.0 * kPi * 3 + kPi, 9001);
  mu.values.reserve(mu.grid.size());
  for (double x : mu.grid) mu.values.push_back(flat(x));

  for (double theta : {0.5, 1.5, 2.8}) {
    double a = wrap_compact(s3, mu, theta, pol);
    double b = wrap_compact(s3, flat, theta, pol);
    CHECK(rel_gap(a, b) < 1e-9);
  }

  // samples outside the tabulated range contribute nothing: with a table
  // covering only [0, 3.2] the k = 0 term is all that survives
  RadialFunction short_mu;
  short_mu.grid = linspace(0.0, 3.2, 1601);
  for (double x : short_mu.grid) short_mu.values.push_back(flat(x));
  double theta = 1.1;
  double single = flat(theta) / j_eval(s3, theta);
  CHECK(rel_gap(wrap_compact(s3, short_mu, theta, pol), single) < 1e-10);

  // weighted tables are not plain functions and must be rejected
  RadialFunction weighted = short_mu;
  weighted.weight = MeasureWeight::delta;
  CHECK_THROWS_AS(wrap_compact(s3, weighted, theta, pol), std::invalid_argument);
}

TEST_CASE("wrap argument validation", "[wrapping]") {
  Space s2 = build_space(SpaceKind::sphere, 2);
  Space h3 = build_space(SpaceKind::hyperbolic, 3);
  auto one = [](double) { return 1.0; };

  WrapPolicy bad;
  bad.lattice_terms = 0;
  CHECK_THROWS_AS(wrap_compact(s2, one, 1.0, bad), std::invalid_argument);
  CHECK_THROWS_AS(wrap_compact(s2, one, -0.2, WrapPolicy{}), std::domain_error);
  CHECK_THROWS_AS(wrap_compact(s2, one, kPi + 0.2, WrapPolicy{}), std::domain_error);
  CHECK_THROWS_AS(wrap_compact(h3, one, 1.0, WrapPolicy{}), std::invalid_argument);
  CHECK_THROWS_AS(wrap_noncompact(s2, one, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(wrap_noncompact(h3, one, -1.0), std::domain_error);

  // policy metadata defaults
  WrapPolicy def;
  CHECK(def.lattice_terms == 12);
  CHECK(def.branch == WrapBranch::abs_j);
  CHECK_FALSE(def.shift_applied);
}
