#pragma once

// Restricted root data for the rank-one model spaces, together with the
// radial quantities built from it: the Jacobian factor j, the volume
// densities delta and delta0, and the half-sum rho.

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "heatlab/scalar_series.hpp"

namespace heatlab {

enum class SpaceKind {
  circle,
  sphere,
  hyperbolic,
  compact_group_su2,
  complex_group_rank1,
  projective_cp,
  projective_hp,
  custom_compact,
  custom_noncompact,
};

struct Root {
  std::vector<double> coeffs;  // coordinates in the Cartan subspace
  int multiplicity = 0;
};

struct RestrictedRootSystem {
  int rank = 1;
  std::vector<Root> roots;   // positive roots only
  std::vector<double> gram;  // rank x rank, row major
};

// <a, b> with respect to the Gram matrix.
inline double pairing(const RestrictedRootSystem& rs, const std::vector<double>& a,
                      const std::vector<double>& b) {
  if (static_cast<int>(a.size()) != rs.rank || static_cast<int>(b.size()) != rs.rank)
    throw std::invalid_argument("pairing: vector size does not match rank");
  double out = 0.0;
  for (int i = 0; i < rs.rank; ++i)
    for (int k = 0; k < rs.rank; ++k) out += a[i] * rs.gram[i * rs.rank + k] * b[k];
  return out;
}

// alpha(H): the root acts on the Cartan vector through the Gram pairing.
inline double root_value(const RestrictedRootSystem& rs, const Root& alpha,
                         const std::vector<double>& H) {
  return pairing(rs, alpha.coeffs, H);
}

struct Space {
  SpaceKind kind = SpaceKind::sphere;
  int dim = 2;             // manifold dimension n
  int curvature_sign = 1;  // +1 compact model, -1 noncompact model
  RestrictedRootSystem roots;
  bool half_angle_fields = false;  // sin/sinh arguments carry a factor 1/2
  double angle_scale = 1.0;
  double fundamental_radius = 0.0;  // first singular radius (inf if none)
  std::string name;
};

namespace detail {

inline double ipow(double base, int n) {
  double out = 1.0;
  for (int i = 0; i < n; ++i) out *= base;
  return out;
}

inline RestrictedRootSystem rank_one_roots(std::vector<std::pair<double, int>> data) {
  RestrictedRootSystem rs;
  rs.rank = 1;
  rs.gram = {1.0};
  for (auto& [c, m] : data) rs.roots.push_back(Root{{c}, m});
  return rs;
}

inline double compact_fundamental_radius(const Space& s) {
  double cmax = 0.0;
  for (const auto& r : s.roots.roots) cmax = std::max(cmax, std::abs(r.coeffs[0]));
  if (cmax == 0.0) return 3.14159265358979323846;  // flat circle: one period cell
  return 3.14159265358979323846 / (s.angle_scale * cmax);
}

}  // namespace detail

/** @brief Construct one of the built-in rank-one model spaces.
 *
 * For sphere/hyperbolic, n is the manifold dimension; for the projective
 * families it is the projective index (CP^n has dim 2n, HP^n has dim 4n).
 */
inline Space build_space(SpaceKind kind, int n) {
  Space s;
  s.kind = kind;
  switch (kind) {
    case SpaceKind::circle:
      if (n != 1) throw std::invalid_argument("circle preset requires n = 1");
      s.dim = 1;
      s.curvature_sign = 1;
      s.roots.rank = 1;
      s.roots.gram = {1.0};
      s.name = "S1";
      break;
    case SpaceKind::sphere:
      if (n < 2) throw std::invalid_argument("sphere preset requires n >= 2");
      s.dim = n;
      s.curvature_sign = 1;
      s.roots = detail::rank_one_roots({{1.0, n - 1}});
      s.name = "S" + std::to_string(n);
      break;
    case SpaceKind::hyperbolic:
      if (n < 2) throw std::invalid_argument("hyperbolic preset requires n >= 2");
      s.dim = n;
      s.curvature_sign = -1;
      s.roots = detail::rank_one_roots({{1.0, n - 1}});
      s.name = "H" + std::to_string(n);
      break;
    case SpaceKind::compact_group_su2:
      if (n != 3) throw std::invalid_argument("SU(2) preset has dimension 3");
      s.dim = 3;
      s.curvature_sign = 1;
      s.roots = detail::rank_one_roots({{1.0, 2}});
      s.name = "SU2";
      break;
    case SpaceKind::complex_group_rank1:
      // rank-one complex group: one root of multiplicity two, and all
      // trigonometric fields evaluated at half the root argument.
      if (n != 3) throw std::invalid_argument("complex rank-one preset has dimension 3");
      s.dim = 3;
      s.curvature_sign = -1;
      s.roots = detail::rank_one_roots({{1.0, 2}});
      s.half_angle_fields = true;
      s.angle_scale = 0.5;
      s.name = "complex3";
      break;
    case SpaceKind::projective_cp:
      if (n < 2) throw std::invalid_argument("CP^n preset requires n >= 2");
      s.dim = 2 * n;
      s.curvature_sign = 1;
      s.roots = detail::rank_one_roots({{1.0, 2 * n - 2}, {2.0, 1}});
      s.name = "CP" + std::to_string(n);
      break;
    case SpaceKind::projective_hp:
      if (n < 2) throw std::invalid_argument("HP^n preset requires n >= 2");
      s.dim = 4 * n;
      s.curvature_sign = 1;
      s.roots = detail::rank_one_roots({{1.0, 4 * n - 4}, {2.0, 3}});
      s.name = "HP" + std::to_string(n);
      break;
    default:
      throw std::invalid_argument("build_space: custom kinds need parse_space_config");
  }
  s.fundamental_radius = (s.curvature_sign > 0) ? detail::compact_fundamental_radius(s)
                                                : std::numeric_limits<double>::infinity();
  return s;
}

/** @brief Resolve a preset by its short name (S1, S2, ..., H2, ..., SU2, CP2, HP2, complex3). */
inline Space build_space_by_name(const std::string& name) {
  auto tail_int = [&](std::size_t off) {
    int v = 0;
    std::istringstream is(name.substr(off));
    if (!(is >> v) || !is.eof()) throw std::invalid_argument("unknown space name: " + name);
    return v;
  };
  if (name == "circle" || name == "S1") return build_space(SpaceKind::circle, 1);
  if (name == "SU2") return build_space(SpaceKind::compact_group_su2, 3);
  if (name == "complex3") return build_space(SpaceKind::complex_group_rank1, 3);
  if (name.size() >= 2 && name[0] == 'S') return build_space(SpaceKind::sphere, tail_int(1));
  if (name.size() >= 2 && name[0] == 'H' && name[1] != 'P')
    return build_space(SpaceKind::hyperbolic, tail_int(1));
  if (name.rfind("CP", 0) == 0) return build_space(SpaceKind::projective_cp, tail_int(2));
  if (name.rfind("HP", 0) == 0) return build_space(SpaceKind::projective_hp, tail_int(2));
  throw std::invalid_argument("unknown space name: " + name);
}

// squared norm of rho = (1/2) sum_alpha m_alpha alpha
inline double rho_norm_sq(const Space& s) {
  if (s.roots.roots.empty()) return 0.0;
  std::vector<double> rho(s.roots.rank, 0.0);
  for (const auto& a : s.roots.roots)
    for (int i = 0; i < s.roots.rank; ++i) rho[i] += 0.5 * a.multiplicity * a.coeffs[i];
  return pairing(s.roots, rho, rho);
}

/** @brief j(H) = prod over positive roots of (sin a / a)^(m/2), with sinh in the
 *  noncompact model.  Principal branch: an odd multiplicity demands a
 *  nonnegative radicand and throws std::domain_error otherwise. */
inline double j_eval(const Space& s, double r) {
  if (s.roots.rank != 1) throw std::invalid_argument("j_eval: rank-one spaces only");
  double out = 1.0;
  for (const auto& a : s.roots.roots) {
    double arg = s.angle_scale * a.coeffs[0] * r;
    double factor = (s.curvature_sign > 0) ? sinc(arg) : sinhc(arg);
    if (a.multiplicity % 2 == 0) {
      out *= detail::ipow(factor, a.multiplicity / 2);
    } else {
      if (factor < 0.0)
        throw std::domain_error("j_eval: negative radicand under an odd multiplicity");
      out *= std::pow(factor, 0.5 * a.multiplicity);
    }
  }
  return out;
}

enum class MeasureWeight { none, delta0, delta };

/** @brief Radial density: delta = prod sin^m (sinh^m), delta0 = prod a^m, or 1. */
inline double density_eval(const Space& s, double r, MeasureWeight w) {
  if (w == MeasureWeight::none) return 1.0;
  if (s.roots.rank != 1) throw std::invalid_argument("density_eval: rank-one spaces only");
  double out = 1.0;
  for (const auto& a : s.roots.roots) {
    double arg = s.angle_scale * a.coeffs[0] * r;
    double factor;
    if (w == MeasureWeight::delta0)
      factor = arg;
    else
      factor = (s.curvature_sign > 0) ? std::sin(arg) : std::sinh(arg);
    out *= detail::ipow(factor, a.multiplicity);
  }
  return out;
}

struct RadialFunction {
  std::vector<double> grid;
  std::vector<double> values;
  MeasureWeight weight = MeasureWeight::none;  // measure the values are taken against
};

inline void validate(const RadialFunction& f) {
  if (f.grid.size() != f.values.size())
    throw std::invalid_argument("RadialFunction: grid/value size mismatch");
  if (f.grid.size() < 3) throw std::invalid_argument("RadialFunction: need at least 3 samples");
  for (std::size_t i = 1; i < f.grid.size(); ++i)
    if (!(f.grid[i] > f.grid[i - 1]))
      throw std::invalid_argument("RadialFunction: grid must increase strictly");
}

/** @brief Parse a key = value space description.
 *
 * Recognized keys: kind (preset kind or custom_compact/custom_noncompact),
 * dim, roots ("c1,...:m" entries separated by ';'), gram (row major),
 * half_angle (0/1), name.  Presets only need kind and dim.
 */
inline Space parse_space_config(const std::string& text) {
  auto trim = [](std::string v) {
    const char* ws = " \t\r";
    auto b = v.find_first_not_of(ws);
    auto e = v.find_last_not_of(ws);
    return (b == std::string::npos) ? std::string() : v.substr(b, e - b + 1);
  };
  std::string kind, name;
  std::string roots_text, gram_text;
  int dim = -1;
  bool half_angle = false;

  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("space config: expected key = value, got: " + line);
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key == "kind")
      kind = val;
    else if (key == "dim")
      dim = std::stoi(val);
    else if (key == "roots")
      roots_text = val;
    else if (key == "gram")
      gram_text = val;
    else if (key == "half_angle")
      half_angle = (val == "1" || val == "true");
    else if (key == "name")
      name = val;
    else
      throw std::invalid_argument("space config: unknown key: " + key);
  }
  if (kind.empty()) throw std::invalid_argument("space config: missing kind");

  if (kind != "custom_compact" && kind != "custom_noncompact") {
    if (dim < 1) throw std::invalid_argument("space config: preset kinds need dim");
    SpaceKind k;
    if (kind == "circle")
      k = SpaceKind::circle;
    else if (kind == "sphere")
      k = SpaceKind::sphere;
    else if (kind == "hyperbolic")
      k = SpaceKind::hyperbolic;
    else if (kind == "su2")
      k = SpaceKind::compact_group_su2;
    else if (kind == "complex")
      k = SpaceKind::complex_group_rank1;
    else if (kind == "cp")
      k = SpaceKind::projective_cp;
    else if (kind == "hp")
      k = SpaceKind::projective_hp;
    else
      throw std::invalid_argument("space config: unknown kind: " + kind);
    Space s = build_space(k, dim);
    if (!name.empty()) s.name = name;
    return s;
  }

  // custom kind: explicit root data
  if (dim < 1 || roots_text.empty())
    throw std::invalid_argument("space config: custom kinds need dim and roots");
  Space s;
  s.kind = (kind == "custom_compact") ? SpaceKind::custom_compact : SpaceKind::custom_noncompact;
  s.curvature_sign = (kind == "custom_compact") ? 1 : -1;
  s.dim = dim;
  s.half_angle_fields = half_angle;
  s.angle_scale = half_angle ? 0.5 : 1.0;
  s.name = name.empty() ? kind : name;

  std::istringstream rts(roots_text);
  std::string entry;
  int rank = -1;
  while (std::getline(rts, entry, ';')) {
    entry = trim(entry);
    if (entry.empty()) continue;
    auto colon = entry.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("space config: root entry needs coeffs:multiplicity");
    Root rt;
    std::istringstream cs(entry.substr(0, colon));
    std::string c;
    while (std::getline(cs, c, ',')) rt.coeffs.push_back(std::stod(trim(c)));
    rt.multiplicity = std::stoi(trim(entry.substr(colon + 1)));
    if (rank < 0) rank = static_cast<int>(rt.coeffs.size());
    if (static_cast<int>(rt.coeffs.size()) != rank)
      throw std::invalid_argument("space config: inconsistent root coordinate counts");
    s.roots.roots.push_back(std::move(rt));
  }
  if (s.roots.roots.empty()) throw std::invalid_argument("space config: no roots parsed");
  s.roots.rank = rank;

  if (gram_text.empty()) {
    s.roots.gram.assign(static_cast<std::size_t>(rank) * rank, 0.0);
    for (int i = 0; i < rank; ++i) s.roots.gram[i * rank + i] = 1.0;
  } else {
    std::istringstream gs(gram_text);
    std::string g;
    while (std::getline(gs, g, ',')) s.roots.gram.push_back(std::stod(trim(g)));
    if (static_cast<int>(s.roots.gram.size()) != rank * rank)
      throw std::invalid_argument("space config: gram must have rank^2 entries");
  }

  s.fundamental_radius = (s.curvature_sign > 0) ? detail::compact_fundamental_radius(s)
                                                : std::numeric_limits<double>::infinity();
  return s;
}

}  // namespace heatlab
