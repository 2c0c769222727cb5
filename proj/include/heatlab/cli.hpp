#pragma once

// Batch front end.  A RunRequest value captures one invocation: it is filled
// by the argument parser, validated field by field before dispatch, and
// round-trips through its textual form (to_args / parse_run_request give the
// identity on valid requests).  execute_request maps the request onto the
// compute modules and writes the fixed table schema of csvio.hpp; for a fixed
// request the output is byte-deterministic, Monte Carlo included (seeded
// counter streams, thread-count independent reductions).
//
// Exit-code contract used by the binary: 0 success, 2 invalid request (the
// thrown message names the offending field), 1 module error (message passed
// through verbatim); the suite command exits with its failure count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "heatlab/convolution.hpp"
#include "heatlab/csvio.hpp"
#include "heatlab/montecarlo.hpp"
#include "heatlab/orbit.hpp"
#include "heatlab/pde.hpp"
#include "heatlab/potential.hpp"
#include "heatlab/root_system.hpp"
#include "heatlab/spectral.hpp"
#include "heatlab/suite.hpp"
#include "heatlab/util.hpp"
#include "heatlab/wrapping.hpp"

namespace heatlab {

struct RunRequest {
  std::string command;           // kernel | potential | efunction | compare | mc | pde | suite
  std::string space = "sphere";  // kind token (with --dim) or preset name like S3, H2, SU2
  int dim = 2;
  std::string config_path;  // key=value space description; overrides --space/--dim
  double t = 1.0;
  double s = 0.0;  // second evaluation time for compare (0 means: use t)
  std::string grid = "0.1:3.0:64";
  std::string method = "spectral";
  std::string methods = "gaussian_wrap,spectral";  // compare pair
  std::string shift = "none";                      // none | to_standard | to_shifted
  std::string branch = "abs";                      // abs | signed | maslov
  std::string mode = "omega_star";                 // omega_star | zero
  std::string scheme = "fk";                       // fk | geodesic
  long long samples = 100000;
  long long steps = 200;
  std::uint64_t seed = 1;
  double dt = 2.5e-4;
  double upper = 0.0;  // solver domain edge; 0 selects the preset default
  int points = 2048;
  double r1 = 0.7;  // orbit radii for efunction
  double r2 = 1.1;
  std::string only = "all";  // suite selection: "all" or a comma list of indices
  std::string out = "-";
  std::string format = "csv";

  friend bool operator==(const RunRequest&, const RunRequest&) = default;
};

namespace cli_detail {

// Which option groups a subcommand exposes; to_args mirrors this table so a
// parsed request reproduces itself exactly from its textual form.
struct OptionSet {
  bool space = false;    // --space --dim --config
  bool time = false;     // --t
  bool second = false;   // --s
  bool grid = false;     // --grid
  bool method = false;   // --method
  bool methods = false;  // --methods
  bool wrap = false;     // --shift --branch
  bool mode = false;     // --mode
  bool sampler = false;  // --samples --steps --seed (+ --scheme when scheme=true)
  bool scheme = false;
  bool solver = false;  // --dt --points --upper
  bool orbit = false;   // --r1 --r2
  bool only = false;    // --only / --all
};

inline OptionSet options_for(const std::string& command) {
  OptionSet o;
  if (command == "kernel") {
    o.space = o.time = o.grid = o.method = o.wrap = o.mode = o.sampler = o.solver = true;
  } else if (command == "potential") {
    o.space = o.grid = o.method = true;
  } else if (command == "efunction") {
    o.space = o.grid = o.method = o.orbit = true;
  } else if (command == "compare") {
    o.space = o.time = o.second = o.grid = o.methods = o.wrap = o.mode = o.sampler = o.solver =
        true;
  } else if (command == "mc") {
    o.space = o.time = o.grid = o.mode = o.sampler = o.scheme = true;
  } else if (command == "pde") {
    o.space = o.time = o.mode = o.solver = true;
  } else if (command == "suite") {
    o.only = true;
  } else {
    throw std::invalid_argument(
        "command: expected one of kernel, potential, efunction, compare, mc, pde, suite");
  }
  return o;
}

inline void attach_options(CLI::App* sub, RunRequest& req, const OptionSet& o) {
  if (o.space) {
    sub->add_option("--space", req.space,
                    "kind token (circle|sphere|hyperbolic|su2|complex3|cp|hp, with --dim) "
                    "or a preset name such as S3, H2, SU2, CP2")
        ->capture_default_str();
    sub->add_option("--dim", req.dim, "dimension parameter for kind tokens")
        ->capture_default_str();
    sub->add_option("--config", req.config_path,
                    "key=value space description file; overrides --space/--dim");
  }
  if (o.time) sub->add_option("--t", req.t, "evaluation time")->capture_default_str();
  if (o.second)
    sub->add_option("--s", req.s, "second evaluation time for the right-hand series (0: use --t)")
        ->capture_default_str();
  if (o.grid)
    sub->add_option("--grid", req.grid, "radial grid start:stop:count")->capture_default_str();
  if (o.method) sub->add_option("--method", req.method, "evaluation method")->capture_default_str();
  if (o.methods)
    sub->add_option("--methods", req.methods, "two kernel methods, comma-separated")
        ->capture_default_str();
  if (o.wrap) {
    sub->add_option("--shift", req.shift, "scale shift: none|to_standard|to_shifted")
        ->capture_default_str();
    sub->add_option("--branch", req.branch, "lattice continuation: abs|signed|maslov")
        ->capture_default_str();
  }
  if (o.mode)
    sub->add_option("--mode", req.mode, "potential mode: omega_star|zero")->capture_default_str();
  if (o.sampler) {
    if (o.scheme)
      sub->add_option("--scheme", req.scheme, "sampling scheme: fk|geodesic")
          ->capture_default_str();
    sub->add_option("--samples", req.samples, "number of sample paths")->capture_default_str();
    sub->add_option("--steps", req.steps, "time steps per path")->capture_default_str();
    sub->add_option("--seed", req.seed, "random seed")->capture_default_str();
  }
  if (o.solver) {
    sub->add_option("--dt", req.dt, "solver time step")->capture_default_str();
    sub->add_option("--points", req.points, "solver grid points")->capture_default_str();
    sub->add_option("--upper", req.upper, "solver domain edge (0: preset default)")
        ->capture_default_str();
  }
  if (o.orbit) {
    sub->add_option("--r1", req.r1, "first orbit radius")->capture_default_str();
    sub->add_option("--r2", req.r2, "second orbit radius")->capture_default_str();
  }
  if (o.only) {
    sub->add_option("--only", req.only, "criteria to run: 'all' or e.g. 1,4,9")
        ->capture_default_str();
    sub->add_flag_callback(
        "--all", [&req]() { req.only = "all"; }, "run every criterion");
  }
  sub->add_option("--out", req.out, "output path, '-' for stdout")->capture_default_str();
  sub->add_option("--format", req.format, "output format: csv|json")->capture_default_str();
}

}  // namespace cli_detail

/** @brief Registers the seven subcommands on a CLI11 application, binding
 *  every option into the given request. */
inline void build_cli(CLI::App& app, RunRequest& req) {
  app.description("heat kernels on rank-one symmetric spaces, by four independent routes");
  app.require_subcommand(1);
  const struct {
    const char* name;
    const char* help;
  } subs[] = {
      {"kernel", "evaluate the heat kernel by one method on a radial grid"},
      {"potential", "tabulate the radial potential or its conjugation forms"},
      {"efunction", "tabulate the orbital e-function for fixed r1, r2"},
      {"compare", "evaluate two kernel methods and their pointwise/sup-norm deltas"},
      {"mc", "raw stochastic output: endpoint histograms and weighted densities"},
      {"pde", "raw grid-solver output on the staggered domain"},
      {"suite", "run the acceptance criteria and emit a JSON verdict"},
  };
  for (const auto& d : subs)
    cli_detail::attach_options(app.add_subcommand(d.name, d.help), req,
                               cli_detail::options_for(d.name));
}

/** @brief Canonical textual form of a request: exactly the options its
 *  subcommand exposes, doubles printed with full round-trip precision. */
inline std::vector<std::string> to_args(const RunRequest& req) {
  const auto o = cli_detail::options_for(req.command);
  std::vector<std::string> a{req.command};
  auto put = [&a](const char* flag, const std::string& v) {
    a.emplace_back(flag);
    a.push_back(v);
  };
  if (o.space) {
    put("--space", req.space);
    put("--dim", std::to_string(req.dim));
    if (!req.config_path.empty()) put("--config", req.config_path);
  }
  if (o.time) put("--t", format_double(req.t));
  if (o.second) put("--s", format_double(req.s));
  if (o.grid) put("--grid", req.grid);
  if (o.method) put("--method", req.method);
  if (o.methods) put("--methods", req.methods);
  if (o.wrap) {
    put("--shift", req.shift);
    put("--branch", req.branch);
  }
  if (o.mode) put("--mode", req.mode);
  if (o.sampler) {
    if (o.scheme) put("--scheme", req.scheme);
    put("--samples", std::to_string(req.samples));
    put("--steps", std::to_string(req.steps));
    put("--seed", std::to_string(req.seed));
  }
  if (o.solver) {
    put("--dt", format_double(req.dt));
    put("--points", std::to_string(req.points));
    put("--upper", format_double(req.upper));
  }
  if (o.orbit) {
    put("--r1", format_double(req.r1));
    put("--r2", format_double(req.r2));
  }
  if (o.only) put("--only", req.only);
  put("--out", req.out);
  put("--format", req.format);
  return a;
}

inline std::string request_line(const RunRequest& req) {
  std::string line;
  for (const auto& a : to_args(req)) {
    if (!line.empty()) line += ' ';
    line += a;
  }
  return line;
}

/** @brief Parses an argument vector (program name excluded, natural order)
 *  into a request.  CLI11 errors propagate as CLI::ParseError. */
inline RunRequest parse_run_request(const std::vector<std::string>& args) {
  RunRequest req;
  CLI::App app;
  build_cli(app, req);
  std::vector<std::string> reversed(args.rbegin(), args.rend());  // CLI11 consumes back-to-front
  app.parse(reversed);
  for (const CLI::App* sub : app.get_subcommands()) req.command = sub->get_name();
  return req;
}

namespace cli_detail {

inline WrapBranch parse_branch(const std::string& b) {
  if (b == "abs") return WrapBranch::abs_j;
  if (b == "signed") return WrapBranch::signed_j;
  if (b == "maslov") return WrapBranch::maslov;
  throw std::invalid_argument("branch: expected abs, signed, or maslov, got '" + b + "'");
}

inline PotentialMode parse_mode(const std::string& m) {
  if (m == "omega_star") return PotentialMode::omega_star;
  if (m == "zero") return PotentialMode::zero;
  throw std::invalid_argument("mode: expected omega_star or zero, got '" + m + "'");
}

inline void check_shift(const std::string& s) {
  if (s != "none" && s != "to_standard" && s != "to_shifted")
    throw std::invalid_argument("shift: expected none, to_standard, or to_shifted, got '" + s +
                                "'");
}

inline std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

inline std::vector<int> parse_only(const std::string& only) {
  if (only == "all") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<int> out;
  for (const auto& p : split_csv(only)) {
    std::size_t used = 0;
    int k = 0;
    try {
      k = std::stoi(p, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != p.size() || k < 1 || k > 10)
      throw std::invalid_argument(
          "only: expected 'all' or a comma-separated list of criterion indices in 1..10, got '" +
          only + "'");
    out.push_back(k);
  }
  return out;
}

inline const std::vector<std::string>& kernel_methods() {
  static const std::vector<std::string> m{"spectral", "closed_form", "gaussian_wrap",
                                          "flat",     "pde",         "mc"};
  return m;
}

inline bool contains(const std::vector<std::string>& xs, const std::string& x) {
  return std::find(xs.begin(), xs.end(), x) != xs.end();
}

}  // namespace cli_detail

/** @brief Field-by-field validation before dispatch; throws invalid_argument
 *  whose message names the offending field. */
inline void validate_request(const RunRequest& req) {
  using namespace cli_detail;
  const auto o = options_for(req.command);  // also rejects unknown commands
  if (req.format != "csv" && req.format != "json")
    throw std::invalid_argument("format: expected csv or json, got '" + req.format + "'");
  if (o.only) parse_only(req.only);
  if (o.space && req.config_path.empty() && req.dim < 1)
    throw std::invalid_argument("dim: must be >= 1");
  if (o.grid) {
    try {
      parse_grid_spec(req.grid);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(std::string("grid: ") + e.what());
    }
  }
  if (o.time && !(req.t > 0.0)) throw std::invalid_argument("t: must be positive");
  if (o.second && req.s < 0.0)
    throw std::invalid_argument("s: must be nonnegative (0 means: use --t)");
  if (o.method) {
    if (req.command == "kernel" && !contains(kernel_methods(), req.method))
      throw std::invalid_argument(
          "method: expected spectral, closed_form, gaussian_wrap, flat, pde, or mc, got '" +
          req.method + "'");
    if (req.command == "potential" && req.method != "omega_star" &&
        req.method != "conjugation_tangent" && req.method != "conjugation_manifold")
      throw std::invalid_argument(
          "method: expected omega_star, conjugation_tangent, or conjugation_manifold, got '" +
          req.method + "'");
    if (req.command == "efunction" && req.method != "closed_form" && req.method != "convolution")
      throw std::invalid_argument("method: expected closed_form or convolution, got '" +
                                  req.method + "'");
  }
  if (o.methods) {
    auto pair = split_csv(req.methods);
    if (pair.size() != 2 || pair[0].empty() || pair[1].empty() || !contains(kernel_methods(), pair[0]) ||
        !contains(kernel_methods(), pair[1]))
      throw std::invalid_argument(
          "methods: expected exactly two comma-separated kernel methods, got '" + req.methods +
          "'");
  }
  if (o.wrap) {
    check_shift(req.shift);
    parse_branch(req.branch);
  }
  if (o.mode) parse_mode(req.mode);
  if (o.scheme && req.scheme != "fk" && req.scheme != "geodesic")
    throw std::invalid_argument("scheme: expected fk or geodesic, got '" + req.scheme + "'");
  if (o.sampler) {
    if (req.samples < 1) throw std::invalid_argument("samples: must be >= 1");
    if (req.steps < 1) throw std::invalid_argument("steps: must be >= 1");
  }
  if (o.solver) {
    if (!(req.dt > 0.0)) throw std::invalid_argument("dt: must be positive");
    if (req.points < 8) throw std::invalid_argument("points: must be >= 8");
    if (req.upper < 0.0)
      throw std::invalid_argument("upper: must be >= 0 (0 selects the preset default)");
    const bool pde_route = req.command == "pde" ||
                           (req.command == "kernel" && req.method == "pde") ||
                           (req.command == "compare" && req.methods.find("pde") != std::string::npos);
    if (pde_route && !(req.t > 1e-3))
      throw std::invalid_argument("t: the grid solver needs t > 0.001 (its mollification time)");
  }
  if (o.orbit) {
    if (!(req.r1 > 0.0)) throw std::invalid_argument("r1: must be positive");
    if (!(req.r2 > 0.0)) throw std::invalid_argument("r2: must be positive");
  }
}

/** @brief Builds the space from --config (key=value file) or from the
 *  --space/--dim selectors. */
inline Space resolve_space(const RunRequest& req) {
  if (!req.config_path.empty()) {
    std::ifstream in(req.config_path);
    if (!in) throw std::invalid_argument("config: cannot open '" + req.config_path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_space_config(ss.str());
  }
  const std::string& tok = req.space;
  if (tok == "circle") return build_space(SpaceKind::circle, 1);
  if (tok == "sphere") return build_space(SpaceKind::sphere, req.dim);
  if (tok == "hyperbolic") return build_space(SpaceKind::hyperbolic, req.dim);
  if (tok == "su2") return build_space(SpaceKind::compact_group_su2, 3);
  if (tok == "complex3" || tok == "complex") return build_space(SpaceKind::complex_group_rank1, 3);
  if (tok == "cp") return build_space(SpaceKind::projective_cp, req.dim);
  if (tok == "hp") return build_space(SpaceKind::projective_hp, req.dim);
  return build_space_by_name(tok);
}

namespace cli_detail {

// One evaluated series: per-point value/error/extra plus method metadata.
struct MethodSeries {
  std::vector<double> coordinate, value, err;
  std::vector<std::string> extra;
  nlohmann::json meta = nlohmann::json::object();
  double time = 0.0;
};

inline double bin_center(double r, double width) {
  return (std::floor(r / width) + 0.5) * width;
}

/** @brief Evaluates one kernel method on a radial grid at time t. */
inline MethodSeries eval_kernel_method(const Space& sp, const RunRequest& req,
                                       const std::string& method, double t,
                                       const std::vector<double>& grid) {
  MethodSeries out;
  out.time = t;
  out.coordinate = grid;
  const std::size_t n = grid.size();
  out.value.resize(n);
  out.err.assign(n, 0.0);
  out.extra.assign(n, "");
  if (method == "spectral") {
    if (!(sp.kind == SpaceKind::circle || sp.kind == SpaceKind::sphere) || sp.dim > 3)
      throw std::invalid_argument(
          "method spectral: needs the circle or a sphere of dimension <= 3");
    int max_terms = 0;
    for (std::size_t i = 0; i < n; ++i) {
      auto [v, trunc] = heat_kernel_sphere(sp.dim, grid[i], t);
      out.value[i] = v;
      out.err[i] = trunc.tail_bound;
      out.extra[i] = "tail_bound=" + format_double(trunc.tail_bound);
      max_terms = std::max(max_terms, trunc.max_index);
    }
    out.meta["spectral_max_index"] = max_terms;
  } else if (method == "closed_form") {
    for (std::size_t i = 0; i < n; ++i) out.value[i] = heat_kernel_complex_group(sp, grid[i], t);
  } else if (method == "flat") {
    for (std::size_t i = 0; i < n; ++i) out.value[i] = heat_kernel_flat(sp.dim, grid[i], t);
  } else if (method == "gaussian_wrap") {
    check_shift(req.shift);
    auto flat = [&](double r) { return heat_kernel_flat(sp.dim, r, t); };
    const bool compact = sp.curvature_sign > 0;
    WrapPolicy pol;
    pol.branch = parse_branch(req.branch);
    for (std::size_t i = 0; i < n; ++i) {
      double v = compact ? wrap_compact(sp, flat, grid[i], pol) : wrap_noncompact(sp, flat, grid[i]);
      if (req.shift != "none")
        v = apply_rho_shift(v, sp, t,
                            req.shift == "to_standard" ? ShiftDirection::to_standard
                                                       : ShiftDirection::to_shifted);
      out.value[i] = v;
      out.extra[i] = compact ? ("branch=" + req.branch + ";shift=" + req.shift)
                             : ("shift=" + req.shift);
    }
    out.meta["lattice_terms"] = pol.lattice_terms;
    out.meta["branch"] = req.branch;
    out.meta["shift"] = req.shift;
  } else if (method == "pde") {
    const bool compact = sp.curvature_sign > 0;
    const double edge = req.upper > 0.0
                            ? req.upper
                            : (compact ? sp.fundamental_radius - 0.05
                                       : std::max(4.0, grid.back() + 1.0));
    auto sgrid = suite_detail::staggered(edge, req.points);
    // The solver starts from a mollified point mass at its internal time t0,
    // so integrating to t - t0 lands the solution exactly at the requested t.
    auto sol = solve_perturbed_heat(sp, t - 1e-3, sgrid, req.dt, parse_mode(req.mode));
    WrapPolicy pol;  // the potential already carries the scale term: no shift here
    for (std::size_t i = 0; i < n; ++i)
      out.value[i] =
          compact ? wrap_compact(sp, sol.u, grid[i], pol) : wrap_noncompact(sp, sol.u, grid[i]);
    out.meta["boundary_loss"] = sol.boundary_loss;
    out.meta["mollification_time"] = sol.mollification_time;
    out.meta["solver_dt"] = req.dt;
    out.meta["solver_points"] = req.points;
    out.meta["solver_upper"] = edge;
  } else if (method == "mc") {
    WalkConfig cfg;
    cfg.step_count = req.steps;
    cfg.sample_count = req.samples;
    cfg.t = t;
    cfg.seed = req.seed;
    cfg.scheme = WalkScheme::flat_walk_fk;
    auto est = flat_walk_feynman_kac(sp, cfg, grid, parse_mode(req.mode));
    for (std::size_t i = 0; i < n; ++i) {
      if (est.density[i] == 0.0 && est.std_error[i] == 0.0) continue;  // probe outside the bins
      const double c = bin_center(grid[i], est.bin_width);
      const double jc = j_eval(sp, c);
      out.value[i] = est.density[i] / jc;
      out.err[i] = est.std_error[i] / jc;
      out.extra[i] = "killed_mass=" + format_double(est.killed_mass);
    }
    out.meta["bin_width"] = est.bin_width;
    out.meta["mass"] = est.mass;
    out.meta["killed_mass"] = est.killed_mass;
    out.meta["escape_estimate"] = est.escape_estimate;
    out.meta["effective_samples"] = est.effective_samples;
    out.meta["seed"] = req.seed;
    out.meta["note"] = "histogram values are bin-constant; each is the kernel at its bin center";
  } else {
    throw std::invalid_argument("method: unknown kernel method '" + method + "'");
  }
  return out;
}

inline void append_series_rows(std::vector<CsvRow>& rows, const Space& sp,
                               const std::string& method, const MethodSeries& s) {
  for (std::size_t i = 0; i < s.coordinate.size(); ++i) {
    CsvRow r;
    r.space = sp.name;
    r.n = sp.dim;
    r.t = s.time;
    r.coordinate = s.coordinate[i];
    r.method = method;
    r.value = s.value[i];
    r.err_est = s.err[i];
    r.extra = s.extra[i];
    rows.push_back(std::move(r));
  }
}

// Freedman–Diaconis histogram of geodesic endpoint distances, normalized
// against the radial area measure area(S^{n-1}) * delta(r) dr.
inline MethodSeries geodesic_histogram(const Space& sp, const std::vector<double>& dist,
                                       double t) {
  MethodSeries out;
  out.time = t;
  std::vector<double> sorted(dist);
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();
  auto quantile = [&](double q) {
    double pos = q * static_cast<double>(m - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    std::size_t hi = std::min(lo + 1, m - 1);
    double w = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - w) + sorted[hi] * w;
  };
  const double range = sp.curvature_sign > 0 ? sp.fundamental_radius
                                             : sorted.back() * (1.0 + 1e-9) + 1e-12;
  double width = 2.0 * (quantile(0.75) - quantile(0.25)) / std::cbrt(static_cast<double>(m));
  if (!(width > 0.0)) width = range / 64.0;
  const int nb = std::max(8, static_cast<int>(std::ceil(range / width)));
  width = range / nb;
  std::vector<double> count(static_cast<std::size_t>(nb), 0.0);
  double msd = 0.0;
  for (double r : dist) {
    msd += r * r;
    int b = static_cast<int>(r / width);
    if (b >= 0 && b < nb) count[static_cast<std::size_t>(b)] += 1.0;
  }
  msd /= static_cast<double>(m);
  const double area = detail::unit_sphere_area(sp.dim);
  for (int b = 0; b < nb; ++b) {
    const double lo = b * width, hi = (b + 1) * width;
    const double mu =
        area * integrate_gl96([&](double r) { return density_eval(sp, r, MeasureWeight::delta); },
                              lo, hi, 1);
    const double p = count[static_cast<std::size_t>(b)] / static_cast<double>(m);
    out.coordinate.push_back(0.5 * (lo + hi));
    out.value.push_back(p / mu);
    out.err.push_back(std::sqrt(std::max(0.0, p * (1.0 - p) / static_cast<double>(m))) / mu);
    out.extra.push_back("count=" + format_double(count[static_cast<std::size_t>(b)]));
  }
  out.meta["bins"] = nb;
  out.meta["bin_width"] = width;
  out.meta["mean_square_displacement"] = msd;
  return out;
}

}  // namespace cli_detail

/** @brief Executes a validated request, writing the table to `out`; the suite
 *  command also prints one PASS/FAIL line per criterion to `progress`.
 *  Returns 0, or the number of failed criteria for the suite command. */
inline int execute_request(const RunRequest& req, std::ostream& out,
                           std::ostream& progress = std::cout) {
  using namespace cli_detail;
  validate_request(req);
  nlohmann::json meta;
  meta["command"] = req.command;
  meta["request"] = request_line(req);

  if (req.command == "suite") {
    auto results = run_criteria(parse_only(req.only));
    int failures = 0;
    nlohmann::json list = nlohmann::json::array();
    for (const auto& r : results) {
      if (!r.pass) ++failures;
      char line[512];
      std::snprintf(line, sizeof line, "%s  criterion %2d  %-26s  %s", r.pass ? "PASS" : "FAIL",
                    r.index, r.name.c_str(), r.detail.c_str());
      progress << line << '\n';
      list.push_back({{"index", r.index}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    }
    nlohmann::json verdict{{"command", "suite"},
                           {"request", request_line(req)},
                           {"criteria", list},
                           {"failures", failures},
                           {"all_pass", failures == 0}};
    out << verdict.dump(2) << '\n';
    return failures;
  }

  const Space sp = resolve_space(req);
  meta["space"] = sp.name;
  meta["dim"] = sp.dim;
  std::vector<CsvRow> rows;

  if (req.command == "kernel") {
    const auto grid = to_vector(parse_grid_spec(req.grid));
    auto series = eval_kernel_method(sp, req, req.method, req.t, grid);
    meta.update(series.meta);
    append_series_rows(rows, sp, req.method, series);
  } else if (req.command == "compare") {
    const auto grid = to_vector(parse_grid_spec(req.grid));
    const auto pair = split_csv(req.methods);
    const double tb = req.s > 0.0 ? req.s : req.t;
    auto a = eval_kernel_method(sp, req, pair[0], req.t, grid);
    auto b = eval_kernel_method(sp, req, pair[1], tb, grid);
    double sup_abs = 0.0, peak = 0.0;
    MethodSeries delta;
    delta.time = req.t;
    delta.coordinate = grid;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double d = a.value[i] - b.value[i];
      sup_abs = std::max(sup_abs, std::abs(d));
      peak = std::max({peak, std::abs(a.value[i]), std::abs(b.value[i])});
      delta.value.push_back(d);
      delta.err.push_back(std::hypot(a.err[i], b.err[i]));
      delta.extra.emplace_back();
    }
    meta[pair[0] == pair[1] ? pair[0] + "_a" : pair[0]] = a.meta;
    meta[pair[0] == pair[1] ? pair[1] + "_b" : pair[1]] = b.meta;
    meta["sup_abs_delta"] = sup_abs;
    meta["sup_rel_delta"] = peak > 0.0 ? sup_abs / peak : 0.0;
    append_series_rows(rows, sp, pair[0], a);
    append_series_rows(rows, sp, pair[1], b);
    append_series_rows(rows, sp, "delta", delta);
  } else if (req.command == "potential") {
    const auto grid = to_vector(parse_grid_spec(req.grid));
    for (double r : grid) {
      CsvRow row;
      row.space = sp.name;
      row.n = sp.dim;
      row.t = 0.0;
      row.coordinate = r;
      row.method = req.method;
      if (req.method == "omega_star") {
        auto pv = omega_star(sp, r);
        row.value = pv.value;
        row.extra = pv.regime == PotentialValue::Regime::generic ? "regime=generic"
                    : pv.regime == PotentialValue::Regime::series_near_zero
                        ? "regime=series_near_zero"
                        : "regime=series_near_wall";
      } else {
        const auto side = req.method == "conjugation_tangent" ? OperatorSide::tangent
                                                              : OperatorSide::manifold;
        row.value = conjugation_potential(sp, side, r);
      }
      rows.push_back(std::move(row));
    }
  } else if (req.command == "efunction") {
    const auto grid = to_vector(parse_grid_spec(req.grid));
    meta["r1"] = req.r1;
    meta["r2"] = req.r2;
    for (double r : grid) {
      OrbitTriple tri{req.r1, req.r2, r};
      CsvRow row;
      row.space = sp.name;
      row.n = sp.dim;
      row.t = 0.0;
      row.coordinate = r;
      row.method = req.method;
      row.value = req.method == "closed_form" ? e_closed_form(sp, tri) : e_convolution(sp, tri);
      rows.push_back(std::move(row));
    }
  } else if (req.command == "mc") {
    WalkConfig cfg;
    cfg.step_count = req.steps;
    cfg.sample_count = req.samples;
    cfg.t = req.t;
    cfg.seed = req.seed;
    if (req.scheme == "geodesic") {
      cfg.scheme = WalkScheme::geodesic_walk;
      auto series = geodesic_histogram(sp, geodesic_walk(sp, cfg), req.t);
      meta.update(series.meta);
      meta["samples"] = req.samples;
      meta["steps"] = req.steps;
      meta["seed"] = req.seed;
      append_series_rows(rows, sp, "geodesic", series);
    } else {
      cfg.scheme = WalkScheme::flat_walk_fk;
      const auto grid = to_vector(parse_grid_spec(req.grid));
      auto est = flat_walk_feynman_kac(sp, cfg, grid, parse_mode(req.mode));
      meta["bin_width"] = est.bin_width;
      meta["mass"] = est.mass;
      meta["killed_mass"] = est.killed_mass;
      meta["escape_estimate"] = est.escape_estimate;
      meta["effective_samples"] = est.effective_samples;
      meta["weight_min"] = est.weight_min;
      meta["weight_max"] = est.weight_max;
      meta["omega_min"] = est.omega_min;
      meta["omega_max"] = est.omega_max;
      meta["samples"] = req.samples;
      meta["steps"] = req.steps;
      meta["seed"] = req.seed;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        CsvRow row;
        row.space = sp.name;
        row.n = sp.dim;
        row.t = req.t;
        row.coordinate = grid[i];
        row.method = "fk";
        row.value = est.density[i];
        row.err_est = est.std_error[i];
        row.extra = "killed_mass=" + format_double(est.killed_mass);
        rows.push_back(std::move(row));
      }
    }
  } else if (req.command == "pde") {
    const bool compact = sp.curvature_sign > 0;
    const double edge = req.upper > 0.0 ? req.upper
                                        : (compact ? sp.fundamental_radius - 0.05 : 4.0);
    auto sgrid = suite_detail::staggered(edge, req.points);
    auto sol = solve_perturbed_heat(sp, req.t - 1e-3, sgrid, req.dt, parse_mode(req.mode));
    meta["boundary_loss"] = sol.boundary_loss;
    meta["mollification_time"] = sol.mollification_time;
    meta["solver_dt"] = req.dt;
    meta["solver_points"] = req.points;
    meta["solver_upper"] = edge;
    for (std::size_t i = 0; i < sgrid.size(); ++i) {
      CsvRow row;
      row.space = sp.name;
      row.n = sp.dim;
      row.t = req.t;
      row.coordinate = sgrid[i];
      row.method = "pde";
      row.value = sol.u.values[i];
      rows.push_back(std::move(row));
    }
  }

  if (req.format == "csv")
    write_rows_csv(out, meta, rows);
  else
    write_rows_json(out, meta, rows);
  return 0;
}

}  // namespace heatlab
