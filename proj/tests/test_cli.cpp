// Front-end tests: request round-trip, field-named validation, dispatch
// correctness against the modules, and the installed binary's exit-code and
// byte-determinism contract (driven through HEATLAB_CLI_PATH).

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

#include "heatlab/cli.hpp"

using namespace heatlab;
using Catch::Matchers::ContainsSubstring;

namespace {

struct RunResult {
  int code = -1;
  std::string output;  // stdout + stderr interleaved
};

RunResult run_cli(const std::string& args) {
  RunResult res;
  const std::string cmd = std::string(HEATLAB_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  while (std::size_t got = std::fread(buf, 1, sizeof buf, pipe)) res.output.append(buf, got);
  int status = pclose(pipe);
  res.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Splits CSV output into '#' metadata (parsed as JSON objects merged in
// order), the header line, and data rows.
struct CsvDoc {
  nlohmann::json meta = nlohmann::json::object();
  std::string header;
  std::vector<std::vector<std::string>> rows;
};

CsvDoc parse_csv(const std::string& text) {
  CsvDoc doc;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      doc.meta.update(nlohmann::json::parse(line.substr(1)));
      continue;
    }
    if (doc.header.empty()) {
      doc.header = line;
      continue;
    }
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        fields.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    fields.push_back(cur);
    doc.rows.push_back(std::move(fields));
  }
  return doc;
}

}  // namespace

TEST_CASE("a parsed request round-trips through its textual form", "[cli]") {
  std::vector<RunRequest> cases;
  {
    RunRequest r;
    r.command = "kernel";
    r.space = "sphere";
    r.dim = 3;
    r.t = 0.5;
    r.grid = "0.05:3.1:128";
    r.method = "spectral";
    cases.push_back(r);
  }
  {
    RunRequest r;
    r.command = "compare";
    r.space = "S2";
    r.t = 1.0;
    r.s = 1.25;
    r.methods = "gaussian_wrap,spectral";
    r.shift = "to_standard";
    r.branch = "maslov";
    r.out = "/tmp/x.csv";
    r.format = "json";
    cases.push_back(r);
  }
  {
    RunRequest r;
    r.command = "mc";
    r.space = "su2";
    r.scheme = "fk";
    r.samples = 12345;
    r.steps = 77;
    r.seed = 99;
    r.t = 0.3;
    r.grid = "0.2:2.0:16";
    cases.push_back(r);
  }
  {
    RunRequest r;
    r.command = "efunction";
    r.space = "H3";
    r.r1 = 0.9;
    r.r2 = 1.3;
    r.method = "convolution";
    cases.push_back(r);
  }
  {
    RunRequest r;
    r.command = "pde";
    r.space = "sphere";
    r.dim = 2;
    r.t = 0.25;
    r.dt = 1.25e-4;
    r.points = 512;
    r.upper = 3.0;
    r.mode = "zero";
    cases.push_back(r);
  }
  {
    RunRequest r;
    r.command = "suite";
    r.only = "1,3,9";
    r.out = "verdict.json";
    cases.push_back(r);
  }
  for (const auto& r : cases) {
    CAPTURE(r.command);
    RunRequest back = parse_run_request(to_args(r));
    CHECK(back == r);
    // a second trip through text is the identity as well
    CHECK(parse_run_request(to_args(back)) == back);
  }

  // parsing a hand-written argument vector and re-serializing is stable
  RunRequest from_text = parse_run_request(
      {"kernel", "--space", "hyperbolic", "--dim", "3", "--t", "0.75", "--method", "closed_form"});
  CHECK(from_text.command == "kernel");
  CHECK(from_text.space == "hyperbolic");
  CHECK(from_text.dim == 3);
  CHECK(from_text.t == 0.75);
  CHECK(parse_run_request(to_args(from_text)) == from_text);
}

TEST_CASE("validation names the offending field", "[cli]") {
  auto make = [](const char* cmd) {
    RunRequest r;
    r.command = cmd;
    return r;
  };
  {
    RunRequest r = make("kernel");
    r.t = -1.0;
    CHECK_THROWS_WITH(validate_request(r), ContainsSubstring("t:"));
  }
  {
    RunRequest r = make("kernel");
    r.grid = "nonsense";
    CHECK_THROWS_WITH(validate_request(r), ContainsSubstring("grid"));
  }
  {
    RunRequest r = make("kernel");
    r.method = "telepathy";
    CHECK_THROWS_WITH(validate_request(r), ContainsSubstring("method:"));
  }
  {
    RunRequest r = make("kernel");
    r.method = "pde";
    r.t = 5e-4;  // below the solver's mollification time
    CHECK_THROWS_WITH(validate_request(r), ContainsSubstring("t:"));
  }
  {
    RunRequest r = make("compare");
    r.methods = "spectral";
    CHECK_THROWS_WITH(validate_request(r), ContainsSubstring("methods:"));
  }
  {
    RunRequest r = make("compare");
    r.branch = "principal";
    CHECK_THROWS_WITH(validate_request(r), ContainsSubstring("branch:"));
  }
  {
    RunRequest r = make("compare");
    r.shift = "up";
    CHECK_THROWS_WITH(validate_request(r), ContainsSubstring("shift:"));
  }
  {
    RunRequest r = make("mc");
    r.scheme = "levy";
    CHECK_THROWS_WITH(validate_request(r), ContainsSubstring("scheme:"));
  }
  {
    RunRequest r = make("mc");
    r.samples = 0;
    CHECK_THROWS_WITH(validate_request(r), ContainsSubstring("samples:"));
  }
  {
    RunRequest r = make("mc");
    r.mode = "full";
    CHECK_THROWS_WITH(validate_request(r), ContainsSubstring("mode:"));
  }
  {
    RunRequest r = make("pde");
    r.dt = 0.0;
    CHECK_THROWS_WITH(validate_request(r), ContainsSubstring("dt:"));
  }
  {
    RunRequest r = make("pde");
    r.points = 4;
    CHECK_THROWS_WITH(validate_request(r), ContainsSubstring("points:"));
  }
  {
    RunRequest r = make("efunction");
    r.method = "closed_form";
    r.r1 = 0.0;
    CHECK_THROWS_WITH(validate_request(r), ContainsSubstring("r1:"));
  }
  {
    RunRequest r = make("suite");
    r.only = "0,11";
    CHECK_THROWS_WITH(validate_request(r), ContainsSubstring("only:"));
  }
  {
    RunRequest r = make("kernel");
    r.format = "xml";
    CHECK_THROWS_WITH(validate_request(r), ContainsSubstring("format:"));
  }
  {
    RunRequest r = make("orbit");
    CHECK_THROWS_WITH(validate_request(r), ContainsSubstring("command:"));
  }
}

TEST_CASE("kernel dispatch reproduces the spectral module", "[cli]") {
  RunRequest r;
  r.command = "kernel";
  r.space = "sphere";
  r.dim = 3;
  r.t = 0.5;
  r.method = "spectral";
  r.grid = "0.05:3.1:128";
  std::ostringstream os;
  CHECK(execute_request(r, os) == 0);
  auto doc = parse_csv(os.str());
  CHECK(doc.header == "space,n,t,coordinate,method,value,err_est,extra");
  REQUIRE(doc.rows.size() == 128);
  CHECK(doc.meta.at("command") == "kernel");
  CHECK(doc.meta.at("space") == "S3");
  auto grid = to_vector(parse_grid_spec(r.grid));
  for (std::size_t i = 0; i < doc.rows.size(); i += 17) {
    const auto& row = doc.rows[i];
    REQUIRE(row.size() == 8);
    CHECK(row[0] == "S3");
    CHECK(row[1] == "3");
    CHECK(row[4] == "spectral");
    // full-precision text preserves the module value to the last ulp (the
    // two call sites may contract floating ops differently under -O2)
    CHECK(std::stod(row[3]) == grid[i]);
    CHECK_THAT(std::stod(row[5]),
               Catch::Matchers::WithinULP(heat_kernel_sphere(3, grid[i], 0.5).first, 4));
    CHECK_THAT(row[7], ContainsSubstring("tail_bound="));
  }
}

TEST_CASE("compare writes both series and their deltas", "[cli]") {
  RunRequest r;
  r.command = "compare";
  r.space = "sphere";
  r.dim = 2;
  r.t = 1.0;
  r.methods = "gaussian_wrap,spectral";
  r.shift = "to_standard";
  r.grid = "0.2:2.9:32";
  std::ostringstream os;
  CHECK(execute_request(r, os) == 0);
  auto doc = parse_csv(os.str());
  REQUIRE(doc.rows.size() == 3 * 32);
  const double sup_abs = doc.meta.at("sup_abs_delta").get<double>();
  const double sup_rel = doc.meta.at("sup_rel_delta").get<double>();
  // the wrapped Gaussian and the spectral sum disagree measurably on S^2
  CHECK(sup_abs > 1e-3);
  CHECK(sup_rel > 1e-3);
  CHECK(sup_rel < 0.2);
  for (std::size_t i = 0; i < 32; ++i) {
    const auto& a = doc.rows[i];
    const auto& b = doc.rows[32 + i];
    const auto& d = doc.rows[64 + i];
    CHECK(a[4] == "gaussian_wrap");
    CHECK(b[4] == "spectral");
    CHECK(d[4] == "delta");
    CHECK(std::stod(d[5]) == std::stod(a[5]) - std::stod(b[5]));
    CHECK(std::abs(std::stod(d[5])) <= sup_abs);
  }
}

TEST_CASE("potential and efunction tables match their modules", "[cli]") {
  {
    RunRequest r;
    r.command = "potential";
    r.space = "CP2";
    r.method = "omega_star";
    r.grid = "0.05:1.5:24";
    std::ostringstream os;
    CHECK(execute_request(r, os) == 0);
    auto doc = parse_csv(os.str());
    REQUIRE(doc.rows.size() == 24);
    auto sp = build_space_by_name("CP2");
    auto grid = to_vector(parse_grid_spec(r.grid));
    for (std::size_t i = 0; i < 24; i += 5) {
      CHECK_THAT(std::stod(doc.rows[i][5]),
                 Catch::Matchers::WithinULP(omega_star(sp, grid[i]).value, 4));
      CHECK_THAT(doc.rows[i][7], ContainsSubstring("regime="));
    }
  }
  {
    RunRequest r;
    r.command = "efunction";
    r.space = "S3";
    r.method = "closed_form";
    r.r1 = 0.9;
    r.r2 = 1.3;
    r.grid = "0.1:2.4:12";
    std::ostringstream os;
    CHECK(execute_request(r, os) == 0);
    auto doc = parse_csv(os.str());
    REQUIRE(doc.rows.size() == 12);
    auto sp = build_space_by_name("S3");
    auto grid = to_vector(parse_grid_spec(r.grid));
    for (std::size_t i = 0; i < 12; i += 3)
      CHECK_THAT(std::stod(doc.rows[i][5]),
                 Catch::Matchers::WithinULP(e_closed_form(sp, OrbitTriple{0.9, 1.3, grid[i]}), 4));
    CHECK(doc.meta.at("r1").get<double>() == 0.9);
  }
}

TEST_CASE("config files select the space and carry its name", "[cli]") {
  const std::string path = "/tmp/heatlab_cli_space.cfg";
  {
    std::ofstream cfg(path);
    cfg << "# custom description\n";
    cfg << "kind = sphere\n";
    cfg << "dim = 2\n";
    cfg << "name = round_two\n";
  }
  RunRequest r;
  r.command = "kernel";
  r.config_path = path;
  r.method = "flat";
  r.t = 0.4;
  r.grid = "0.1:2.0:8";
  std::ostringstream os;
  CHECK(execute_request(r, os) == 0);
  auto doc = parse_csv(os.str());
  CHECK(doc.meta.at("space") == "round_two");
  CHECK(doc.rows.at(0).at(0) == "round_two");
  CHECK_THAT(std::stod(doc.rows.at(0).at(5)),
             Catch::Matchers::WithinULP(heat_kernel_flat(2, 0.1, 0.4), 4));
  std::remove(path.c_str());

  RunRequest bad = r;
  bad.config_path = "/tmp/does_not_exist_heatlab.cfg";
  std::ostringstream sink;
  CHECK_THROWS_WITH(execute_request(bad, sink), ContainsSubstring("config:"));
}

TEST_CASE("the suite command emits PASS lines and a JSON verdict", "[cli][slow]") {
  RunRequest r;
  r.command = "suite";
  r.only = "3";
  std::ostringstream out, progress;
  CHECK(execute_request(r, out, progress) == 0);
  CHECK_THAT(progress.str(), ContainsSubstring("PASS"));
  CHECK_THAT(progress.str(), ContainsSubstring("criterion  3"));
  auto verdict = nlohmann::json::parse(out.str());
  CHECK(verdict.at("all_pass").get<bool>());
  CHECK(verdict.at("failures").get<int>() == 0);
  REQUIRE(verdict.at("criteria").size() == 1);
  CHECK(verdict.at("criteria").at(0).at("index").get<int>() == 3);
  CHECK(verdict.at("criteria").at(0).at("pass").get<bool>());
}

TEST_CASE("the binary honors the documented exit codes", "[cli]") {
  // the flagship example: a 128-row kernel table on stdout
  auto ok = run_cli("kernel --space sphere --dim 3 --t 0.5 --method spectral --grid 0.05:3.1:128");
  CHECK(ok.code == 0);
  auto doc = parse_csv(ok.output);
  CHECK(doc.rows.size() == 128);

  // invalid requests exit 2 and name the offending field
  auto bad_t = run_cli("kernel --space S2 --t -1 --method flat");
  CHECK(bad_t.code == 2);
  CHECK_THAT(bad_t.output, ContainsSubstring("t:"));

  auto bad_flag = run_cli("kernel --space S2 --volume 7");
  CHECK(bad_flag.code == 2);

  auto bad_cmd = run_cli("orbit --space S2");
  CHECK(bad_cmd.code == 2);

  auto bad_only = run_cli("suite --only 42");
  CHECK(bad_only.code == 2);
  CHECK_THAT(bad_only.output, ContainsSubstring("only:"));

  // a structurally valid request that the modules reject exits 1, verbatim
  auto module_err = run_cli("kernel --space H2 --t 0.5 --method spectral --grid 0.1:2:8");
  CHECK(module_err.code == 1);
  CHECK_THAT(module_err.output, ContainsSubstring("sphere"));

  auto help = run_cli("--help");
  CHECK(help.code == 0);
  CHECK_THAT(help.output, ContainsSubstring("kernel"));
  CHECK_THAT(help.output, ContainsSubstring("suite"));
}

TEST_CASE("binary output is byte-deterministic, seeds included", "[cli][slow]") {
  // one identical request, run twice with different worker counts
  const std::string path = "/tmp/heatlab_cli_det.csv";
  const std::string args =
      "mc --space S2 --t 0.3 --scheme fk --samples 4000 --steps 60 --seed 11 "
      "--grid 0.2:2.0:10 --out " +
      path;
  setenv("HEATLAB_THREADS", "1", 1);
  auto r1 = run_cli(args);
  const std::string b1 = slurp(path);
  setenv("HEATLAB_THREADS", "4", 1);
  auto r2 = run_cli(args);
  const std::string b2 = slurp(path);
  unsetenv("HEATLAB_THREADS");
  REQUIRE(r1.code == 0);
  REQUIRE(r2.code == 0);
  CHECK(b1 == b2);
  CHECK_THAT(b1, ContainsSubstring("killed_mass"));
  std::remove(path.c_str());

  // JSON mirror carries the same rows
  auto rj = run_cli(
      "mc --space S2 --t 0.3 --scheme fk --samples 4000 --steps 60 --seed 11 "
      "--grid 0.2:2.0:10 --format json");
  REQUIRE(rj.code == 0);
  auto jdoc = nlohmann::json::parse(rj.output);
  CHECK(jdoc.at("rows").size() == 10);
  CHECK(jdoc.at("meta").at("seed").get<std::uint64_t>() == 11);
}

TEST_CASE("the four kernel routes agree through the front end", "[cli][slow]") {
  // S^3 at t = 0.3: the spectral sum is the reference; the signed-branch
  // wrapped Gaussian is exact there, the grid solver converges at its scheme
  // order, and the weighted walk agrees to sampling error.  (On S^2 the wrap
  // route differs at first order in t — that is the compare test above.)
  const std::string grid = "0.3:2.1:7";
  RunRequest base;
  base.command = "kernel";
  base.space = "sphere";
  base.dim = 3;
  base.t = 0.3;
  base.grid = grid;

  auto run = [&](const std::string& method, RunRequest r) {
    r.method = method;
    std::ostringstream os;
    REQUIRE(execute_request(r, os) == 0);
    return parse_csv(os.str());
  };
  auto spectral = run("spectral", base);
  RunRequest shifted = base;
  shifted.shift = "to_standard";
  shifted.branch = "signed";
  auto wrapped = run("gaussian_wrap", shifted);
  RunRequest solver = base;
  solver.points = 1024;
  auto pde = run("pde", solver);
  RunRequest walk = base;
  walk.samples = 60000;
  walk.steps = 120;
  walk.seed = 2027;
  auto mc = run("mc", walk);

  const auto xs = to_vector(parse_grid_spec(grid));
  const double width = mc.meta.at("bin_width").get<double>();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double ref = std::stod(spectral.rows[i][5]);
    CHECK(std::abs(std::stod(wrapped.rows[i][5]) - ref) < 1e-8 * ref + 1e-10);
    CHECK(std::abs(std::stod(pde.rows[i][5]) - ref) < 2e-3 * ref + 1e-6);
    // the walk histogram is bin-constant: compare at its bin center, within 4 sigma
    const double c = (std::floor(xs[i] / width) + 0.5) * width;
    const double ref_c = heat_kernel_sphere(3, c, 0.3).first;
    const double err = std::stod(mc.rows[i][6]);
    REQUIRE(err > 0.0);
    CHECK(std::abs(std::stod(mc.rows[i][5]) - ref_c) < 4.0 * err);
  }
}
