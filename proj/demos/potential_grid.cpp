// Dumps the radial potential Omega* on a grid as CSV for a handful of preset
// spaces, one block per space, using the same table schema as the command-line
// tool.  Near r = 0 and near the wall the evaluator switches to its series
// forms; the extra column records which regime produced each value.

#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "heatlab/csvio.hpp"
#include "heatlab/potential.hpp"
#include "heatlab/root_system.hpp"
#include "heatlab/util.hpp"

int main() {
  using namespace heatlab;
  const std::vector<std::string> names{"S2", "S3", "SU2", "CP2", "H2", "H3"};
  std::vector<CsvRow> rows;
  for (const auto& name : names) {
    const Space sp = build_space_by_name(name);
    const double hi =
        sp.curvature_sign > 0 ? 0.98 * sp.fundamental_radius : 3.5;
    for (double r : linspace(1e-3, hi, 40)) {
      const PotentialValue pv = omega_star(sp, r);
      CsvRow row;
      row.space = sp.name;
      row.n = sp.dim;
      row.t = 0.0;
      row.coordinate = r;
      row.method = "omega_star";
      row.value = pv.value;
      row.extra = pv.regime == PotentialValue::Regime::generic ? "regime=generic"
                  : pv.regime == PotentialValue::Regime::series_near_zero
                      ? "regime=series_near_zero"
                      : "regime=series_near_wall";
      rows.push_back(row);
    }
  }
  nlohmann::json meta{{"command", "potential_grid demo"},
                      {"spaces", names},
                      {"note", "constant part is -|rho|^2 on compact presets, +|rho|^2 "
                               "on noncompact ones; complex-type presets are exactly constant"}};
  write_rows_csv(std::cout, meta, rows);
  return 0;
}
