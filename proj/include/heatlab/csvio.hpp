#pragma once

// Table output with a fixed schema: space,n,t,coordinate,method,value,
// err_est,extra.  A JSON metadata object rides atop the CSV as '#'-prefixed
// comment lines so a single file is self-describing; the same rows can be
// emitted as one JSON document instead.  All numbers print through %.17g,
// so identical requests produce identical bytes.

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace heatlab {

struct CsvRow {
  std::string space;
  int n = 0;
  double t = 0.0;
  double coordinate = 0.0;
  std::string method;
  double value = 0.0;
  double err_est = 0.0;
  std::string extra;
};

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_rows_csv(std::ostream& os, const nlohmann::json& meta,
                           const std::vector<CsvRow>& rows) {
  if (!meta.is_null() && !meta.empty()) {
    for (auto it = meta.begin(); it != meta.end(); ++it) {
      nlohmann::json one;
      one[it.key()] = it.value();
      os << "# " << one.dump() << "\n";
    }
  }
  os << "space,n,t,coordinate,method,value,err_est,extra\n";
  for (const auto& r : rows) {
    os << r.space << ',' << r.n << ',' << format_double(r.t) << ','
       << format_double(r.coordinate) << ',' << r.method << ','
       << format_double(r.value) << ',' << format_double(r.err_est) << ','
       << r.extra << "\n";
  }
}

inline void write_rows_json(std::ostream& os, const nlohmann::json& meta,
                            const std::vector<CsvRow>& rows) {
  nlohmann::json doc;
  doc["meta"] = meta.is_null() ? nlohmann::json::object() : meta;
  doc["rows"] = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json jr;
    jr["space"] = r.space;
    jr["n"] = r.n;
    jr["t"] = r.t;
    jr["coordinate"] = r.coordinate;
    jr["method"] = r.method;
    jr["value"] = r.value;
    jr["err_est"] = r.err_est;
    jr["extra"] = r.extra;
    doc["rows"].push_back(jr);
  }
  os << doc.dump(2) << "\n";
}

}  // namespace heatlab
