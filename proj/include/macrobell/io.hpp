#pragma once

// Box and certificate JSON, trace and grid CSV.
//
// Box JSON: {"P": [[r00],[r01],[r10],[r11]]}, rows ordered by setting (X,Y) =
// 00, 01, 10, 11 and columns by outcome (a,b) = 00, 01, 10, 11. Any other key
// is rejected.

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "macrobell/box.hpp"
#include "macrobell/error.hpp"
#include "macrobell/ic.hpp"
#include "macrobell/macro.hpp"
#include "macrobell/montecarlo.hpp"
#include "macrobell/polytope.hpp"

namespace macrobell::io {

using Json = nlohmann::ordered_json;

/// %.17g, enough to round-trip any double.
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v + 0.0);  // no "-0"
  return buf;
}

inline Json table_to_json(const Table& t) {
  Json rows = Json::array();
  for (const auto& r : t) rows.push_back(Json(std::vector<double>(r.begin(), r.end())));
  return Json{{"P", rows}};
}

/// Reads the "P" table without validating probabilities.
inline Table table_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "box JSON must be an object");
  for (const auto& [key, _] : j.items())
    if (key != "P") throw Error(ErrorCode::ParseError, "unexpected key \"" + key + "\" in box JSON");
  if (!j.contains("P")) throw Error(ErrorCode::ParseError, "box JSON needs key \"P\"");
  const Json& p = j.at("P");
  if (!p.is_array() || p.size() != 4) throw Error(ErrorCode::ParseError, "\"P\" must hold 4 rows");
  Table t{};
  for (std::size_t s = 0; s < 4; ++s) {
    const Json& row = p[s];
    if (!row.is_array() || row.size() != 4)
      throw Error(ErrorCode::ParseError, "row " + std::to_string(s) + " must hold 4 numbers");
    for (std::size_t c = 0; c < 4; ++c) {
      if (!row[c].is_number()) throw Error(ErrorCode::ParseError, "non-numeric entry in row " + std::to_string(s));
      t[s][c] = row[c].get<double>();
    }
  }
  return t;
}

inline Table parse_table(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return table_from_json(j);
}

inline Box parse_box(const std::string& text, double tol = kProbTol) { return make_box(parse_table(text), tol); }

inline std::string box_to_json(const Box& box) { return table_to_json(box.table()).dump(2); }

inline Json certificate_to_json(const DecompositionCertificate& cert) {
  Json w = Json::object();
  for (const auto& [id, v] : cert.weights) w[id] = v + 0.0;
  Json j;
  j["kind"] = to_string(cert.kind);
  j["weights"] = w;
  j["facet"] = cert.facet;
  j["violation"] = cert.violation;
  return j;
}

inline void write_trace_csv(std::ostream& os, const std::vector<TracePoint>& trace) {
  os << "M,I_chsh,A00,A01,A10,A11\n";
  for (const auto& p : trace) {
    os << p.m << ',' << fmt(p.chsh);
    for (double a : p.a) os << ',' << fmt(a);
    os << '\n';
  }
}

struct McTracePoint {
  int m = 0;
  McEstimate estimate;
};

/// Trace schema plus the delta-method error of I and the standard error of each A.
inline void write_mc_trace_csv(std::ostream& os, const std::vector<McTracePoint>& trace) {
  os << "M,I_chsh,A00,A01,A10,A11,stderr_I_chsh,stderr_A00,stderr_A01,stderr_A10,stderr_A11\n";
  for (const auto& p : trace) {
    const ChshReport r = chsh_table(p.estimate.table());
    const McChsh c = mc_chsh(p.estimate);
    os << p.m << ',' << fmt(r.max_violation);
    for (double a : r.a_coefficients) os << ',' << fmt(a);
    os << ',' << fmt(c.standard_error);
    const double n = static_cast<double>(p.estimate.trials);
    for (double a : r.a_coefficients) os << ',' << fmt(std::sqrt(a * (1.0 - a) / n));
    os << '\n';
  }
}

inline void write_grid_csv(std::ostream& os, const std::vector<GridCell>& grid) {
  os << "p1,y,F\n";
  for (const auto& c : grid) os << fmt(c.p1) << ',' << fmt(c.y) << ',' << fmt(c.f) << '\n';
}

}  // namespace macrobell::io
