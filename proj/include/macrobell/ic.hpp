#pragma once

// Information-causality necessary condition for 2-2-2 boxes,
//   E1^2 + E2^2 <= 1,  E_i = 2 Q_i - 1,
//   Q1 = [P(a=b|00) + P(a=b|10)] / 2,   Q2 = [P(a=b|01) + P(a!=b|11)] / 2,
// and its closed form F(p1, y) for the Class-V family. Passing is necessary
// for respecting information causality, never sufficient.

#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "macrobell/box.hpp"
#include "macrobell/error.hpp"

namespace macrobell {

struct IcReport {
  double q1 = 0.0, q2 = 0.0;
  double e1 = 0.0, e2 = 0.0;
  double lhs = 0.0;  // E1^2 + E2^2
  bool satisfied = false;
  double lhs_relabel_max = 0.0;  // max of lhs over the 8 facet relabelings
};

namespace detail {

inline double ic_lhs(const Table& t, double* q1 = nullptr, double* q2 = nullptr) {
  auto equal = [&](int x, int y) {
    const Row& r = t[setting_index(x, y)];
    return r[outcome_index(0, 0)] + r[outcome_index(1, 1)];
  };
  const double a = 0.5 * (equal(0, 0) + equal(1, 0));
  const double b = 0.5 * (equal(0, 1) + (1.0 - equal(1, 1)));
  if (q1) *q1 = a;
  if (q2) *q2 = b;
  const double e1 = 2.0 * a - 1.0, e2 = 2.0 * b - 1.0;
  return e1 * e1 + e2 * e2;
}

}  // namespace detail

inline IcReport ic_necessary(const Box& box) {
  IcReport r;
  r.lhs = detail::ic_lhs(box.table(), &r.q1, &r.q2);
  r.e1 = 2.0 * r.q1 - 1.0;
  r.e2 = 2.0 * r.q2 - 1.0;
  r.satisfied = r.lhs <= 1.0 + kProbTol;
  r.lhs_relabel_max = r.lhs;
  for (int f = 0; f < kFacetCount; ++f)
    r.lhs_relabel_max = std::max(r.lhs_relabel_max, detail::ic_lhs(relabel_to_canonical(box.table(), f)));
  return r;
}

/// F(p1, y) = p1^2 - 2y + 2 p1 y + 2 y^2 with y = p3 + p5. F <= 0 iff a Class-V
/// box passes the condition.
inline double class_v_F(double p1, double y) {
  if (!(p1 >= 0.0 && p1 <= 1.0) || !(y >= 0.0 && y <= 1.0))
    throw Error(ErrorCode::OutOfRange, "class_v_F needs p1, y in [0,1]");
  return p1 * p1 - 2.0 * y + 2.0 * p1 * y + 2.0 * y * y;
}

struct GridCell {
  double p1, y, f;
  bool ic_pass;  // F <= 0
};

struct GridSpec {
  double p1_lo = 0.0;
  double p1_hi = std::sqrt(2.0) - 1.0;
  double y_lo = 0.0;
  double y_hi = 1.0;
  int p1_steps = 200;
  int y_steps = 200;
};

/// Row-major in p1 then y; both axes include their endpoints.
inline std::vector<GridCell> fig6_grid(const GridSpec& g = {}) {
  if (g.p1_steps < 2 || g.y_steps < 2) throw Error(ErrorCode::BadParams, "grid needs at least 2 steps per axis");
  std::vector<GridCell> out;
  out.reserve(static_cast<std::size_t>(g.p1_steps) * static_cast<std::size_t>(g.y_steps));
  for (int i = 0; i < g.p1_steps; ++i) {
    const double p1 = g.p1_lo + (g.p1_hi - g.p1_lo) * i / (g.p1_steps - 1);
    for (int j = 0; j < g.y_steps; ++j) {
      const double y = g.y_lo + (g.y_hi - g.y_lo) * j / (g.y_steps - 1);
      const double f = class_v_F(p1, y);
      out.push_back({p1, y, f, f <= 0.0});
    }
  }
  return out;
}

/// Builds the Class-V box p1 PR + p2 D1_0 + p3 D2_0 + p4 D3_0 + p5 D4_0,
/// evaluates the condition on its table and through F(p1, p3 + p5), and
/// insists the two verdicts agree.
inline std::pair<IcReport, double> cross_check_class_v(const std::array<double, 5>& p, bool strict = true) {
  const ClassBox cb = class_generator(ClassId::V, {p[0], p[1], p[2], p[3], p[4]}, strict);
  const IcReport report = ic_necessary(cb.box);
  const double f = class_v_F(p[0], std::min(1.0, p[2] + p[4]));
  const bool f_pass = f <= kProbTol;
  if (f_pass != report.satisfied || std::abs((report.lhs - 1.0) - f) > 1e-9)
    throw Error(ErrorCode::MismatchDetected,
                "IC table value " + std::to_string(report.lhs - 1.0) + " vs F " + std::to_string(f));
  return {report, f};
}

}  // namespace macrobell
