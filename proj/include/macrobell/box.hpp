#pragma once

// Single-pair 2-2-2 correlation boxes: validation, canonical constructors,
// mixtures and CHSH evaluation.
//
// Layout convention used everywhere in the library: table[s][c] with
//   s = 2*X + Y  (setting rows 00, 01, 10, 11)
//   c = 2*a + b  (outcome columns 00, 01, 10, 11)

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "macrobell/error.hpp"

namespace macrobell {

using Row = std::array<double, 4>;
using Table = std::array<Row, 4>;

inline constexpr double kProbTol = 1e-9;
inline constexpr double kBoxEqualTol = 1e-12;

constexpr std::size_t setting_index(int x, int y) { return static_cast<std::size_t>(2 * x + y); }
constexpr std::size_t outcome_index(int a, int b) { return static_cast<std::size_t>(2 * a + b); }

inline std::string setting_name(std::size_t s) {
  return std::to_string(s >> 1) + std::to_string(s & 1);
}

// ---------------------------------------------------------------------------
// Validation

/// Worst violation found in each constraint family, with its location.
struct TableCheck {
  double worst_negative = 0.0;  // most negative entry (0 if none)
  std::size_t negative_row = 0, negative_col = 0;
  double worst_row_error = 0.0;  // max |sum(row) - 1|
  std::size_t worst_row = 0;
  double worst_marginal = 0.0;  // max marginal mismatch across the other party's setting
  std::string marginal_where;
  bool finite = true;

  bool ok(double tol) const {
    return finite && worst_negative >= -tol && worst_row_error <= tol && worst_marginal <= tol;
  }
};

inline TableCheck check_table(const Table& t) {
  TableCheck c;
  for (std::size_t s = 0; s < 4; ++s) {
    double sum = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      const double v = t[s][k];
      if (!std::isfinite(v)) c.finite = false;
      if (v < c.worst_negative) {
        c.worst_negative = v;
        c.negative_row = s;
        c.negative_col = k;
      }
      sum += v;
    }
    const double err = std::abs(sum - 1.0);
    if (err > c.worst_row_error) {
      c.worst_row_error = err;
      c.worst_row = s;
    }
  }
  // Alice: P(a|X) = sum_b P(ab|XY) must not depend on Y.
  for (int x = 0; x < 2; ++x) {
    for (int a = 0; a < 2; ++a) {
      const double m0 = t[setting_index(x, 0)][outcome_index(a, 0)] + t[setting_index(x, 0)][outcome_index(a, 1)];
      const double m1 = t[setting_index(x, 1)][outcome_index(a, 0)] + t[setting_index(x, 1)][outcome_index(a, 1)];
      if (std::abs(m0 - m1) > c.worst_marginal) {
        c.worst_marginal = std::abs(m0 - m1);
        c.marginal_where = "Alice P(a=" + std::to_string(a) + "|X=" + std::to_string(x) + ") differs across Y";
      }
    }
  }
  // Bob: P(b|Y) must not depend on X.
  for (int y = 0; y < 2; ++y) {
    for (int b = 0; b < 2; ++b) {
      const double m0 = t[setting_index(0, y)][outcome_index(0, b)] + t[setting_index(0, y)][outcome_index(1, b)];
      const double m1 = t[setting_index(1, y)][outcome_index(0, b)] + t[setting_index(1, y)][outcome_index(1, b)];
      if (std::abs(m0 - m1) > c.worst_marginal) {
        c.worst_marginal = std::abs(m0 - m1);
        c.marginal_where = "Bob P(b=" + std::to_string(b) + "|Y=" + std::to_string(y) + ") differs across X";
      }
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Box

/// A validated single-pair conditional distribution P(ab|XY). Immutable.
class Box {
 public:
  const Table& table() const noexcept { return table_; }
  const Row& row(std::size_t s) const { return table_[s]; }
  const Row& row(int x, int y) const { return table_[setting_index(x, y)]; }
  double operator()(int a, int b, int x, int y) const {
    return table_[setting_index(x, y)][outcome_index(a, b)];
  }

  friend Box make_box(const Table& table, double tol);
  friend Box make_box_unchecked(const Table& table);

 private:
  explicit Box(const Table& t) : table_(t) {}
  Table table_;
};

/// Validates positivity, normalization and no-signaling within `tol`.
/// Never repairs: the table is stored exactly as given.
inline Box make_box(const Table& table, double tol = kProbTol) {
  const TableCheck c = check_table(table);
  if (!c.finite) throw Error(ErrorCode::NegativeEntry, "table contains a non-finite entry");
  if (c.worst_negative < -tol) {
    std::ostringstream os;
    os << "entry P(" << setting_name(c.negative_col) << "|" << setting_name(c.negative_row)
       << ") = " << c.worst_negative;
    throw Error(ErrorCode::NegativeEntry, os.str());
  }
  if (c.worst_row_error > tol) {
    std::ostringstream os;
    os << "row XY=" << setting_name(c.worst_row) << " is off normalization by " << c.worst_row_error;
    throw Error(ErrorCode::RowNotNormalized, os.str());
  }
  if (c.worst_marginal > tol) {
    std::ostringstream os;
    os << c.marginal_where << " by " << c.worst_marginal;
    throw Error(ErrorCode::SignalingDetected, os.str());
  }
  return Box(table);
}

/// For tables that are valid by construction (vertices, convex mixtures).
inline Box make_box_unchecked(const Table& table) { return Box(table); }

inline bool approx_equal(const Table& lhs, const Table& rhs, double tol = kBoxEqualTol) {
  for (std::size_t s = 0; s < 4; ++s)
    for (std::size_t k = 0; k < 4; ++k)
      if (std::abs(lhs[s][k] - rhs[s][k]) > tol) return false;
  return true;
}

inline bool approx_equal(const Box& lhs, const Box& rhs, double tol = kBoxEqualTol) {
  return approx_equal(lhs.table(), rhs.table(), tol);
}

inline double max_abs_diff(const Table& lhs, const Table& rhs) {
  double d = 0.0;
  for (std::size_t s = 0; s < 4; ++s)
    for (std::size_t k = 0; k < 4; ++k) d = std::max(d, std::abs(lhs[s][k] - rhs[s][k]));
  return d;
}

// ---------------------------------------------------------------------------
// Relabelings and facets
//
// Facet id f = 4*fx + 2*fy + o. The relabeled box is
//   P'(ab|XY) = P(a^o, b | X^fx, Y^fy)
// so the canonical signed CHSH expression of P' equals facet f's expression of P.

inline constexpr int kFacetCount = 8;

struct FacetLabel {
  int fx, fy, o;
};

constexpr FacetLabel facet_label(int f) { return {(f >> 2) & 1, (f >> 1) & 1, f & 1}; }

inline Table relabel(const Table& t, int fx, int fy, int o) {
  Table out{};
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          out[setting_index(x, y)][outcome_index(a, b)] = t[setting_index(x ^ fx, y ^ fy)][outcome_index(a ^ o, b)];
  return out;
}

inline Table relabel_to_canonical(const Table& t, int facet) {
  const FacetLabel l = facet_label(facet);
  return relabel(t, l.fx, l.fy, l.o);
}

// ---------------------------------------------------------------------------
// Canonical boxes

/// a XOR b = (X^fx)(Y^fy) XOR o with probability 1/2 each: the PR box maximal on facet f.
inline Box pr_box_for_facet(int facet) {
  const FacetLabel l = facet_label(facet);
  Table t{};
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          t[setting_index(x, y)][outcome_index(a, b)] = ((a ^ b) == (((x ^ l.fx) & (y ^ l.fy)) ^ l.o)) ? 0.5 : 0.0;
  return make_box_unchecked(t);
}

/// P(ab|XY) = 1/2 if a XOR b = XY, 0 otherwise.
inline Box pr_box() { return pr_box_for_facet(0); }

inline Box uniform_box() {
  Table t{};
  for (auto& r : t) r.fill(0.25);
  return make_box_unchecked(t);
}

/// Deterministic box with a = a0 XOR a1*X and b = b0 XOR b1*Y.
inline Box deterministic_box(int a0, int a1, int b0, int b1) {
  Table t{};
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      const int a = (a0 ^ (a1 & x)) & 1;
      const int b = (b0 ^ (b1 & y)) & 1;
      t[setting_index(x, y)][outcome_index(a, b)] = 1.0;
    }
  return make_box_unchecked(t);
}

/// Coefficients (a0, a1, b0, b1) of the CHSH-saturating vertex D_family^r.
inline std::array<int, 4> vertex_bits(int family, int r) {
  if (family < 1 || family > 4) throw Error(ErrorCode::BadFamily, "family must be 1..4, got " + std::to_string(family));
  if (r != 0 && r != 1) throw Error(ErrorCode::BadFamily, "r must be a bit, got " + std::to_string(r));
  switch (family) {
    case 1: return {r, 0, r, 0};
    case 2: return {r, 1, r, 0};
    case 3: return {r, 0, r, 1};
    default: return {r, 1, r ^ 1, 1};
  }
}

/// D_1^r: a=r, b=r.  D_2^r: a=X^r, b=r.  D_3^r: a=r, b=Y^r.  D_4^r: a=X^r, b=Y^r^1.
inline Box deterministic_vertex(int family, int r) {
  const auto bits = vertex_bits(family, r);
  return deterministic_box(bits[0], bits[1], bits[2], bits[3]);
}

struct LocalVertex {
  std::string id;
  std::array<int, 4> bits;  // a0, a1, b0, b1
  Box box;
};

/// The 16 deterministic boxes. The eight CHSH-saturating vertices come first in
/// the order D1_0, D1_1, D2_0, ..., D4_1; the rest are named L<a0><a1><b0><b1>.
inline const std::vector<LocalVertex>& all_local_vertices() {
  static const std::vector<LocalVertex> vertices = [] {
    std::vector<LocalVertex> v;
    v.reserve(16);
    std::array<bool, 16> taken{};
    for (int family = 1; family <= 4; ++family)
      for (int r = 0; r < 2; ++r) {
        const auto bits = vertex_bits(family, r);
        taken[static_cast<std::size_t>(8 * bits[0] + 4 * bits[1] + 2 * bits[2] + bits[3])] = true;
        v.push_back({"D" + std::to_string(family) + "_" + std::to_string(r), bits,
                     deterministic_box(bits[0], bits[1], bits[2], bits[3])});
      }
    for (int code = 0; code < 16; ++code) {
      if (taken[static_cast<std::size_t>(code)]) continue;
      const std::array<int, 4> bits{(code >> 3) & 1, (code >> 2) & 1, (code >> 1) & 1, code & 1};
      v.push_back({"L" + std::to_string(bits[0]) + std::to_string(bits[1]) + std::to_string(bits[2]) +
                       std::to_string(bits[3]),
                   bits, deterministic_box(bits[0], bits[1], bits[2], bits[3])});
    }
    return v;
  }();
  return vertices;
}

inline std::string pr_vertex_id(int facet) { return "PR_" + std::to_string(facet); }

/// Resolves "D1_0".."D4_1", "Lxxxx", "PR_0".."PR_7", "pr" and "uniform".
inline std::optional<Box> vertex_by_id(const std::string& id) {
  if (id == "pr") return pr_box();
  if (id == "uniform") return uniform_box();
  for (const auto& v : all_local_vertices())
    if (v.id == id) return v.box;
  for (int f = 0; f < kFacetCount; ++f)
    if (id == pr_vertex_id(f)) return pr_box_for_facet(f);
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Mixtures

struct MixtureComponent {
  double weight;
  Box box;
};

struct MixtureSpec {
  std::vector<MixtureComponent> components;
};

inline Box mix(const MixtureSpec& spec, double tol = kProbTol) {
  double total = 0.0;
  for (const auto& c : spec.components) {
    if (!(c.weight >= -tol)) throw Error(ErrorCode::NegativeWeight, "weight " + std::to_string(c.weight));
    total += c.weight;
  }
  if (spec.components.empty() || std::abs(total - 1.0) > tol)
    throw Error(ErrorCode::WeightsNotNormalized, "weights sum to " + std::to_string(total));
  Table t{};
  for (const auto& c : spec.components)
    for (std::size_t s = 0; s < 4; ++s)
      for (std::size_t k = 0; k < 4; ++k) t[s][k] += c.weight * c.box.table()[s][k];
  return make_box(t, tol);
}

// ---------------------------------------------------------------------------
// The five representative classes of nonlocal NS boxes
//
//   I   p PR + (1-p) D1_0
//   II  p PR + (1-p) D2_0
//   III p1 PR + p2 D1_0 + p3 D1_1
//   IV  p1 PR + p2 D2_0 + p3 D2_1
//   V   p1 PR + p2 D1_0 + p3 D2_0 + p4 D3_0 + p5 D4_0

enum class ClassId { I = 1, II, III, IV, V };

inline std::string to_string(ClassId c) {
  static constexpr const char* names[] = {"I", "II", "III", "IV", "V"};
  return names[static_cast<int>(c) - 1];
}

inline std::optional<ClassId> parse_class_id(const std::string& s) {
  for (int i = 1; i <= 5; ++i)
    if (s == to_string(static_cast<ClassId>(i))) return static_cast<ClassId>(i);
  return std::nullopt;
}

struct ClassBox {
  Box box;
  MixtureSpec spec;
  double predicted_chsh;  // 2 + 2p (or 2 + 2p1)
};

/// Explicit mixture for a class. I/II take {p}; III/IV take {p1,p2,p3}; V takes {p1..p5}.
/// With strict=true every weight must lie strictly inside (0,1).
inline MixtureSpec class_mixture(ClassId id, const std::vector<double>& params, bool strict = true) {
  std::vector<double> w;
  std::vector<Box> parts;
  const Box pr = pr_box();
  switch (id) {
    case ClassId::I:
    case ClassId::II:
      if (params.size() != 1) throw Error(ErrorCode::BadParams, "class " + to_string(id) + " takes one weight p");
      w = {params[0], 1.0 - params[0]};
      parts = {pr, deterministic_vertex(id == ClassId::I ? 1 : 2, 0)};
      break;
    case ClassId::III:
    case ClassId::IV: {
      if (params.size() != 3) throw Error(ErrorCode::BadParams, "class " + to_string(id) + " takes p1,p2,p3");
      const int family = id == ClassId::III ? 1 : 2;
      w = params;
      parts = {pr, deterministic_vertex(family, 0), deterministic_vertex(family, 1)};
      break;
    }
    case ClassId::V:
      if (params.size() != 5) throw Error(ErrorCode::BadParams, "class V takes p1..p5");
      w = params;
      parts = {pr, deterministic_vertex(1, 0), deterministic_vertex(2, 0), deterministic_vertex(3, 0),
               deterministic_vertex(4, 0)};
      break;
  }
  double total = 0.0;
  for (double x : w) {
    if (!std::isfinite(x) || x < 0.0 || x > 1.0)
      throw Error(ErrorCode::BadParams, "weight out of [0,1]: " + std::to_string(x));
    if (strict && (x <= 0.0 || x >= 1.0))
      throw Error(ErrorCode::BadParams, "strict class weights must satisfy 0 < p < 1, got " + std::to_string(x));
    total += x;
  }
  if (std::abs(total - 1.0) > kProbTol) throw Error(ErrorCode::BadParams, "weights sum to " + std::to_string(total));
  MixtureSpec spec;
  for (std::size_t i = 0; i < w.size(); ++i) spec.components.push_back({w[i], parts[i]});
  return spec;
}

inline ClassBox class_generator(ClassId id, const std::vector<double>& params, bool strict = true) {
  MixtureSpec spec = class_mixture(id, params, strict);
  Box box = mix(spec);
  return {box, std::move(spec), 2.0 + 2.0 * params.front()};
}

// ---------------------------------------------------------------------------
// CHSH

/// <XY> = sum_ab (-1)^(a XOR b) P(ab|XY), one per setting row.
inline std::array<double, 4> correlators(const Table& t) {
  std::array<double, 4> e{};
  for (std::size_t s = 0; s < 4; ++s) e[s] = t[s][0] - t[s][1] - t[s][2] + t[s][3];
  return e;
}

/// A_XY = P(01|XY) + P(10|XY).
inline std::array<double, 4> anticorrelation(const Table& t) {
  std::array<double, 4> a{};
  for (std::size_t s = 0; s < 4; ++s) a[s] = t[s][1] + t[s][2];
  return a;
}

/// Signed facet value (-1)^o [E'00 + E'01 + E'10 - E'11] with E'_XY = E_(X^fx)(Y^fy).
inline double facet_value(const std::array<double, 4>& e, int facet) {
  const FacetLabel l = facet_label(facet);
  auto at = [&](int x, int y) { return e[setting_index(x ^ l.fx, y ^ l.fy)]; };
  const double s = at(0, 0) + at(0, 1) + at(1, 0) - at(1, 1);
  return l.o ? -s : s;
}

struct ChshReport {
  double canonical_value = 0.0;     // |<00> + <01> + <10> - <11>|
  double canonical_from_a = 0.0;    // |2 + 2(A11 - A00 - A01 - A10)|
  std::array<double, kFacetCount> symmetrized_values{};
  double max_violation = 0.0;
  int max_facet = 0;                // lowest facet index attaining max_violation
  std::array<double, 4> a_coefficients{};
  std::array<double, 4> correlators{};
};

/// CHSH evaluation on a raw table (no validation; used for sampled estimates).
inline ChshReport chsh_table(const Table& t) {
  ChshReport r;
  r.correlators = correlators(t);
  r.a_coefficients = anticorrelation(t);
  const auto& e = r.correlators;
  const auto& a = r.a_coefficients;
  r.canonical_value = std::abs(e[0] + e[1] + e[2] - e[3]);
  r.canonical_from_a = std::abs(2.0 + 2.0 * (a[3] - a[0] - a[1] - a[2]));
  r.max_violation = -std::numeric_limits<double>::infinity();
  for (int f = 0; f < kFacetCount; ++f) {
    r.symmetrized_values[static_cast<std::size_t>(f)] = facet_value(e, f);
    if (r.symmetrized_values[static_cast<std::size_t>(f)] > r.max_violation) {
      r.max_violation = r.symmetrized_values[static_cast<std::size_t>(f)];
      r.max_facet = f;
    }
  }
  return r;
}

inline ChshReport chsh(const Box& box) { return chsh_table(box.table()); }

}  // namespace macrobell
