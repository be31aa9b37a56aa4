#pragma once

// Membership in the local polytope L and the no-signaling polytope NS, with
// convex-decomposition certificates, plus the Tsirelson necessary check.

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "macrobell/box.hpp"
#include "macrobell/simplex.hpp"

namespace macrobell {

inline constexpr double kLpTol = 1e-8;
inline const double kTsirelsonBound = 2.0 * std::sqrt(2.0);

enum class CertificateKind { LocalDecomposition, NsDecomposition, FacetViolation };

inline std::string to_string(CertificateKind k) {
  switch (k) {
    case CertificateKind::LocalDecomposition: return "LocalDecomposition";
    case CertificateKind::NsDecomposition: return "NsDecomposition";
    case CertificateKind::FacetViolation: return "FacetViolation";
  }
  return "Unknown";
}

struct DecompositionCertificate {
  CertificateKind kind = CertificateKind::LocalDecomposition;
  /// Vertex id -> weight, in vertex enumeration order (decompositions only).
  std::vector<std::pair<std::string, double>> weights;
  int facet = -1;          // FacetViolation: violated facet; NsDecomposition: facet of the PR term
  double violation = 0.0;  // FacetViolation: max CHSH - 2
  double residual = 0.0;   // max entry-wise reconstruction error

  double weight(const std::string& id) const {
    for (const auto& [k, w] : weights)
      if (k == id) return w;
    return 0.0;
  }
};

struct MembershipVerdict {
  bool in_set = false;
  std::optional<DecompositionCertificate> certificate;
  double tolerance_used = 0.0;
  double worst_mismatch = 0.0;  // NS check: largest marginal mismatch
  std::string detail;
};

/// Entry-wise sum of weights times vertex tables.
inline Table reconstruct(const DecompositionCertificate& cert) {
  Table t{};
  for (const auto& [id, w] : cert.weights) {
    const auto v = vertex_by_id(id);
    if (!v) throw Error(ErrorCode::BadParams, "unknown vertex id " + id);
    for (std::size_t s = 0; s < 4; ++s)
      for (std::size_t k = 0; k < 4; ++k) t[s][k] += w * v->table()[s][k];
  }
  return t;
}

namespace detail {

// Equality system: 16 table entries plus sum(weights) = 1, one column per vertex.
inline lp::Result<double> solve_vertex_lp(const Table& target, const std::vector<Box>& columns,
                                          const std::vector<double>& cost) {
  const std::size_t n = columns.size();
  lp::DenseSimplex<double>::Matrix a(17, std::vector<double>(n, 0.0));
  std::vector<double> b(17, 0.0);
  for (std::size_t s = 0; s < 4; ++s)
    for (std::size_t k = 0; k < 4; ++k) {
      const std::size_t r = 4 * s + k;
      for (std::size_t j = 0; j < n; ++j) a[r][j] = columns[j].table()[s][k];
      b[r] = target[s][k];
    }
  for (std::size_t j = 0; j < n; ++j) a[16][j] = 1.0;
  b[16] = 1.0;
  lp::Options<double> opt;
  opt.feasibility_tol = kLpTol;
  return lp::solve<double>(std::move(a), std::move(b), cost, opt);
}

}  // namespace detail

/// Decides whether `box` is a convex combination of the 16 deterministic boxes.
/// Infeasible boxes get the most violated CHSH facet (lowest index on ties).
inline MembershipVerdict is_local(const Box& box, double tol = kLpTol) {
  const auto& vertices = all_local_vertices();
  std::vector<Box> columns;
  for (const auto& v : vertices) columns.push_back(v.box);
  const auto res = detail::solve_vertex_lp(box.table(), columns, std::vector<double>(columns.size(), 0.0));

  MembershipVerdict verdict;
  verdict.tolerance_used = tol;
  if (res.status == lp::Status::IterationLimit || res.status == lp::Status::Unbounded)
    throw Error(ErrorCode::LpNumericalFailure, "locality LP did not converge");

  if (res.status == lp::Status::Optimal && res.phase1_residual <= tol) {
    DecompositionCertificate cert;
    cert.kind = CertificateKind::LocalDecomposition;
    for (std::size_t j = 0; j < vertices.size(); ++j) cert.weights.emplace_back(vertices[j].id, res.x[j]);
    cert.residual = max_abs_diff(reconstruct(cert), box.table());
    if (cert.residual > tol)
      throw Error(ErrorCode::LpNumericalFailure, "local decomposition residual " + std::to_string(cert.residual));
    verdict.in_set = true;
    verdict.certificate = std::move(cert);
    return verdict;
  }

  const ChshReport report = chsh(box);
  const double violation = report.max_violation - 2.0;
  if (!(violation > 0.0))
    throw Error(ErrorCode::LpNumericalFailure,
                "LP infeasible but no CHSH facet is violated (max " + std::to_string(report.max_violation) + ")");
  DecompositionCertificate cert;
  cert.kind = CertificateKind::FacetViolation;
  cert.facet = report.max_facet;
  cert.violation = violation;
  verdict.in_set = false;
  verdict.certificate = std::move(cert);
  verdict.detail = "facet " + std::to_string(report.max_facet) + " violated by " + std::to_string(violation);
  return verdict;
}

/// Local vertices plus the single PR box sitting on the most violated facet
/// (canonical PR when no facet is violated), with the PR weight minimized.
inline DecompositionCertificate decompose_ns(const Box& box) {
  const ChshReport report = chsh(box);
  const int facet = report.max_violation > 2.0 ? report.max_facet : 0;
  const auto& vertices = all_local_vertices();
  std::vector<Box> columns;
  for (const auto& v : vertices) columns.push_back(v.box);
  columns.push_back(pr_box_for_facet(facet));
  std::vector<double> cost(columns.size(), 0.0);
  cost.back() = 1.0;

  const auto res = detail::solve_vertex_lp(box.table(), columns, cost);
  if (res.status != lp::Status::Optimal)
    throw Error(ErrorCode::LpNumericalFailure, "NS decomposition LP failed");

  DecompositionCertificate cert;
  cert.kind = CertificateKind::NsDecomposition;
  cert.facet = facet;
  for (std::size_t j = 0; j < vertices.size(); ++j) cert.weights.emplace_back(vertices[j].id, res.x[j]);
  cert.weights.emplace_back(pr_vertex_id(facet), res.x.back());
  cert.residual = max_abs_diff(reconstruct(cert), box.table());
  if (cert.residual > kLpTol)
    throw Error(ErrorCode::LpNumericalFailure, "NS decomposition residual " + std::to_string(cert.residual));
  return cert;
}

inline DecompositionCertificate decompose_ns(const Table& table, double tol = kProbTol) {
  if (!check_table(table).ok(tol)) throw Error(ErrorCode::NotNoSignaling, "table is not a valid no-signaling box");
  return decompose_ns(make_box(table, tol));
}

/// Positivity, normalization and no-signaling. A passing table also gets an
/// NS decomposition certificate; a failing one reports the worst mismatch.
inline MembershipVerdict is_no_signaling(const Table& table, double tol = kProbTol) {
  const TableCheck c = check_table(table);
  MembershipVerdict v;
  v.tolerance_used = tol;
  v.worst_mismatch = c.worst_marginal;
  v.in_set = c.ok(tol);
  if (v.in_set) {
    v.certificate = decompose_ns(make_box(table, tol));
  } else if (!c.finite) {
    v.detail = "non-finite entry";
  } else if (c.worst_negative < -tol) {
    v.detail = "negative entry " + std::to_string(c.worst_negative);
  } else if (c.worst_row_error > tol) {
    v.detail = "row " + setting_name(c.worst_row) + " not normalized";
  } else {
    v.detail = c.marginal_where;
  }
  return v;
}

/// Necessary condition for a quantum realization only: max CHSH <= 2 sqrt(2).
inline bool tsirelson_check(const Box& box) { return chsh(box).max_violation <= kTsirelsonBound + kProbTol; }

}  // namespace macrobell
