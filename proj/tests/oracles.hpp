#pragma once

// Independent reference implementations used only by the tests.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "macrobell/box.hpp"
#include "macrobell/exact.hpp"
#include "macrobell/voting.hpp"

namespace oracle {

using macrobell::Box;
using macrobell::Row;
using macrobell::Table;

/// Macro row by walking all 4^M per-copy outcome strings.
inline Row brute_force_row(const Row& p, int m, const macrobell::VotingRule& rule) {
  std::uint64_t total = 1;
  for (int i = 0; i < m; ++i) total *= 4;
  Row out{};
  for (std::uint64_t code = 0; code < total; ++code) {
    double prob = 1.0;
    int alice0 = 0, bob0 = 0;
    std::uint64_t c = code;
    for (int i = 0; i < m; ++i, c /= 4) {
      const int cell = static_cast<int>(c % 4);
      prob *= p[static_cast<std::size_t>(cell)];
      alice0 += (cell >> 1) == 0;
      bob0 += (cell & 1) == 0;
    }
    if (prob == 0.0) continue;
    const double za = rule.zero_probability(alice0, m), zb = rule.zero_probability(bob0, m);
    out[0] += prob * za * zb;
    out[1] += prob * za * (1 - zb);
    out[2] += prob * (1 - za) * zb;
    out[3] += prob * (1 - za) * (1 - zb);
  }
  return out;
}

/// Locality without the LP or the CHSH facets. A local model is a joint law of
/// (a0, a1, b0, b1). Alice's pair law has one free parameter tau = P(a0=0, a1=0);
/// given it, Bob's outcome for each setting y glues on independently, and the
/// gluing for one y is a 2x2 transportation problem with capacities, one free
/// parameter t = P(a0=0, a1=0, b=0). `infeasibility(tau)` measures how far the
/// best t is from satisfying all bounds; it is convex in tau, so the minimum is
/// found by golden-section search after a coarse grid bracket.
struct TauSearch {
  double min_infeasibility = 0.0;
  double best_tau = 0.0;
};

inline double tau_infeasibility(const Table& t, double tau) {
  auto p = [&](int a, int b, int x, int y) { return t[macrobell::setting_index(x, y)][macrobell::outcome_index(a, b)]; };
  const double pa0 = p(0, 0, 0, 0) + p(0, 1, 0, 0);  // P(a0 = 0)
  const double pa1 = p(0, 0, 1, 0) + p(0, 1, 1, 0);  // P(a1 = 0)
  const std::array<double, 4> r{tau, pa0 - tau, pa1 - tau, 1.0 - pa0 - pa1 + tau};
  double worst = 0.0;
  for (double v : r) worst = std::max(worst, -v);
  for (int y = 0; y < 2; ++y) {
    const double r0 = p(0, 0, 0, y), r1 = p(1, 0, 0, y), c0 = p(0, 0, 1, y);
    // sigma = (t, r0 - t, c0 - t, r1 - c0 + t), each in [0, capacity].
    const double lo = std::max({0.0, r0 - r[1], c0 - r[2], c0 - r1});
    const double hi = std::min({r[0], r0, c0, r[3] + c0 - r1});
    worst = std::max(worst, 0.5 * (lo - hi));
  }
  return worst;
}

inline TauSearch tau_search(const Box& box, int grid = 2001) {
  const Table& t = box.table();
  const double pa0 = t[0][0] + t[0][1], pa1 = t[2][0] + t[2][1];
  const double lo = std::max(0.0, pa0 + pa1 - 1.0), hi = std::min(pa0, pa1);
  TauSearch best{tau_infeasibility(t, lo), lo};
  int best_i = 0;
  for (int i = 0; i <= grid; ++i) {
    const double tau = lo + (hi - lo) * i / grid;
    const double v = tau_infeasibility(t, tau);
    if (v < best.min_infeasibility) best = {v, tau}, best_i = i;
  }
  double a = lo + (hi - lo) * std::max(0, best_i - 1) / grid;
  double b = lo + (hi - lo) * std::min(grid, best_i + 1) / grid;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
    const double c = b - g * (b - a), d = a + g * (b - a);
    if (tau_infeasibility(t, c) <= tau_infeasibility(t, d))
      b = d;
    else
      a = c;
  }
  const double mid = 0.5 * (a + b);
  const double v = tau_infeasibility(t, mid);
  if (v < best.min_infeasibility) best = {v, mid};
  return best;
}

inline bool tau_local(const Box& box, double tol = 1e-9) { return tau_search(box).min_infeasibility <= tol; }

/// The 24 extremal NS boxes: 16 deterministic, then PR_0..PR_7.
inline std::vector<Box> ns_vertices() {
  std::vector<Box> v;
  for (const auto& lv : macrobell::all_local_vertices()) v.push_back(lv.box);
  for (int f = 0; f < macrobell::kFacetCount; ++f) v.push_back(macrobell::pr_box_for_facet(f));
  return v;
}

inline std::vector<double> dirichlet(std::mt19937_64& rng, std::size_t n, double alpha) {
  std::gamma_distribution<double> gamma(alpha, 1.0);
  std::vector<double> w(n);
  double total = 0.0;
  for (auto& x : w) total += (x = gamma(rng));
  for (auto& x : w) x /= total;
  return w;
}

inline Box mixture(const std::vector<Box>& parts, const std::vector<double>& w) {
  Table t{};
  for (std::size_t i = 0; i < parts.size(); ++i)
    for (std::size_t s = 0; s < 4; ++s)
      for (std::size_t c = 0; c < 4; ++c) t[s][c] += w[i] * parts[i].table()[s][c];
  return macrobell::make_box(t);
}

/// Random point of the NS polytope; a small alpha gives sparse mixtures.
inline Box random_ns_box(std::mt19937_64& rng, double alpha = 0.5) {
  static const std::vector<Box> v = ns_vertices();
  return mixture(v, dirichlet(rng, v.size(), alpha));
}

/// w PR_f + (1 - w) B with uniform w, random facet f and random NS B; about
/// half of these violate a CHSH facet.
inline Box random_pr_heavy_box(std::mt19937_64& rng) {
  const double w = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  const int f = std::uniform_int_distribution<int>(0, macrobell::kFacetCount - 1)(rng);
  return mixture({macrobell::pr_box_for_facet(f), random_ns_box(rng)}, {w, 1.0 - w});
}

inline Box random_local_box(std::mt19937_64& rng, double alpha = 0.5) {
  std::vector<Box> v;
  for (const auto& lv : macrobell::all_local_vertices()) v.push_back(lv.box);
  return mixture(v, dirichlet(rng, v.size(), alpha));
}

/// NS box with exactly rational entries: integer weights over `scale` on the 24 vertices.
struct RationalBox {
  std::array<macrobell::RationalRow, 4> rows;
  Box box;
};

inline RationalBox random_rational_ns_box(std::mt19937_64& rng, int scale = 12) {
  static const std::vector<Box> v = ns_vertices();
  std::vector<int> k(v.size(), 0);
  std::uniform_int_distribution<std::size_t> pick(0, v.size() - 1);
  for (int i = 0; i < scale; ++i) ++k[pick(rng)];
  std::array<macrobell::RationalRow, 4> rows;
  for (auto& r : rows) r.fill(0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (k[i] == 0) continue;
    const macrobell::Rational w(k[i], scale);
    for (std::size_t s = 0; s < 4; ++s)
      for (std::size_t c = 0; c < 4; ++c)
        if (v[i].table()[s][c] != 0.0) rows[s][c] += w * macrobell::rational_from_double(v[i].table()[s][c]);
  }
  Table t{};
  for (std::size_t s = 0; s < 4; ++s)
    for (std::size_t c = 0; c < 4; ++c) t[s][c] = macrobell::to_double(rows[s][c]);
  return {rows, macrobell::make_box(t)};
}

}  // namespace oracle
