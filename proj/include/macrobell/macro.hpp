#pragma once

// Exact macroscopic coarse-graining of M independent copies of a box.
//
// For one setting XY the M pairs land in the four joint outcomes with counts
// (k00, k01, k10, k11), multinomially distributed. Alice sees n0 = k00 + k01
// particles in detector 0, Bob sees n0 = k00 + k10; each side binarizes its
// count with the voting rule. The macroscopic row is the exact sum over all
// compositions of M into four parts.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "macrobell/box.hpp"
#include "macrobell/error.hpp"
#include "macrobell/voting.hpp"

namespace macrobell {

struct OutcomeTally {
  int k00 = 0, k01 = 0, k10 = 0, k11 = 0;

  int total() const { return k00 + k01 + k10 + k11; }
  int alice_n0() const { return k00 + k01; }
  int bob_n0() const { return k00 + k10; }
};

namespace detail {

/// Neumaier compensated sum.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      carry += (sum - t) + v;
    else
      carry += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline std::vector<double> log_factorials(int m) {
  std::vector<double> lf(static_cast<std::size_t>(m) + 1);
  for (int k = 0; k <= m; ++k) lf[static_cast<std::size_t>(k)] = std::lgamma(static_cast<double>(k) + 1.0);
  return lf;
}

inline unsigned resolve_workers(unsigned requested, int m) {
  if (requested != 0) return requested;
  if (m < 64) return 1;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace detail

/// Macroscopic outcome distribution (00, 01, 10, 11) for one source row.
///
/// Terms are evaluated in log space; each is a probability, so exponentiation
/// cannot overflow. The k00 axis is split across `workers` threads (0 = auto)
/// and the per-k00 partial sums are reduced pairwise in k00 order, so the
/// result is bit-identical for any worker count.
inline Row coarse_grain_row(const Row& p, int m, const VotingRule& rule, unsigned workers = 0) {
  const std::vector<double> z = rule.zero_probabilities(m);
  for (double v : p)
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error(ErrorCode::BadParams, "row entries must be finite and >= 0");

  const std::vector<double> lf = detail::log_factorials(m);
  std::array<double, 4> lp{};
  std::array<bool, 4> live{};
  for (std::size_t c = 0; c < 4; ++c) {
    live[c] = p[c] > 0.0;
    lp[c] = live[c] ? std::log(p[c]) : 0.0;
  }
  auto lf_at = [&](int k) { return lf[static_cast<std::size_t>(k)]; };
  auto z_at = [&](int n0) { return z[static_cast<std::size_t>(n0)]; };

  const int k00_max = live[0] ? m : 0;
  std::vector<std::array<double, 4>> slices(static_cast<std::size_t>(k00_max) + 1);

  auto run_slice = [&](int k00) {
    std::array<detail::CompensatedSum, 4> acc{};
    const int r0 = m - k00;
    const double base0 = lf_at(m) - lf_at(k00) + k00 * lp[0];
    const int k01_max = live[1] ? r0 : 0;
    for (int k01 = 0; k01 <= k01_max; ++k01) {
      const int r1 = r0 - k01;
      const double base1 = base0 - lf_at(k01) + k01 * lp[1];
      const double za = z_at(k00 + k01);
      int k10_lo = 0, k10_hi = live[2] ? r1 : 0;
      if (!live[3]) k10_lo = r1;  // k11 must be 0
      for (int k10 = k10_lo; k10 <= k10_hi; ++k10) {
        const int k11 = r1 - k10;
        const double w = std::exp(base1 - lf_at(k10) - lf_at(k11) + k10 * lp[2] + k11 * lp[3]);
        const double zb = z_at(k00 + k10);
        acc[0].add(w * za * zb);
        acc[1].add(w * za * (1.0 - zb));
        acc[2].add(w * (1.0 - za) * zb);
        acc[3].add(w * (1.0 - za) * (1.0 - zb));
      }
    }
    auto& out = slices[static_cast<std::size_t>(k00)];
    for (std::size_t c = 0; c < 4; ++c) out[c] = acc[c].value();
  };

  const unsigned n_workers = std::min<unsigned>(detail::resolve_workers(workers, m),
                                                static_cast<unsigned>(k00_max) + 1);
  if (n_workers <= 1) {
    for (int k00 = 0; k00 <= k00_max; ++k00) run_slice(k00);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (unsigned w = 0; w < n_workers; ++w)
      pool.emplace_back([&, w] {
        for (int k00 = static_cast<int>(w); k00 <= k00_max; k00 += static_cast<int>(n_workers)) run_slice(k00);
      });
    for (auto& t : pool) t.join();
  }

  Row out{};
  std::vector<double> column(slices.size());
  for (std::size_t c = 0; c < 4; ++c) {
    for (std::size_t i = 0; i < slices.size(); ++i) column[i] = slices[i][c];
    out[c] = detail::pairwise_sum(column);
  }
  return out;
}

inline Row coarse_grain_setting(const Box& source, int m, int x, int y, const VotingRule& rule,
                                unsigned workers = 0) {
  return coarse_grain_row(source.row(x, y), m, rule, workers);
}

struct MacroBox {
  Box box;
  int m;
  VotingRule rule;
  Box source;
};

inline MacroBox macro_box(const Box& source, int m, const VotingRule& rule, unsigned workers = 0) {
  Table t{};
  for (std::size_t s = 0; s < 4; ++s) t[s] = coarse_grain_row(source.row(s), m, rule, workers);
  return {make_box(t), m, rule, source};
}

// ---------------------------------------------------------------------------
// CHSH traces and the macroscopic-limit label

struct TracePoint {
  int m = 0;
  double chsh = 0.0;       // max over the 8 facet values of the macro box
  double canonical = 0.0;  // |2 + 2(A11 - A00 - A01 - A10)|
  std::array<double, 4> a{};
};

inline TracePoint trace_point(const MacroBox& macro) {
  const ChshReport r = chsh(macro.box);
  return {macro.m, r.max_violation, r.canonical_value, r.a_coefficients};
}

inline std::vector<TracePoint> macro_chsh_trace(const Box& source, const std::vector<int>& ms,
                                                const VotingRule& rule, unsigned workers = 0) {
  if (!std::is_sorted(ms.begin(), ms.end())) throw Error(ErrorCode::BadParams, "M values must be ascending");
  std::vector<TracePoint> out;
  out.reserve(ms.size());
  for (int m : ms) out.push_back(trace_point(macro_box(source, m, rule, workers)));
  return out;
}

/// start, start+step, ..., up to and including end.
inline std::vector<int> m_range(int start, int end, int step) {
  if (start < 1 || step < 1 || end < start) throw Error(ErrorCode::BadParams, "bad M range");
  std::vector<int> ms;
  for (int m = start; m <= end; m += step) ms.push_back(m);
  return ms;
}

enum class Limit { MacroLocal, MacroMaximal, Indeterminate };

inline std::string to_string(Limit l) {
  switch (l) {
    case Limit::MacroLocal: return "MacroLocal";
    case Limit::MacroMaximal: return "MacroMaximal";
    case Limit::Indeterminate: return "Indeterminate";
  }
  return "?";
}

struct LimitLabel {
  Limit label = Limit::Indeterminate;
  std::vector<std::pair<int, double>> trace;
  double final_value = 0.0;
};

inline constexpr int kDefaultLimitWindow = 5;
inline constexpr double kDefaultLimitTol = 0.15;

/// MacroLocal if the last `window` values are all <= 2 + tol, MacroMaximal if
/// they are all >= 4 - tol, Indeterminate otherwise.
inline LimitLabel limit_classify(const std::vector<TracePoint>& trace, int window = kDefaultLimitWindow,
                                 double tol = kDefaultLimitTol) {
  if (window < 1 || trace.size() < static_cast<std::size_t>(window))
    throw Error(ErrorCode::TraceTooShort, "need at least " + std::to_string(window) + " trace points");
  LimitLabel out;
  for (const auto& p : trace) out.trace.emplace_back(p.m, p.chsh);
  out.final_value = trace.back().chsh;
  const auto tail = std::span(trace).last(static_cast<std::size_t>(window));
  const bool local = std::all_of(tail.begin(), tail.end(), [&](const TracePoint& p) { return p.chsh <= 2.0 + tol; });
  const bool maximal = std::all_of(tail.begin(), tail.end(), [&](const TracePoint& p) { return p.chsh >= 4.0 - tol; });
  out.label = local ? Limit::MacroLocal : maximal ? Limit::MacroMaximal : Limit::Indeterminate;
  return out;
}

}  // namespace macrobell
