#pragma once

// Closed-form sums for A = P(macro outcomes differ) of a single setting row
// (alpha, beta, delta, gamma) = (P00, P01, P10, P11) under majority voting,
// for even M. These are cross-checks for the general enumerator in macro.hpp;
// where a published sum disagrees with exhaustive enumeration the corrected
// form is used here and the literal reading is kept in closed_form_as_printed.
//
// With h = M/2, the corrected sums are
//
//   Case 1  (alpha, 0, 0, gamma)       A = 0
//   Case 2  (0, beta, delta, 0)        A = (beta+delta)^M - C(M,h) (beta delta)^h
//   Case 3  (alpha, beta, delta, 0)    Case 7 with gamma = 0
//   Case 4  (0, beta, delta, gamma)    Case 7 with alpha = 0
//   Case 5  (alpha, 0, delta, gamma)   M! sum_{k<h} sum_{j<=h-k} [ a^k d^(M-k-j) g^j / (k! j! (M-k-j)!)
//                                        + [k+j=h] sum_{n=j+1..h} a^k d^(M-k-n) g^n / (k! n! (M-k-n)!) ]
//   Case 6  (alpha, beta, 0, gamma)    Case 5 with delta replaced by beta
//   Case 7  (alpha, beta, delta, gamma)
//       A = sum_{k1<h} sum_{k2<=h} sum_{j<=min(h-k1-1, h-k2)}
//             M! a^k1 g^k2 / (k1! k2! j! (M-k1-k2-j)!) [b^(M-k1-k2-j) d^j + b^j d^(M-k1-k2-j)]
//
// k1 counts 00 pairs and k2 counts 11 pairs. The inner bound couples both:
// Bob votes 1 iff k1 + j < h, Alice votes 0 iff k1 + (M-k1-k2-j) >= h.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "macrobell/error.hpp"
#include "macrobell/macro.hpp"

namespace macrobell {

struct CaseParams {
  double alpha = 0.0;  // P(00|XY)
  double beta = 0.0;   // P(01|XY)
  double delta = 0.0;  // P(10|XY)
  double gamma = 0.0;  // P(11|XY)

  Row as_row() const { return {alpha, beta, delta, gamma}; }
};

namespace detail {

// k log x with 0^0 = 1.
inline double klog(double x, int k) {
  if (k == 0) return 0.0;
  if (x <= 0.0) return -std::numeric_limits<double>::infinity();
  return k * std::log(x);
}

inline void validate_case(int case_id, const CaseParams& p, int m) {
  if (case_id < 1 || case_id > 7) throw Error(ErrorCode::BadParams, "case id must be 1..7");
  if (m < 2) throw Error(ErrorCode::BadParams, "M must be >= 2");
  if (m % 2 != 0) throw Error(ErrorCode::OddM, "closed forms are stated for even M, got " + std::to_string(m));
  const Row r = p.as_row();
  double total = 0.0;
  for (double v : r) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error(ErrorCode::BadParams, "parameters must be >= 0");
    total += v;
  }
  if (std::abs(total - 1.0) > kProbTol) throw Error(ErrorCode::BadParams, "parameters sum to " + std::to_string(total));
  // Entries each case fixes to zero.
  static constexpr bool zero[8][4] = {{},
                                      {false, true, true, false},
                                      {true, false, false, true},
                                      {false, false, false, true},
                                      {true, false, false, false},
                                      {false, true, false, false},
                                      {false, false, true, false},
                                      {false, false, false, false}};
  for (std::size_t c = 0; c < 4; ++c)
    if (zero[case_id][c] && r[c] != 0.0)
      throw Error(ErrorCode::BadParams, "case " + std::to_string(case_id) + " requires entry " + std::to_string(c) + " = 0");
}

// Triple sum shared by Cases 3, 4 and 7. `corrected` selects the inner bound.
inline double case7_sum(const CaseParams& p, int m, bool corrected) {
  const int h = m / 2;
  const auto lf = log_factorials(m);
  auto f = [&](int k) { return lf[static_cast<std::size_t>(k)]; };
  CompensatedSum acc;
  for (int k1 = 0; k1 <= h - 1; ++k1) {
    if (k1 > 0 && p.alpha == 0.0) break;
    for (int k2 = 0; k2 <= h; ++k2) {
      if (k2 > 0 && p.gamma == 0.0) break;
      const int j_max = corrected ? std::min(h - k1 - 1, h - k2) : h - k1 - k2 - 1;
      const double head = f(m) + klog(p.alpha, k1) + klog(p.gamma, k2) - f(k1) - f(k2);
      for (int j = 0; j <= j_max; ++j) {
        const int rest = m - k1 - k2 - j;
        const double common = head - f(j) - f(rest);
        acc.add(std::exp(common + klog(p.beta, rest) + klog(p.delta, j)));
        acc.add(std::exp(common + klog(p.beta, j) + klog(p.delta, rest)));
      }
    }
  }
  return acc.value();
}

// Cases 5 and 6 with the indicator term; `x` is delta (Case 5) or beta (Case 6).
inline double case5_sum(double alpha, double x, double gamma, int m) {
  const int h = m / 2;
  const auto lf = log_factorials(m);
  auto f = [&](int k) { return lf[static_cast<std::size_t>(k)]; };
  auto term = [&](int k, int n) {
    return std::exp(f(m) - f(k) - f(n) - f(m - k - n) + klog(alpha, k) + klog(x, m - k - n) + klog(gamma, n));
  };
  CompensatedSum acc;
  for (int k = 0; k <= h - 1; ++k)
    for (int j = 0; j <= h - k; ++j) {
      acc.add(term(k, j));
      if (k + j == h)
        for (int n = j + 1; n <= h; ++n) acc.add(term(k, n));
    }
  return acc.value();
}

inline double case2_middle_log(int m, double beta, double delta, bool binomial) {
  const int h = m / 2;
  const double coeff = binomial ? std::lgamma(m + 1.0) - 2.0 * std::lgamma(h + 1.0)
                                : std::lgamma(m + 1.0) - std::lgamma(h + 1.0);
  return coeff + klog(beta, h) + klog(delta, h);
}

}  // namespace detail

/// A^(M) for the given case, corrected where the published sum is wrong.
inline double closed_form_case(int case_id, const CaseParams& p, int m) {
  detail::validate_case(case_id, p, m);
  switch (case_id) {
    case 1: return 0.0;
    case 2: return std::pow(p.beta + p.delta, m) - std::exp(detail::case2_middle_log(m, p.beta, p.delta, true));
    case 3:
    case 4:
    case 7: return detail::case7_sum(p, m, true);
    case 5: return detail::case5_sum(p.alpha, p.delta, p.gamma, m);
    default: return detail::case5_sum(p.alpha, p.beta, p.gamma, m);
  }
}

/// The literal reading of the published sums: Case 2 with the M!/(M/2)!
/// middle coefficient, Cases 4 and 7 with inner bound j <= M/2 - k00 - k11 - 1.
/// Kept for figure diagnostics; disagrees with enumeration for Cases 2 (M>=4), 4 and 7.
inline double closed_form_as_printed(int case_id, const CaseParams& p, int m) {
  detail::validate_case(case_id, p, m);
  switch (case_id) {
    case 2: return std::pow(p.beta + p.delta, m) - std::exp(detail::case2_middle_log(m, p.beta, p.delta, false));
    case 4:
    case 7: return detail::case7_sum(p, m, false);
    default: return closed_form_case(case_id, p, m);
  }
}

/// Enumerator value of the same quantity: P(01) + P(10) of the macro row.
inline double enumerated_a(const CaseParams& p, int m, const VotingRule& rule = VotingRule::majority()) {
  const Row r = coarse_grain_row(p.as_row(), m, rule);
  return r[1] + r[2];
}

}  // namespace macrobell
