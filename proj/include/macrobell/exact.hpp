#pragma once

// Exact rational coarse-graining for moderate M. All four source entries are
// brought to a common denominator D, so every multinomial term is an integer
// over D^M and the whole sum runs in integer arithmetic.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "macrobell/box.hpp"
#include "macrobell/error.hpp"
#include "macrobell/voting.hpp"

namespace macrobell {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using RationalRow = std::array<Rational, 4>;

inline constexpr int kExactMaxM = 60;

/// Exact value of a finite double (every double is a dyadic rational).
inline Rational rational_from_double(double v) {
  if (!std::isfinite(v)) throw Error(ErrorCode::BadParams, "non-finite value");
  int exp = 0;
  const double mant = std::frexp(v, &exp);  // v = mant * 2^exp, 0.5 <= |mant| < 1
  const auto scaled = static_cast<long long>(std::ldexp(mant, 53));
  Rational r{BigInt(scaled)};
  const int shift = exp - 53;
  if (shift >= 0)
    r *= Rational(BigInt(1) << shift);
  else
    r /= Rational(BigInt(1) << -shift);
  return r;
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// Macroscopic row (00, 01, 10, 11) with exact arithmetic. M <= 60.
inline RationalRow coarse_grain_row_exact(const RationalRow& p, int m, const VotingRule& rule) {
  if (m < 1 || m > kExactMaxM)
    throw Error(ErrorCode::BadParams, "exact mode supports 1 <= M <= " + std::to_string(kExactMaxM));
  Rational total = 0;
  for (const auto& v : p) {
    if (v < 0) throw Error(ErrorCode::BadParams, "negative entry");
    total += v;
  }
  if (total != 1) throw Error(ErrorCode::BadParams, "row does not sum to exactly 1");

  // Zero-probabilities are 0, 1/2 or 1; doubled they are integers.
  const std::vector<double> z = rule.zero_probabilities(m);
  std::vector<int> z2(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) z2[i] = static_cast<int>(std::lround(2.0 * z[i]));

  BigInt denom = 1;
  for (const auto& v : p) denom = boost::multiprecision::lcm(denom, boost::multiprecision::denominator(v));
  std::array<BigInt, 4> num;
  for (std::size_t c = 0; c < 4; ++c)
    num[c] = boost::multiprecision::numerator(p[c]) * (denom / boost::multiprecision::denominator(p[c]));

  const auto mm = static_cast<std::size_t>(m);
  std::array<std::vector<BigInt>, 4> pw;
  for (std::size_t c = 0; c < 4; ++c) {
    pw[c].resize(mm + 1);
    pw[c][0] = 1;
    for (std::size_t k = 1; k <= mm; ++k) pw[c][k] = pw[c][k - 1] * num[c];
  }
  std::vector<BigInt> fact(mm + 1);
  fact[0] = 1;
  for (std::size_t k = 1; k <= mm; ++k) fact[k] = fact[k - 1] * k;

  std::array<BigInt, 4> acc;  // in units of 1 / (4 D^M)
  for (int k00 = 0; k00 <= m; ++k00)
    for (int k01 = 0; k00 + k01 <= m; ++k01)
      for (int k10 = 0; k00 + k01 + k10 <= m; ++k10) {
        const int k11 = m - k00 - k01 - k10;
        const auto u = [](int k) { return static_cast<std::size_t>(k); };
        BigInt w = pw[0][u(k00)] * pw[1][u(k01)] * pw[2][u(k10)] * pw[3][u(k11)];
        if (w == 0) continue;
        w *= fact[mm] / (fact[u(k00)] * fact[u(k01)] * fact[u(k10)] * fact[u(k11)]);
        const int za = z2[u(k00 + k01)], zb = z2[u(k00 + k10)];
        acc[0] += w * (za * zb);
        acc[1] += w * (za * (2 - zb));
        acc[2] += w * ((2 - za) * zb);
        acc[3] += w * ((2 - za) * (2 - zb));
      }

  BigInt scale = 4;
  for (int k = 0; k < m; ++k) scale *= denom;
  RationalRow out;
  for (std::size_t c = 0; c < 4; ++c) out[c] = Rational(acc[c], scale);
  return out;
}

/// Exact row from a double row (each entry converted exactly).
inline RationalRow exact_row(const Row& r) {
  RationalRow out;
  for (std::size_t c = 0; c < 4; ++c) out[c] = rational_from_double(r[c]);
  return out;
}

}  // namespace macrobell
