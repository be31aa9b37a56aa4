#pragma once

// Seeded sampling estimator of the macroscopic box.
//
// Stream layout: experiment t of setting s uses one Philox block with
//   key     = {seed, 0}
//   counter = {t, s, 0, 0}
// Words 0..2 drive the three sequential binomial draws of the tally
// (k00, then k01 | rest, then k10 | rest); word 3 supplies the fair-coin bits
// of the Unanimous/FairCoin rule (bit 0 Alice, bit 1 Bob). Because every
// experiment addresses its own block, results do not depend on how trials are
// split across workers.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "macrobell/box.hpp"
#include "macrobell/macro.hpp"
#include "macrobell/philox.hpp"
#include "macrobell/voting.hpp"

namespace macrobell {

/// Binomial(n, p) by chop-down inversion starting at the mode, walking
/// alternately below and above it. One uniform per draw.
inline int sample_binomial(int n, double p, double u) {
  if (n <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  const double q = 1.0 - p;
  const int mode = std::min(n, static_cast<int>(std::floor((n + 1) * p)));
  const double pmf_mode = std::exp(std::lgamma(n + 1.0) - std::lgamma(mode + 1.0) - std::lgamma(n - mode + 1.0) +
                                   mode * std::log(p) + (n - mode) * std::log(q));
  u -= pmf_mode;
  if (u < 0.0) return mode;
  int lo = mode, hi = mode;
  double pmf_lo = pmf_mode, pmf_hi = pmf_mode;
  while (lo > 0 || hi < n) {
    if (lo > 0) {
      pmf_lo *= lo * q / ((n - lo + 1) * p);
      --lo;
      u -= pmf_lo;
      if (u < 0.0) return lo;
    }
    if (hi < n) {
      pmf_hi *= (n - hi) * p / ((hi + 1) * q);
      ++hi;
      u -= pmf_hi;
      if (u < 0.0) return hi;
    }
  }
  return mode;  // rounding left a sliver of mass unassigned
}

/// Multinomial tally of M draws from `row` using three words of a block.
inline OutcomeTally sample_tally(const Row& row, int m, const Philox4x64::Counter& words) {
  OutcomeTally t;
  int rest = m;
  t.k00 = sample_binomial(rest, row[0], Philox4x64::to_unit(words[0]));
  rest -= t.k00;
  const double mass = row[1] + row[2] + row[3];
  t.k01 = mass > 0.0 ? sample_binomial(rest, std::min(1.0, row[1] / mass), Philox4x64::to_unit(words[1])) : 0;
  rest -= t.k01;
  const double tail = row[2] + row[3];
  t.k10 = tail > 0.0 ? sample_binomial(rest, std::min(1.0, row[2] / tail), Philox4x64::to_unit(words[2])) : 0;
  t.k11 = rest - t.k10;
  return t;
}

struct McEstimate {
  std::array<Row, 4> macro_distribution{};
  std::array<Row, 4> standard_error{};
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;

  Table table() const { return macro_distribution; }
};

inline McEstimate sample_macro(const Box& source, int m, const VotingRule& rule, std::uint64_t trials,
                               std::uint64_t seed, unsigned workers = 0) {
  if (trials < 1) throw Error(ErrorCode::BadParams, "trials must be >= 1");
  const std::vector<double> z = rule.zero_probabilities(m);
  const Philox4x64::Key key{seed, 0};

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, trials));

  // Integer counts are summed, so the merge order cannot change the result.
  using Counts = std::array<std::array<std::uint64_t, 4>, 4>;
  std::vector<Counts> partial(workers, Counts{});

  auto vote = [&](int n0, std::uint64_t coin) -> int {
    const double pz = z[static_cast<std::size_t>(n0)];
    if (pz == 1.0) return 0;
    if (pz == 0.0) return 1;
    return static_cast<int>(coin & 1);
  };

  auto run = [&](unsigned w) {
    Counts& counts = partial[w];
    const std::uint64_t begin = trials * w / workers;
    const std::uint64_t end = trials * (w + 1) / workers;
    for (std::size_t s = 0; s < 4; ++s) {
      const Row& row = source.row(s);
      for (std::uint64_t t = begin; t < end; ++t) {
        const auto words = Philox4x64::block({t, s, 0, 0}, key);
        const OutcomeTally tally = sample_tally(row, m, words);
        const int a = vote(tally.alice_n0(), words[3]);
        const int b = vote(tally.bob_n0(), words[3] >> 1);
        ++counts[s][outcome_index(a, b)];
      }
    }
  };

  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& th : pool) th.join();
  }

  McEstimate est;
  est.trials = trials;
  est.seed = seed;
  const double n = static_cast<double>(trials);
  for (std::size_t s = 0; s < 4; ++s)
    for (std::size_t c = 0; c < 4; ++c) {
      std::uint64_t k = 0;
      for (const auto& part : partial) k += part[s][c];
      const double ph = static_cast<double>(k) / n;
      est.macro_distribution[s][c] = ph;
      est.standard_error[s][c] = std::sqrt(ph * (1.0 - ph) / n);
    }
  return est;
}

struct McChsh {
  double estimate = 0.0;
  double standard_error = 0.0;
  int facet = 0;
};

/// Macro CHSH (max over the 8 facets) of the sampled box. Each facet value is
/// a signed sum of correlators E = 1 - 2A, so its variance is the sum of
/// 4 Var(A_hat) over settings.
inline McChsh mc_chsh(const McEstimate& est) {
  const ChshReport r = chsh_table(est.table());
  double var = 0.0;
  const double n = static_cast<double>(est.trials);
  for (double a : r.a_coefficients) var += 4.0 * a * (1.0 - a) / n;
  return {r.max_violation, std::sqrt(var), r.max_facet};
}

inline McChsh mc_chsh(const Box& source, int m, const VotingRule& rule, std::uint64_t trials, std::uint64_t seed,
                      unsigned workers = 0) {
  return mc_chsh(sample_macro(source, m, rule, trials, seed, workers));
}

}  // namespace macrobell
