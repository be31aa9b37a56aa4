#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "macrobell/montecarlo.hpp"
#include "oracles.hpp"

using namespace macrobell;

TEST(Philox, KnownAnswers) {
  EXPECT_EQ(Philox4x64::block({0, 0, 0, 0}, {0, 0}),
            (Philox4x64::Counter{0x16554d9eca36314cULL, 0xdb20fe9d672d0fdcULL, 0xd7e772cee186176bULL,
                                 0x7e68b68aec7ba23bULL}));
  const std::uint64_t f = ~0ULL;
  EXPECT_EQ(Philox4x64::block({f, f, f, f}, {f, f}),
            (Philox4x64::Counter{0x87b092c3013fe90bULL, 0x438c3c67be8d0224ULL, 0x9cc7d7c69cd777b6ULL,
                                 0xa09caebf594f0ba0ULL}));
  EXPECT_EQ(Philox4x64::block({0x243f6a8885a308d3ULL, 0x13198a2e03707344ULL, 0xa4093822299f31d0ULL,
                               0x082efa98ec4e6c89ULL},
                              {0x452821e638d01377ULL, 0xbe5466cf34e90c6cULL}),
            (Philox4x64::Counter{0xa528f45403e61d95ULL, 0x38c72dbd566e9788ULL, 0xa5a1610e72fd18b5ULL,
                                 0x57bd43b5e52b7fe6ULL}));
}

TEST(Philox, UnitInterval) {
  EXPECT_EQ(Philox4x64::to_unit(0), 0.0);
  EXPECT_LT(Philox4x64::to_unit(~0ULL), 1.0);
  EXPECT_EQ(Philox4x64::to_unit(1ULL << 63), 0.5);
}

TEST(Binomial, InversionPartitionsTheUnitInterval) {
  // Equally spaced u values land in each k with frequency pmf(k).
  for (const auto& [n, p] : std::vector<std::pair<int, double>>{{20, 0.3}, {7, 0.9}, {100, 0.5}, {1, 0.25}}) {
    const int points = 200000;
    std::vector<int> hits(static_cast<std::size_t>(n) + 1, 0);
    for (int i = 0; i < points; ++i) ++hits[static_cast<std::size_t>(sample_binomial(n, p, (i + 0.5) / points))];
    for (int k = 0; k <= n; ++k) {
      const double pmf = std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                                  k * std::log(p) + (n - k) * std::log1p(-p));
      EXPECT_NEAR(hits[static_cast<std::size_t>(k)] / double(points), pmf, 2.0 / points + 1e-12) << n << ' ' << p << ' ' << k;
    }
  }
  EXPECT_EQ(sample_binomial(10, 0.0, 0.7), 0);
  EXPECT_EQ(sample_binomial(10, 1.0, 0.7), 10);
  EXPECT_EQ(sample_binomial(0, 0.5, 0.7), 0);
}

TEST(SampleTally, CountsAddUp) {
  for (std::uint64_t t = 0; t < 1000; ++t) {
    const auto words = Philox4x64::block({t, 0, 0, 0}, {9, 0});
    const OutcomeTally k = sample_tally({0.1, 0.2, 0.3, 0.4}, 37, words);
    EXPECT_EQ(k.total(), 37);
    EXPECT_GE(std::min({k.k00, k.k01, k.k10, k.k11}), 0);
    const OutcomeTally z = sample_tally({0.5, 0, 0, 0.5}, 37, words);
    EXPECT_EQ(z.k01 + z.k10, 0);
  }
}

TEST(SampleMacro, DeterministicSourceIsExact) {
  const McEstimate e = sample_macro(deterministic_vertex(1, 0), 17, VotingRule::majority(), 10, 3);
  for (std::size_t s = 0; s < 4; ++s) {
    EXPECT_EQ(e.macro_distribution[s], (Row{1, 0, 0, 0}));
    EXPECT_EQ(e.standard_error[s], (Row{0, 0, 0, 0}));
  }
  const McChsh c = mc_chsh(deterministic_vertex(4, 1), 9, VotingRule::majority(), 100, 3);
  EXPECT_EQ(c.estimate, 2.0);
  EXPECT_EQ(c.standard_error, 0.0);
}

TEST(SampleMacro, ReproducibleAndIndependentOfWorkers) {
  const Box b = class_generator(ClassId::V, {0.3, 0.2, 0.2, 0.15, 0.15}).box;
  const McEstimate ref = sample_macro(b, 25, VotingRule::unanimous(), 20000, 42, 1);
  for (unsigned w : {1u, 2u, 3u, 8u, 0u}) {
    const McEstimate e = sample_macro(b, 25, VotingRule::unanimous(), 20000, 42, w);
    EXPECT_EQ(e.macro_distribution, ref.macro_distribution) << w;
    EXPECT_EQ(e.standard_error, ref.standard_error) << w;
  }
  const McEstimate other = sample_macro(b, 25, VotingRule::unanimous(), 20000, 43, 1);
  EXPECT_NE(other.macro_distribution, ref.macro_distribution);
}

TEST(SampleMacro, RowsAreFrequencies) {
  const McEstimate e = sample_macro(uniform_box(), 4, VotingRule::majority(), 999, 1);
  for (const Row& r : e.macro_distribution) {
    EXPECT_NEAR(r[0] + r[1] + r[2] + r[3], 1.0, 1e-15);
    for (double v : r) EXPECT_EQ(std::round(v * 999), v * 999);
  }
  EXPECT_THROW(sample_macro(uniform_box(), 4, VotingRule::majority(), 0, 1), Error);
}

TEST(SampleMacro, PrHundredCopiesAntiCorrelation) {
  const McEstimate e = sample_macro(pr_box(), 100, VotingRule::majority(), 100000, 2024);
  const Row& r = e.macro_distribution[setting_index(1, 1)];
  const double exact = 0.9204107626128213;
  const double se = std::sqrt(exact * (1 - exact) / 100000);
  EXPECT_NEAR(r[1] + r[2], exact, 5 * se);
}

TEST(SampleMacro, UniformSingleCopy) {
  const McEstimate e = sample_macro(uniform_box(), 1, VotingRule::majority(), 1000000, 7);
  for (std::size_t s = 0; s < 4; ++s)
    for (std::size_t c = 0; c < 4; ++c) EXPECT_NEAR(e.macro_distribution[s][c], 0.25, 5 * std::sqrt(0.25 * 0.75 / 1e6));
}

TEST(McChsh, PrTwoCopies) {
  const McChsh c = mc_chsh(pr_box(), 2, VotingRule::majority(), 1000000, 99);
  EXPECT_NEAR(c.estimate, 3.0, 5 * c.standard_error);
  EXPECT_GT(c.standard_error, 0.0);
}

TEST(McChsh, AgreesWithExactEngine) {
  std::mt19937_64 rng(61);
  int inside = 0, cells = 0;
  for (int i = 0; i < 8; ++i) {
    const Box b = oracle::random_pr_heavy_box(rng);
    const int m = 2 + 4 * i;
    const McEstimate e = sample_macro(b, m, VotingRule::majority(), 20000, 100 + i);
    const Box exact = macro_box(b, m, VotingRule::majority()).box;
    for (std::size_t s = 0; s < 4; ++s)
      for (std::size_t c = 0; c < 4; ++c) {
        const double p = exact.row(s)[c];
        const double se = std::sqrt(p * (1 - p) / 20000);
        ++cells;
        inside += std::abs(e.macro_distribution[s][c] - p) <= 5 * se + 1e-15;
      }
    const McChsh c = mc_chsh(e);
    EXPECT_NEAR(c.estimate, chsh(exact).max_violation, 5 * c.standard_error + 1e-12);
  }
  EXPECT_GE(inside, cells - 1);
}
