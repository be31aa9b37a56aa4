#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "macrobell/closed_form.hpp"
#include "oracles.hpp"

using namespace macrobell;

namespace {

// Entries each case leaves free, in (alpha, beta, delta, gamma) order.
constexpr bool kFree[8][4] = {{},
                              {true, false, false, true},
                              {false, true, true, false},
                              {true, true, true, false},
                              {false, true, true, true},
                              {true, false, true, true},
                              {true, true, false, true},
                              {true, true, true, true}};

CaseParams random_case(std::mt19937_64& rng, int case_id) {
  std::gamma_distribution<double> g(1.0, 1.0);
  Row r{};
  double total = 0.0;
  for (std::size_t c = 0; c < 4; ++c)
    if (kFree[case_id][c]) total += (r[c] = g(rng));
  for (auto& v : r) v /= total;
  return {r[0], r[1], r[2], r[3]};
}

bool error_code_is(ErrorCode want, const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code() == want;
  }
  return false;
}

}  // namespace

TEST(ClosedForm, CaseTwoMiddleTermIsBinomial) {
  const CaseParams half{0, 0.5, 0.5, 0};
  EXPECT_NEAR(closed_form_case(2, half, 2), 0.5, 1e-15);
  EXPECT_NEAR(closed_form_as_printed(2, half, 2), 0.5, 1e-15);
  EXPECT_NEAR(enumerated_a(half, 2), 0.5, 1e-15);
  // M = 4 separates the readings.
  EXPECT_NEAR(enumerated_a(half, 4), 0.625, 1e-15);
  EXPECT_NEAR(closed_form_case(2, half, 4), 0.625, 1e-15);
  EXPECT_NEAR(closed_form_as_printed(2, half, 4), 0.25, 1e-15);
  const Row brute = oracle::brute_force_row(half.as_row(), 4, VotingRule::majority());
  EXPECT_NEAR(brute[1] + brute[2], 0.625, 1e-15);
}

TEST(ClosedForm, Examples) {
  EXPECT_EQ(closed_form_case(1, {0.3, 0, 0, 0.7}, 50), 0.0);
  EXPECT_NEAR(enumerated_a({0.3, 0, 0, 0.7}, 50), 0.0, 1e-15);
  const CaseParams c2{0, 0.4, 0.6, 0};
  EXPECT_NEAR(closed_form_case(2, c2, 100), 0.9896624887461524, 1e-12);
  EXPECT_NEAR(enumerated_a(c2, 100), closed_form_case(2, c2, 100), 1e-9);
}

TEST(ClosedForm, AgreesWithEnumeratorOnRandomParameters) {
  std::mt19937_64 rng(41);
  for (int id = 1; id <= 7; ++id)
    for (int draw = 0; draw < 20; ++draw) {
      const CaseParams p = random_case(rng, id);
      for (int m = 2; m <= 40; m += 2) EXPECT_NEAR(closed_form_case(id, p, m), enumerated_a(p, m), 1e-10) << "case " << id << " M=" << m;
    }
}

TEST(ClosedForm, PrintedSumsOfCasesFourAndSevenAreOff) {
  const CaseParams c7{0.2, 0.3, 0.3, 0.2};
  EXPECT_GT(std::abs(closed_form_as_printed(7, c7, 4) - enumerated_a(c7, 4)), 1e-3);
  const CaseParams c4{0, 0.2, 0.2, 0.6};
  EXPECT_GT(std::abs(closed_form_as_printed(4, c4, 4) - enumerated_a(c4, 4)), 1e-3);
  // The printed forms of the remaining cases are exact.
  const CaseParams c3{0.4, 0.3, 0.3, 0}, c5{0.25, 0, 0.5, 0.25}, c6{0.25, 0.5, 0, 0.25};
  for (int m = 2; m <= 20; m += 2) {
    EXPECT_NEAR(closed_form_as_printed(3, c3, m), enumerated_a(c3, m), 1e-12);
    EXPECT_NEAR(closed_form_as_printed(5, c5, m), enumerated_a(c5, m), 1e-12);
    EXPECT_NEAR(closed_form_as_printed(6, c6, m), enumerated_a(c6, m), 1e-12);
  }
}

TEST(ClosedForm, Errors) {
  EXPECT_TRUE(error_code_is(ErrorCode::OddM, [] { closed_form_case(2, {0, 0.5, 0.5, 0}, 3); }));
  EXPECT_TRUE(error_code_is(ErrorCode::BadParams, [] { closed_form_case(2, {0.1, 0.4, 0.5, 0}, 4); }));
  EXPECT_TRUE(error_code_is(ErrorCode::BadParams, [] { closed_form_case(7, {0.2, 0.4, 0.4, 0.2}, 4); }));
  EXPECT_TRUE(error_code_is(ErrorCode::BadParams, [] { closed_form_case(8, {0.25, 0.25, 0.25, 0.25}, 4); }));
  EXPECT_TRUE(error_code_is(ErrorCode::BadParams, [] { closed_form_case(7, {-0.1, 0.5, 0.3, 0.3}, 4); }));
}
