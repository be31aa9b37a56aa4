#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "macrobell/io.hpp"
#include "oracles.hpp"

using namespace macrobell;

namespace {

ErrorCode parse_error_code(const std::string& text) {
  try {
    io::parse_table(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::MismatchDetected;  // sentinel: nothing thrown
}

}  // namespace

TEST(Io, Fmt) {
  EXPECT_EQ(io::fmt(0.1), "0.10000000000000001");
  EXPECT_EQ(io::fmt(-0.0), "0");
  EXPECT_EQ(io::fmt(2.0), "2");
  EXPECT_EQ(std::stod(io::fmt(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Io, BoxRoundTripIsExact) {
  std::mt19937_64 rng(81);
  for (int i = 0; i < 100; ++i) {
    const Box b = oracle::random_pr_heavy_box(rng);
    const Box back = io::parse_box(io::box_to_json(b));
    EXPECT_EQ(back.table(), b.table());
  }
}

TEST(Io, Schema) {
  const std::string pr = io::box_to_json(pr_box());
  EXPECT_EQ(pr.rfind("{\n  \"P\": [", 0), 0u);
  EXPECT_EQ(io::parse_table(pr), pr_box().table());
}

TEST(Io, RejectsMalformedInput) {
  EXPECT_EQ(parse_error_code("not json"), ErrorCode::ParseError);
  EXPECT_EQ(parse_error_code("[1,2]"), ErrorCode::ParseError);
  EXPECT_EQ(parse_error_code(R"({"Q": []})"), ErrorCode::ParseError);
  EXPECT_EQ(parse_error_code(R"({"P": [[1,0,0,0],[1,0,0,0],[1,0,0,0],[1,0,0,0]], "extra": 1})"), ErrorCode::ParseError);
  EXPECT_EQ(parse_error_code(R"({"P": [[1,0,0,0],[1,0,0,0],[1,0,0,0]]})"), ErrorCode::ParseError);
  EXPECT_EQ(parse_error_code(R"({"P": [[1,0,0],[1,0,0,0],[1,0,0,0],[1,0,0,0]]})"), ErrorCode::ParseError);
  EXPECT_EQ(parse_error_code(R"({"P": [[1,0,0,"0"],[1,0,0,0],[1,0,0,0],[1,0,0,0]]})"), ErrorCode::ParseError);
  // Well-formed but signaling: parses, then make_box rejects it.
  const std::string signaling = R"({"P": [[1,0,0,0],[0,0,0,1],[1,0,0,0],[1,0,0,0]]})";
  EXPECT_NO_THROW(io::parse_table(signaling));
  EXPECT_THROW(io::parse_box(signaling), Error);
}

TEST(Io, CertificateKeyOrder) {
  const MembershipVerdict v = is_local(pr_box());
  ASSERT_TRUE(v.certificate);
  const io::Json j = io::certificate_to_json(*v.certificate);
  std::vector<std::string> keys;
  for (const auto& [k, _] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"kind", "weights", "facet", "violation"}));
  EXPECT_EQ(j["kind"], "FacetViolation");
  EXPECT_EQ(j["facet"], 0);
  EXPECT_NEAR(j["violation"].get<double>(), 2.0, 1e-12);

  const MembershipVerdict loc = is_local(deterministic_vertex(2, 1));
  ASSERT_TRUE(loc.certificate);
  const io::Json lj = io::certificate_to_json(*loc.certificate);
  EXPECT_EQ(lj["kind"], "LocalDecomposition");
  EXPECT_EQ(lj["weights"].size(), 16u);
  EXPECT_EQ(lj["weights"].begin().key(), "D1_0");
}

TEST(Io, TraceCsv) {
  std::ostringstream os;
  io::write_trace_csv(os, macro_chsh_trace(pr_box(), {2, 4}, VotingRule::majority()));
  EXPECT_EQ(os.str(),
            "M,I_chsh,A00,A01,A10,A11\n"
            "2,3,0,0,0,0.5\n"
            "4,3.2500000000000009,0,0,0,0.62500000000000011\n");
}

TEST(Io, McTraceCsv) {
  std::ostringstream os;
  io::write_mc_trace_csv(os, {{2, sample_macro(pr_box(), 2, VotingRule::majority(), 1000, 5)}});
  const std::string s = os.str();
  EXPECT_EQ(s.substr(0, s.find('\n')),
            "M,I_chsh,A00,A01,A10,A11,stderr_I_chsh,stderr_A00,stderr_A01,stderr_A10,stderr_A11");
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 2);
  EXPECT_EQ(std::count(s.begin(), s.end(), ','), 20);
}

TEST(Io, GridCsv) {
  std::ostringstream os;
  io::write_grid_csv(os, fig6_grid({0, 0.4, 0, 1, 2, 3}));
  EXPECT_EQ(os.str(),
            "p1,y,F\n"
            "0,0,0\n"
            "0,0.5,-0.5\n"
            "0,1,0\n"
            "0.40000000000000002,0,0.16000000000000003\n"
            "0.40000000000000002,0.5,0.060000000000000053\n"
            "0.40000000000000002,1,0.96000000000000019\n");
}
