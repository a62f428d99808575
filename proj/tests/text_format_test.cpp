#include <gtest/gtest.h>

#include "hofa/random.hpp"
#include "hofa/text_format.hpp"
#include "oracles.hpp"

using namespace hofa;

TEST(TextFormat, ParsesHeaderAndBody) {
  const Polynomial f = parse_polynomial("p=7; n=3; 3*x1^2*x3 - x2 + 3");
  EXPECT_EQ(f.field().p(), 7u);
  EXPECT_EQ(f.nvars(), 3u);
  EXPECT_EQ(f.coefficient({2, 0, 1}).value, 3u);
  EXPECT_EQ(f.coefficient({0, 1, 0}).value, 6u);
  EXPECT_EQ(f.constant_term().value, 3u);
}

TEST(TextFormat, CommentsWhitespaceAndRepeatedTerms) {
  const Polynomial f = parse_polynomial("# a comment\np = 5 ;\nn=2;\n  x1*x2 + x2*x1\n# between terms\n + 4*x1*x2\n");
  EXPECT_EQ(f, oracle::poly(5, 2, "x1*x2"));
}

TEST(TextFormat, CanonicalOutputIsGradedLexDescending) {
  const Polynomial f = parse_polynomial("p=5; n=2; 1 + x2 + x1 + x1*x2^2 + 2*x1^3");
  EXPECT_EQ(format_polynomial(f), "2*x1^3 + x1*x2^2 + x1 + x2 + 1");
  EXPECT_EQ(format_polynomial(Polynomial(FieldSpec(5), 2)), "0");
  EXPECT_EQ(format_polynomial_file(f), "p=5; n=2; 2*x1^3 + x1*x2^2 + x1 + x2 + 1");
}

TEST(TextFormat, BlockNamesRoundTrip) {
  const Polynomial t = parse_polynomial_body("x1_1*x2_2 + 3*x1_2*x2_1", FieldSpec(5), 2, 2);
  EXPECT_EQ(t, oracle::poly(5, 4, "x1*x4 + 3*x2*x3"));
  EXPECT_EQ(format_polynomial(t, 2), "x1_1*x2_2 + 3*x1_2*x2_1");
}

TEST(TextFormat, RandomRoundTrip) {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const FieldSpec F(trial % 2 ? 11 : 3);
    const Polynomial f = random_polynomial(F, 1 + trial % 4, 3, rng);
    EXPECT_EQ(parse_polynomial(format_polynomial_file(f)), f);
  }
}

namespace {
ParseError parse_failure(const std::string& text) {
  try {
    parse_polynomial(text);
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "no parse error for: " << text;
  return ParseError("", 0, 0);
}
} // namespace

TEST(TextFormat, ErrorsNameLineAndColumn) {
  const ParseError e = parse_failure("p=5; n=2;\nx1 +* x2");
  EXPECT_EQ(e.line(), 2u);
  EXPECT_EQ(e.column(), 5u);
  EXPECT_NE(std::string(e.what()).find("line 2, column 5"), std::string::npos);
}

TEST(TextFormat, RejectsMalformedInputs) {
  for (const char* bad : {"n=2; x1",            // missing p
                          "p=6; n=2; x1",       // not prime
                          "p=5; x1",            // missing n
                          "p=5; n=2; x3",       // index out of range
                          "p=5; n=2; x0",       // index out of range
                          "p=5; n=2; x1^",      // dangling exponent
                          "p=5; n=2; x1 x2",    // missing operator
                          "p=5; n=2; blocks=2; x1_1",
                          "p=5; n=2; x1 + (x2)"}) {
    EXPECT_THROW(parse_polynomial(bad), ParseError) << bad;
  }
}
