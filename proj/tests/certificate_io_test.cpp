#include <gtest/gtest.h>

#include "hofa/certificate_io.hpp"
#include "hofa/pipelines.hpp"
#include "hofa/random.hpp"
#include "oracles.hpp"

using namespace hofa;
using oracle::poly;

namespace {
template <class Cert>
void expect_round_trip(const Cert& c) {
  const std::string text = format_certificate(c);
  const Certificate back = parse_certificate(text);
  ASSERT_TRUE(std::holds_alternative<Cert>(back)) << text;
  EXPECT_EQ(format_certificate(back), text);
  EXPECT_TRUE(verify_certificate(back)) << text;
}

ParseError parse_failure(const std::string& text) {
  try {
    parse_certificate(text);
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "accepted:\n" << text;
  return ParseError("", 0, 0);
}
} // namespace

TEST(Numbers, TwelveSignificantDigits) {
  EXPECT_EQ(format_number(0.2), "0.2");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_number(6.4e-05), "6.4e-05");
  EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
}

TEST(Reports, TextAndCsv) {
  const Report r{{"a", "1"}, {"b", "x,y"}};
  EXPECT_EQ(render(r, OutputFormat::text), "a=1\nb=x,y\n");
  EXPECT_EQ(render(r, OutputFormat::csv), "a,b\n1,\"x,y\"\n");
}

TEST(Histogram, TextRoundTrip) {
  ValueHistogram h(7);
  h.add(FieldElement(0), 5);
  h.add(FieldElement(6), 2);
  EXPECT_EQ(format_histogram(h), "0:5,6:2");
  EXPECT_EQ(parse_histogram("0:5,6:2", 7), h);
  EXPECT_THROW(parse_histogram("9:1", 7), ParseError);
}

TEST(MultilinearText, RoundTrip) {
  Rng rng(50);
  for (int trial = 0; trial < 20; ++trial) {
    const MultilinearForm t = random_multilinear(FieldSpec(5), 2, 3, {0, 2}, rng);
    const std::string text = format_multilinear(t);
    EXPECT_EQ(parse_multilinear(text), t);
  }
  EXPECT_EQ(format_multilinear(polarize(HomogeneousForm::of(poly(5, 2, "x1*x2")))),
            "p=5; n=2; blocks=2; support=1,2; x1_1*x2_2 + x1_2*x2_1");
  EXPECT_THROW(parse_multilinear("p=5; n=2; blocks=2; support=1,2; x1_1"), PreconditionError);
}

TEST(Certificates, DecompositionAndRkStarRoundTrip) {
  const auto s = search_rank(HomogeneousForm::of(poly(5, 4, "x1*x2 + x3*x4 + x1^2")), 4);
  ASSERT_TRUE(s.cert);
  expect_round_trip(*s.cert);
  expect_round_trip(rkstar_from_decomposition(*s.cert));
}

TEST(Certificates, PartitionRankAndVarietyRoundTrip) {
  const MultilinearForm t = polarize(HomogeneousForm::of(poly(5, 2, "x1^2*x2")));
  const auto s = search_partition_rank(t, 2);
  ASSERT_TRUE(s.cert);
  expect_round_trip(*s.cert);
  const VarietyCert v = variety_from_partition_rank(*s.cert);
  const std::string text = format_certificate(v);
  EXPECT_EQ(format_certificate(parse_certificate(text)), text);
}

TEST(Certificates, PipelineArtifactsRoundTrip) {
  std::map<std::string, std::string> files;
  PipelineOptions opt;
  opt.sink = [&](const std::string& name, const std::string& content) { files[name] = content; };
  const CorrelationCert c = pipeline_degree_d_plus_1(poly(5, 3, "x1*x2*x3 + x1*x2 + x3^2"), 2, {}, {}, opt);
  expect_round_trip(c);
  for (const char* name : {"g.cert", "rkstar.cert", "perturbation.cert", "correlation.cert"}) {
    ASSERT_TRUE(files.count(name)) << name;
    const Certificate back = parse_certificate(files[name]);
    EXPECT_EQ(format_certificate(back), files[name]) << name;
    EXPECT_TRUE(verify_certificate(back)) << name;
  }
}

TEST(Certificates, TamperedFilesFailVerification) {
  const std::string good =
      "kind=decomposition\np=5\nn=3\ndegree=3\nbound=1\ntarget=x1*x2*x3\nfactor=x3 | x1*x2\n";
  EXPECT_TRUE(verify_certificate(parse_certificate(good)));
  std::string bad = good;
  bad.replace(bad.find("x3 |"), 2, "x2");
  EXPECT_FALSE(verify_certificate(parse_certificate(bad)));
}

TEST(Certificates, ParseErrorsPointAtTheLine) {
  const ParseError unknown = parse_failure("kind=decomposition\np=5\nn=3\ncolour=red\n");
  EXPECT_EQ(unknown.line(), 4u);
  const ParseError body = parse_failure(
      "kind=decomposition\np=5\nn=3\ndegree=3\nbound=1\ntarget=x1*x2*x3\nfactor=x3 | x1*x9\n");
  EXPECT_EQ(body.line(), 7u);
  EXPECT_GT(body.column(), 8u);
  const ParseError no_bar = parse_failure(
      "kind=decomposition\np=5\nn=3\ndegree=3\nbound=1\ntarget=x1*x2*x3\nfactor=x3 x1*x2\n");
  EXPECT_EQ(no_bar.line(), 7u);
  parse_failure("kind=banana\n");
  parse_failure("p=5\n");
  parse_failure("kind=decomposition\np=five\n");
}
