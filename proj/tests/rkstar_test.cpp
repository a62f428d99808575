#include <gtest/gtest.h>

#include <cmath>

#include "hofa/random.hpp"
#include "hofa/rkstar.hpp"
#include "oracles.hpp"

using namespace hofa;
using oracle::poly;

namespace {
HomogeneousForm form(std::uint32_t p, std::size_t n, const std::string& body) {
  return HomogeneousForm::of(poly(p, n, body));
}

RkStarCert cert(const Polynomial& target, std::vector<std::pair<std::string, std::string>> pairs) {
  RkStarCert c{target, {}};
  for (const auto& [a, b] : pairs)
    c.factors.push_back({poly(target.field().p(), target.nvars(), a), poly(target.field().p(), target.nvars(), b)});
  return c;
}
} // namespace

TEST(RkStar, AcceptsAValidCertificate) {
  const Polynomial f = poly(5, 3, "x1*x2*x3 + x1^2");
  EXPECT_TRUE(validate_rkstar(cert(f, {{"x1", "x2*x3"}, {"x1", "x1"}})));
}

TEST(RkStar, RejectionsNameTheViolatedCondition) {
  const Polynomial f = poly(5, 3, "x1*x2*x3");
  const Verdict full = validate_rkstar(cert(f, {{"1", "x1*x2*x3"}}));
  EXPECT_FALSE(full);
  EXPECT_NE(full.reason.find("degree violation"), std::string::npos);
  EXPECT_FALSE(validate_rkstar(cert(f, {{"x1", "x2"}})));  // sum mismatch
  // a constant alpha is allowed only against deg beta <= k - 2
  EXPECT_TRUE(validate_rkstar(cert(poly(5, 3, "x1*x2*x3 + x1"), {{"x1", "x2*x3"}, {"1", "x1"}})));
  EXPECT_FALSE(validate_rkstar(cert(poly(5, 3, "x1*x2*x3 + x1*x2"), {{"x1", "x2*x3"}, {"1", "x1*x2"}})));
  // degree-1 alphas of full-degree terms must be affinely independent
  const Verdict dep = validate_rkstar(
      cert(poly(5, 3, "x1*x2*x3 + 2*x1*x3^2 + x3^2"), {{"x1", "x2*x3"}, {"2*x1 + 1", "x3^2"}}));
  EXPECT_FALSE(dep);
  EXPECT_EQ(dep.reason, "affine dependence");
}

TEST(RkStar, LinearPhaseInDegreeThreeHasFiniteRkStar) {
  // A(x) + l(y) with deg A = 3: 2y = (y+1)(y+1) - y y + (x+1)(x-1) - x x, so
  // x^3 + 2y has a certificate of length 5 even though its bias is 0.
  const Polynomial f = poly(5, 2, "x1^3 + 2*x2");
  const RkStarCert c = cert(f, {{"x1", "x1^2"}, {"x2 + 1", "x2 + 1"}, {"-x2", "x2"},
                                {"x1 + 1", "x1 - 1"}, {"-x1", "x1"}});
  EXPECT_TRUE(validate_rkstar(c));
  EXPECT_EQ(c.length(), 5u);
  EXPECT_NEAR(oracle::bias(f), 0.0, 1e-12);
}

TEST(RkStar, QuadraticPlusLinearRejectsTheSameTrick) {
  // for deg A = 2 the pieces (y+1)(y+1), -y y have full degree and alphas that
  // are affinely dependent
  const Polynomial f = poly(5, 2, "x1^2 + 2*x2");
  EXPECT_FALSE(validate_rkstar(cert(f, {{"x1", "x1"}, {"x2 + 1", "x2 + 1"}, {"-x2", "x2"}, {"-1", "1"}})));
  EXPECT_FALSE(validate_rkstar(cert(f, {{"x1", "x1"}, {"2", "x2"}})));
}

TEST(RkStar, FromDecompositionIsValid) {
  Rng rng(40);
  for (int trial = 0; trial < 30; ++trial) {
    const FieldSpec F(trial % 2 ? 5 : 7);
    DecompositionCert d{HomogeneousForm(Polynomial(F, 3), 3), {}};
    Polynomial g(F, 3);
    for (int i = 0; i < 2; ++i) {
      HomogeneousForm a = random_nonzero_form(F, 3, 1, rng), b = random_nonzero_form(F, 3, 2, rng);
      g += a.poly() * b.poly();
      d.factors.push_back({a, b});
    }
    if (g.is_zero()) continue;
    d.target = HomogeneousForm(g, 3);
    const RkStarCert r = rkstar_from_decomposition(d);
    EXPECT_TRUE(validate_rkstar(r));
    EXPECT_LE(r.length(), 2u);
  }
}

TEST(Transforms, DerivationInvarianceAndSubadditivity) {
  const FieldSpec F(5);
  const HomogeneousForm g = form(5, 3, "x1*x2*x3");
  DecompositionCert d{g, {{form(5, 3, "x1"), form(5, 3, "x2*x3")}}};
  const Point c{F.element(1), F.element(2), F.element(3)};
  const RkStarCert t = derive_invariance_transform(d, c);
  EXPECT_TRUE(validate_rkstar(t));
  EXPECT_EQ(t.target, g.poly() + formal_derivative(g.poly(), c));
  EXPECT_LE(t.length(), 2u);

  const RkStarCert low = cert(poly(5, 3, "x1*x2 + x3^2"), {{"x1", "x2"}, {"x3", "x3"}});
  const RkStarCert sum = combine_subadditive(t, low);
  EXPECT_EQ(sum.length(), t.length() + low.length());
  EXPECT_TRUE(validate_rkstar(sum));
  EXPECT_THROW(combine_subadditive(low, low), PreconditionError);
}

TEST(Transforms, ChainRuleCombine) {
  // f = g + h with g = x1 x2 x3, h = x1 x2; hc = h - d_c g
  const FieldSpec F(5);
  const HomogeneousForm g = form(5, 3, "x1*x2*x3");
  const Point c{F.element(0), F.element(0), F.element(1)};
  DecompositionCert gc{g, {{form(5, 3, "x1"), form(5, 3, "x2*x3")}}};
  const Polynomial hc = poly(5, 3, "x1*x2") - formal_derivative(g.poly(), c);
  ASSERT_TRUE(hc.is_zero());
  const RkStarCert out = chain_rule_combine(gc, RkStarCert{hc, {}}, c);
  EXPECT_EQ(out.target, poly(5, 3, "x1*x2*x3 + x1*x2"));
  EXPECT_TRUE(validate_rkstar(out));
  EXPECT_LE(out.length(), 2u);
}

TEST(Perturbation, DensityCountedByBruteForce) {
  Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const FieldSpec F(5);
    DecompositionCert d{HomogeneousForm(Polynomial(F, 2), 3), {}};
    Polynomial g(F, 2);
    for (int i = 0; i < 1 + trial % 2; ++i) {
      HomogeneousForm a = random_nonzero_form(F, 2, 1, rng), b = random_nonzero_form(F, 2, 2, rng);
      g += a.poly() * b.poly();
      d.factors.push_back({a, b});
    }
    if (g.is_zero()) continue;
    d.target = HomogeneousForm(g, 3);
    const RkStarCert r = rkstar_from_decomposition(d);
    const PerturbationCert pc = perturbation(r);
    EXPECT_TRUE(verify_perturbation(pc));
    EXPECT_LE(pc.m(), 2 * r.length());
    std::uint64_t zeros = 0;
    oracle::for_all(5, 2, [&](const auto& x) {
      for (const auto& a : pc.generators)
        if (oracle::eval(a, x)) return;
      ++zeros;
    });
    EXPECT_EQ(zeros, pc.zero_count);
    EXPECT_GE(static_cast<double>(zeros) / 25.0 + 1e-12, std::pow(5.0, -static_cast<double>(pc.m())));
    // f - c0 = sum lambda_i A_i
    Polynomial rhs(F, 2);
    for (std::size_t i = 0; i < pc.m(); ++i) rhs += pc.multipliers[i] * pc.generators[i];
    EXPECT_EQ(g - Polynomial::constant(F, 2, pc.c0), rhs);

    const CorrelationCert cc = lower_degree_correlation(pc);
    EXPECT_TRUE(verify_correlation(cc));
    EXPECT_LE(cc.P.degree().value_or(0), 1);
    EXPECT_NEAR(cc.exact_bias, oracle::bias(g - cc.P), 1e-9);
    EXPECT_GE(cc.exact_bias + 1e-9, cc.claimed_floor);
  }
}

TEST(Perturbation, RejectsLowDegreeAndTampering) {
  const RkStarCert quad = cert(poly(5, 2, "x1*x2"), {{"x1", "x2"}});
  EXPECT_THROW(perturbation(quad), PreconditionError);
  const RkStarCert cubic = cert(poly(5, 2, "x1^2*x2"), {{"x1", "x1*x2"}});
  PerturbationCert pc = perturbation(cubic);
  ASSERT_TRUE(verify_perturbation(pc));
  pc.zero_count += 1;
  EXPECT_FALSE(verify_perturbation(pc));
}

TEST(Correlation, SpanBasisDropsDependents) {
  const std::vector<Polynomial> ps{poly(5, 2, "x1 + x2"), poly(5, 2, "2*x1 + 2*x2"), poly(5, 2, "x2")};
  EXPECT_EQ(span_basis(ps).size(), 2u);
}
