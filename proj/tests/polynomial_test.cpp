#include <gtest/gtest.h>

#include "hofa/polynomial.hpp"
#include "hofa/random.hpp"
#include "oracles.hpp"

using namespace hofa;
using oracle::poly;

TEST(Polynomial, CanonicalFormDropsZerosAndMergesTerms) {
  const FieldSpec F(5);
  Polynomial f(F, 2);
  f.add_term({1, 0}, F.element(3));
  f.add_term({1, 0}, F.element(2));
  EXPECT_TRUE(f.is_zero());
  EXPECT_FALSE(f.degree().has_value());
  f.add_term({2, 1}, F.element(-1));
  f.add_term({0, 0}, F.element(7));
  EXPECT_EQ(f.term_count(), 2u);
  EXPECT_EQ(f.degree(), 3);
  EXPECT_EQ(f.coefficient({2, 1}).value, 4u);
  EXPECT_EQ(f.constant_term().value, 2u);
}

TEST(Polynomial, RingOperationsAgreePointwise) {
  Rng rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const FieldSpec F(trial % 2 ? 5 : 7);
    const std::size_t n = 1 + trial % 3;
    const Polynomial f = random_polynomial(F, n, 3, rng);
    const Polynomial g = random_polynomial(F, n, 2, rng);
    const Polynomial sum = f + g, diff = f - g, prod = f * g, neg = -f;
    const std::uint64_t p = F.p();
    oracle::for_all(p, n, [&](const auto& x) {
      const std::uint64_t a = oracle::eval(f, x), b = oracle::eval(g, x);
      ASSERT_EQ(oracle::eval(sum, x), (a + b) % p);
      ASSERT_EQ(oracle::eval(diff, x), (a + p - b) % p);
      ASSERT_EQ(oracle::eval(prod, x), a * b % p);
      ASSERT_EQ(oracle::eval(neg, x), (p - a) % p);
      ASSERT_EQ(evaluate(f, oracle::to_point(x)).value, a);
    });
  }
}

TEST(Polynomial, MismatchedSpacesAreRejected) {
  const Polynomial f = poly(5, 2, "x1"), g = poly(7, 2, "x1"), h = poly(5, 3, "x1");
  EXPECT_THROW(f + g, PreconditionError);
  EXPECT_THROW(f * h, PreconditionError);
  EXPECT_THROW(evaluate(f, Point(3)), PreconditionError);
}

TEST(Polynomial, HomogeneousComponentsSumBack) {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const FieldSpec F(5);
    const Polynomial f = random_polynomial(F, 3, 4, rng);
    Polynomial total(F, 3);
    for (int i = 0; i <= 4; ++i) {
      const HomogeneousForm c = homogeneous_component(f, i);
      EXPECT_EQ(c.degree(), i);
      total += c.poly();
    }
    EXPECT_EQ(total, f);
    EXPECT_EQ(lower_part(f, 2) + homogeneous_component(f, 2).poly() + homogeneous_component(f, 3).poly() +
                  homogeneous_component(f, 4).poly(),
              f);
  }
}

TEST(HomogeneousForm, RejectsMixedDegreesAndZeroInOf) {
  EXPECT_THROW(HomogeneousForm(poly(5, 2, "x1*x2 + x1"), 2), PreconditionError);
  EXPECT_THROW(HomogeneousForm::of(Polynomial(FieldSpec(5), 2)), PreconditionError);
  const HomogeneousForm zero(Polynomial(FieldSpec(5), 2), 3);
  EXPECT_EQ(zero.degree(), 3);
  EXPECT_EQ(HomogeneousForm::of(poly(5, 2, "x1^2*x2 + 3*x2^3")).degree(), 3);
}

TEST(Polynomial, SubstituteComposesPointwise) {
  const FieldSpec F(7);
  const Polynomial f = poly(7, 2, "x1^2*x2 + 3*x1 + 5");
  std::vector<std::optional<Polynomial>> images(2);
  images[0] = poly(7, 3, "x1 + 2*x3");
  images[1] = poly(7, 3, "x2*x3");
  const Polynomial g = substitute(f, images, 3);
  oracle::for_all(7, 3, [&](const auto& y) {
    const std::vector<std::uint64_t> x{oracle::eval(*images[0], y), oracle::eval(*images[1], y)};
    ASSERT_EQ(oracle::eval(g, y), oracle::eval(f, x));
  });
}

TEST(Polynomial, EmbedShiftsVariables) {
  const Polynomial f = poly(5, 2, "x1*x2^2");
  EXPECT_EQ(embed(f, 4, 2), poly(5, 4, "x3*x4^2"));
}

TEST(Polynomial, FormalDerivativeIsTheGradientPairing) {
  // d_c (x1^2 x2) = 2 c1 x1 x2 + c2 x1^2, and 2*3 = 1 mod 5
  const FieldSpec F(5);
  const Polynomial f = poly(5, 2, "x1^2*x2");
  const Point c{F.element(3), F.element(4)};
  EXPECT_EQ(formal_derivative(f, c), poly(5, 2, "x1*x2 + 4*x1^2"));
  EXPECT_EQ(formal_partial(poly(5, 1, "x1^5"), 0), Polynomial(F, 1));
}

TEST(Polynomial, FormalDerivativeLeibnizRule) {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const FieldSpec F(7);
    const Polynomial f = random_polynomial(F, 2, 3, rng), g = random_polynomial(F, 2, 2, rng);
    const Point c = random_point(F, 2, rng);
    EXPECT_EQ(formal_derivative(f * g, c), formal_derivative(f, c) * g + f * formal_derivative(g, c));
  }
}

TEST(Polynomial, BlockVariableLayout) {
  EXPECT_EQ(block_variable(3, 0, 0), 0u);
  EXPECT_EQ(block_variable(3, 2, 1), 7u);
}

TEST(IteratedDerivative, MatchesPointwiseCubeSum) {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const FieldSpec F(trial % 2 ? 3 : 5);
    const std::size_t n = 1 + trial % 2;
    const int d = 1 + trial % 3;
    const Polynomial f = random_polynomial(F, n, 3, rng);
    const Polynomial dd = iterated_discrete_derivative(f, d);
    ASSERT_EQ(dd.nvars(), n * static_cast<std::size_t>(d + 1));
    oracle::for_all(F.p(), dd.nvars(), [&](const auto& pt) {
      std::vector<std::vector<std::uint64_t>> v(d);
      for (int b = 0; b < d; ++b) v[b].assign(pt.begin() + b * n, pt.begin() + (b + 1) * n);
      std::vector<std::uint64_t> x(pt.begin() + d * n, pt.end());
      ASSERT_EQ(oracle::eval(dd, pt), oracle::cube(f, v, x));
    });
  }
}

TEST(IteratedDerivative, BothConstructionsAgree) {
  Rng rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const FieldSpec F(trial % 3 == 0 ? 2 : 7);
    const Polynomial f = random_polynomial(F, 2, 4, rng);
    for (int d = 0; d <= 4; ++d)
      EXPECT_EQ(iterated_discrete_derivative_recursive(f, d), iterated_discrete_derivative_semisurjection(f, d));
  }
}

TEST(IteratedDerivative, VanishesAboveDegreeAndTopIsMultilinear) {
  const Polynomial f = poly(5, 2, "x1^2*x2 + x2^2 + 1");
  EXPECT_TRUE(iterated_discrete_derivative(f, 4).is_zero());
  // Delta^3 of a cubic is constant in the point block.
  const Polynomial d3 = iterated_discrete_derivative(f, 3);
  for (const auto& [e, c] : d3.terms())
    for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(e[block_variable(2, 3, i)], 0);
}
