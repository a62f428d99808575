#include <gtest/gtest.h>

#include <cmath>

#include "hofa/bias.hpp"
#include "hofa/random.hpp"
#include "oracles.hpp"

using namespace hofa;
using oracle::poly;

TEST(Bias, ExactMatchesDirectSum) {
  Rng rng(1);
  for (int trial = 0; trial < 40; ++trial) {
    const FieldSpec F(trial % 3 == 0 ? 3 : (trial % 3 == 1 ? 5 : 7));
    const Polynomial f = random_polynomial(F, 1 + trial % 3, 3, rng);
    const BiasReport b = bias_exact(f);
    const auto direct = oracle::character_mean(f);
    EXPECT_NEAR(b.magnitude, std::abs(direct), 1e-9);
    EXPECT_NEAR(b.bias_complex.real(), direct.real(), 1e-9);
    EXPECT_NEAR(b.bias_complex.imag(), direct.imag(), 1e-9);
  }
}

TEST(Bias, TrivialValues) {
  EXPECT_EQ(bias_exact(poly(5, 1, "x1")).magnitude, 0.0);
  EXPECT_EQ(bias_exact(poly(5, 2, "3")).magnitude, 1.0);
  for (std::uint32_t p : {3u, 5u, 7u, 11u, 13u})
    EXPECT_NEAR(bias_exact(poly(p, 1, "x1^2 + x1")).magnitude, 1.0 / std::sqrt(double(p)), 1e-9);
}

TEST(Bias, ThreadCountDoesNotChangeHistogram) {
  const Polynomial f = poly(7, 5, "x1*x2*x3 + x4^2*x5 + 3*x1");
  set_thread_count(1);
  const ValueHistogram one = bias_exact(f).histogram;
  set_thread_count(5);
  const ValueHistogram five = bias_exact(f).histogram;
  set_thread_count(0);
  EXPECT_EQ(one, five);
}

TEST(Bias, SampledIsDeterministicAndWithinHalfWidth) {
  const Polynomial f = poly(5, 3, "x1*x2 + x3^2");
  const BiasReport a = bias_sampled(f, 20000, 42), b = bias_sampled(f, 20000, 42);
  EXPECT_EQ(a.histogram, b.histogram);
  EXPECT_LE(std::abs(a.magnitude - oracle::bias(f)), a.half_width);
  EXPECT_THROW(bias_sampled(f, 10, 1), PreconditionError);
}

TEST(Bias, BudgetErrorNamesFeasibleEnvelope) {
  try {
    bias_exact(poly(3, 30, "x1"), Budget{1000});
    FAIL();
  } catch (const BudgetError& e) {
    EXPECT_NE(std::string(e.what()).find("feasible"), std::string::npos);
  }
}

TEST(Gowers, MatchesDefinition) {
  Rng rng(3);
  for (int trial = 0; trial < 12; ++trial) {
    const FieldSpec F(trial % 2 ? 3 : 5);
    const int d = 1 + trial % 3;
    const Polynomial f = random_polynomial(F, 1, 3, rng);
    const GowersReport g = gowers_norm(f, d);
    EXPECT_NEAR(g.derivative.magnitude, oracle::gowers_power(f, d), 1e-9);
    EXPECT_NEAR(g.norm, std::pow(oracle::gowers_power(f, d), 1.0 / (1 << d)), 1e-9);
  }
}

TEST(Gowers, MonotoneInOrderAndOneAtHighOrder) {
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const Polynomial f = random_polynomial(FieldSpec(5), 1, 3, rng);
    double prev = gowers_norm(f, 1).norm;
    for (int d = 2; d <= 4; ++d) {
      const double cur = gowers_norm(f, d).norm;
      EXPECT_GE(cur + 1e-9, prev);
      prev = cur;
    }
    EXPECT_NEAR(gowers_norm(f, 4).norm, 1.0, 1e-9);  // deg f <= 3 < 4
  }
}

TEST(Gowers, QuadraticPhaseExample) {
  // Delta^2 (x^2 + x) = 2 v1 v2, and E e(2 v1 v2 / 5) = P(v1 = 0) = 1/5.
  const GowersReport g = gowers_norm(poly(5, 1, "x1^2 + x1"), 2);
  EXPECT_NEAR(g.derivative.magnitude, 0.2, 1e-12);
  EXPECT_NEAR(g.norm, std::pow(0.2, 0.25), 1e-12);
}

TEST(AnalyticRank, InfiniteOnFlatAndNonnegative) {
  const MultilinearForm lin(poly(3, 2, "x1"), 1, 2, {0});
  EXPECT_TRUE(analytic_rank(lin).infinite);
  const MultilinearForm t = MultilinearForm::on_all_blocks(poly(3, 2, "x1*x2"), 1, 2);
  const AnalyticRank ar = analytic_rank(t);
  EXPECT_FALSE(ar.infinite);
  EXPECT_NEAR(ar.value, 1.0, 1e-12);  // bias of xy over F_3 is 1/3
}

TEST(ZeroSet, CountsAndContainment) {
  const FieldSpec F(5);
  const std::vector<Polynomial> as{poly(5, 2, "x1"), poly(5, 2, "x2^2")};
  const ZeroSetReport z = zero_set(as, 2, F);
  EXPECT_EQ(z.count, 1u);
  std::uint64_t brute = 0;
  oracle::for_all(5, 2, [&](const auto& x) { brute += oracle::eval(as[0], x) == 0 && oracle::eval(as[1], x) == 0; });
  EXPECT_EQ(z.count, brute);
  const std::vector<Polynomial> small{poly(5, 2, "x1")}, big{poly(5, 2, "x1*x2")};
  EXPECT_FALSE(find_outside(small, big, F, 2).has_value());
  const auto w = find_outside(big, small, F, 2);
  ASSERT_TRUE(w.has_value());
  EXPECT_EQ(oracle::eval(big[0], oracle::to_u64(*w)), 0u);
  EXPECT_NE(oracle::eval(small[0], oracle::to_u64(*w)), 0u);
}

TEST(Identities, AverageCorrelationAndBiasChainRule) {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const FieldSpec F(trial % 2 ? 3 : 5);
    const std::size_t n = 1 + trial % 3;
    const Polynomial g = random_polynomial(F, n, 3, rng);
    const std::vector<Polynomial> as{random_polynomial(F, n, 2, rng), random_polynomial(F, n, 1, rng)};
    EXPECT_TRUE(check_avg_correlation_identity(g, as));
  }
  for (int trial = 0; trial < 30; ++trial) {
    const FieldSpec F(trial % 2 ? 3 : 5);
    // a(x, y) = x1 b1(y) + x2 b2(y), b(y) arbitrary, x = (x1, x2), y = (x3, x4)
    const Polynomial b1 = embed(random_polynomial(F, 2, 2, rng), 4, 2);
    const Polynomial b2 = embed(random_polynomial(F, 2, 1, rng), 4, 2);
    const Polynomial a = Polynomial::variable(F, 4, 0) * b1 + Polynomial::variable(F, 4, 1) * b2;
    const Polynomial b = embed(random_polynomial(F, 2, 2, rng), 4, 2);
    EXPECT_TRUE(check_bias_chain_rule(a, b, 2));
  }
}

TEST(Correlation, CorBelowMatchesBruteForceOverAffine) {
  Rng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const FieldSpec F(3);
    const Polynomial f = random_polynomial(F, 2, 3, rng);
    double best = 0;
    oracle::for_all(3, 3, [&](const auto& c) {
      const Polynomial P = poly(3, 2, std::to_string(c[0]) + " + " + std::to_string(c[1]) + "*x1 + " +
                                          std::to_string(c[2]) + "*x2");
      best = std::max(best, oracle::bias(f - P));
    });
    EXPECT_NEAR(cor_below(f, 2).value, best, 1e-9);
    EXPECT_NEAR(correlation(f, cor_below(f, 2).argmax), best, 1e-9);
    EXPECT_TRUE(check_easy_direction(f, 2));
  }
}

TEST(Correlation, DeriveBiasBoundsHold) {
  Rng rng(7);
  for (int trial = 0; trial < 15; ++trial) {
    const FieldSpec F(5);
    const Polynomial f = random_polynomial(F, 2, 3, rng);
    const DeriveBiasResult r = derive_bias_bounds(f, 2);
    EXPECT_TRUE(r.ok());
    EXPECT_NEAR(r.derivative_bias, oracle::bias(iterated_discrete_derivative_recursive(f, 2)), 1e-9);
  }
  EXPECT_THROW(derive_bias_bounds(poly(5, 1, "x1^4"), 2), PreconditionError);
}

TEST(Correlation, ZeroSetDensityFloor) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const FieldSpec F(3);
    const std::vector<Polynomial> as{random_polynomial(F, 3, 2, rng), random_polynomial(F, 3, 1, rng)};
    EXPECT_TRUE(check_warning(as, 3, F));
  }
}
