#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "hofa/multilinear.hpp"
#include "hofa/random.hpp"
#include "oracles.hpp"

using namespace hofa;
using oracle::poly;

TEST(Polarize, WorkedExamples) {
  // x1 x2 -> x1 y2 + y1 x2, x1^2 -> 2 x1 y1 (blocks of two variables)
  const MultilinearForm a = polarize(HomogeneousForm::of(poly(5, 2, "x1*x2")));
  EXPECT_EQ(a.poly(), poly(5, 4, "x1*x4 + x3*x2"));
  const MultilinearForm b = polarize(HomogeneousForm::of(poly(5, 2, "x1^2")));
  EXPECT_EQ(b.poly(), poly(5, 4, "2*x1*x3"));
}

TEST(Polarize, MatchesSymmetrizedMultilinearOracle) {
  // g~(v_1..v_k) = sum over sigma of the coefficient tensor: for a monomial
  // x_{i_1}...x_{i_k}, sum over orderings of its variable list.
  Rng rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const FieldSpec F(7);
    const std::size_t n = 2;
    const int k = 1 + trial % 4;
    const HomogeneousForm g = random_nonzero_form(F, n, k, rng);
    const MultilinearForm t = polarize(g);
    Polynomial expect(F, n * k);
    for (const auto& [e, c] : g.poly().terms()) {
      std::vector<std::size_t> vars;
      for (std::size_t i = 0; i < n; ++i)
        for (int r = 0; r < e[i]; ++r) vars.push_back(i);
      std::vector<int> order(k);
      std::iota(order.begin(), order.end(), 0);
      do {
        Exponents m(n * k, 0);
        for (int b = 0; b < k; ++b) m[block_variable(n, b, vars[order[b]])] += 1;
        expect.add_term(m, c);
      } while (std::next_permutation(order.begin(), order.end()));
    }
    EXPECT_EQ(t.poly(), expect);
  }
}

TEST(Polarize, DifferenceConstructionAgreesWithPermutations) {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const FieldSpec F(trial % 2 ? 11 : 13);
    const HomogeneousForm g = random_nonzero_form(F, 2, 2 + trial % 4, rng);
    EXPECT_EQ(polarize_by_permutations(g), polarize_by_differences(g));
  }
}

TEST(Polarize, DiagonalRoundTripAndDepolarize) {
  Rng rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    const FieldSpec F(trial % 2 ? 5 : 7);
    const int k = 1 + trial % 4;
    const HomogeneousForm g = random_nonzero_form(F, 1 + trial % 3, k, rng);
    EXPECT_EQ(diagonal(polarize(g)), g.poly().scaled(F.factorial(static_cast<unsigned>(k))));
    EXPECT_EQ(depolarize(polarize(g), k).poly(), g.poly());
  }
  const HomogeneousForm cube = HomogeneousForm::of(poly(3, 1, "x1^3"));
  EXPECT_TRUE(diagonal(polarize(cube)).is_zero());  // 3! = 0 in F_3
  EXPECT_THROW(depolarize(polarize(cube), 3), PreconditionError);
}

TEST(MultilinearForm, RejectsNonMultilinearPolynomials) {
  EXPECT_THROW(MultilinearForm::on_all_blocks(poly(5, 4, "x1*x2"), 2, 2), PreconditionError);
  EXPECT_THROW(MultilinearForm::on_all_blocks(poly(5, 4, "x1"), 2, 2), PreconditionError);
  EXPECT_NO_THROW(MultilinearForm(poly(5, 4, "x1 + 2*x2"), 2, 2, {0}));
}

TEST(MultilinearForm, LinearInEachBlock) {
  Rng rng(14);
  for (int trial = 0; trial < 30; ++trial) {
    const FieldSpec F(5);
    const MultilinearForm t = random_multilinear(F, 2, 3, rng);
    BlockPoint x{random_point(F, 2, rng), random_point(F, 2, rng), random_point(F, 2, rng)};
    const Point y = random_point(F, 2, rng);
    const FieldElement a = random_element(F, rng);
    for (std::size_t b = 0; b < 3; ++b) {
      BlockPoint mixed = x, only_y = x;
      for (std::size_t i = 0; i < 2; ++i) mixed[b][i] = F.add(F.mul(a, x[b][i]), y[i]);
      only_y[b] = y;
      EXPECT_EQ(evaluate(t, mixed), F.add(F.mul(a, evaluate(t, x)), evaluate(t, only_y)));
    }
  }
}

TEST(BlockDerivative, DeltaNablaOnWorkedExample) {
  // g = x1 x2^2, c = (1, 2) over F_5: d_c g = x2^2 + 4 x1 x2
  const HomogeneousForm g = HomogeneousForm::of(poly(5, 2, "x1*x2^2"));
  const FieldSpec F(5);
  const Point c{F.element(1), F.element(2)};
  EXPECT_EQ(formal_derivative(g, c).poly(), poly(5, 2, "x2^2 + 4*x1*x2"));
  EXPECT_TRUE(check_delta_nabla(g, c));
  EXPECT_EQ(block_derivative(polarize(g), c), polarize(formal_derivative(g, c)));
}

TEST(BlockDerivative, DeltaNablaRandom) {
  Rng rng(15);
  for (int trial = 0; trial < 60; ++trial) {
    const FieldSpec F(trial % 2 ? 5 : 7);
    const std::size_t n = 1 + trial % 3;
    const HomogeneousForm g = random_nonzero_form(F, n, 1 + trial % 4, rng);
    EXPECT_TRUE(check_delta_nabla(g, random_point(F, n, rng)));
  }
}

TEST(BlockDerivative, GradientAndPermutation) {
  const MultilinearForm t = polarize(HomogeneousForm::of(poly(5, 2, "x1*x2")));
  const auto grad = block_gradient(t);
  ASSERT_EQ(grad.size(), 2u);
  EXPECT_EQ(grad[0].poly(), poly(5, 2, "x2"));
  EXPECT_EQ(grad[1].poly(), poly(5, 2, "x1"));
  const std::vector<int> swap{1, 0};
  EXPECT_EQ(permute_blocks(t, swap), t);
  const MultilinearForm u = MultilinearForm::on_all_blocks(poly(5, 4, "x1*x4"), 2, 2);
  EXPECT_EQ(permute_blocks(u, swap).poly(), poly(5, 4, "x3*x2"));
  const std::vector<int> bad{0, 0};
  EXPECT_THROW(permute_blocks(u, bad), PreconditionError);
}

TEST(DerivativePolarization, ExhaustiveOnCubicForms) {
  // Delta_{v1,v2} g(x) = g~(v1, v2, x + (v1 + v2)/2) for deg g = 3.
  Rng rng(16);
  const FieldSpec F(5);
  for (int trial = 0; trial < 3; ++trial) {
    const HomogeneousForm g = random_nonzero_form(F, 2, 3, rng);
    const MultilinearForm gt = polarize(g);
    oracle::for_all(5, 6, [&](const auto& pt) {
      const std::vector<std::vector<std::uint64_t>> v{{pt[0], pt[1]}, {pt[2], pt[3]}};
      const std::vector<std::uint64_t> x{pt[4], pt[5]};
      const Point dirs[2] = {oracle::to_point(v[0]), oracle::to_point(v[1])};
      ASSERT_EQ(dd_via_polarization(gt, dirs, oracle::to_point(x)).value, oracle::cube(g.poly(), v, x));
    });
  }
  EXPECT_THROW(dd_via_polarization(HomogeneousForm::of(poly(2, 1, "x1")), {}, Point{FieldElement(0)}),
               PreconditionError);
}
