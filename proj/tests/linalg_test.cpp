#include <gtest/gtest.h>

#include "hofa/linalg.hpp"
#include "hofa/random.hpp"
#include "oracles.hpp"

using namespace hofa;

namespace {
Matrix random_matrix(const FieldSpec& F, std::size_t r, std::size_t c, Rng& rng) {
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m.at(i, j) = random_element(F, rng);
  return m;
}

std::vector<std::vector<std::uint64_t>> rows_of(const Matrix& m) {
  std::vector<std::vector<std::uint64_t>> out(m.rows(), std::vector<std::uint64_t>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m.at(i, j).value;
  return out;
}
} // namespace

TEST(Linalg, RankMatchesKernelCount) {
  Rng rng(4);
  for (int trial = 0; trial < 60; ++trial) {
    const FieldSpec F(trial % 3 == 0 ? 2 : (trial % 3 == 1 ? 3 : 5));
    const std::size_t r = 1 + uniform_below(rng, 5), c = 1 + uniform_below(rng, 5);
    Matrix m = random_matrix(F, r, c, rng);
    if (trial % 4 == 0 && r > 1)  // force a dependent row
      for (std::size_t j = 0; j < c; ++j) m.at(r - 1, j) = F.mul(F.element(2), m.at(0, j));
    EXPECT_EQ(rank(m, F), oracle::rank_by_kernel(rows_of(m), F.p()));
  }
}

TEST(Linalg, ReducedEchelonShape) {
  const FieldSpec F(7);
  Rng rng(8);
  const Echelon e = row_reduce(random_matrix(F, 4, 6, rng), F);
  for (std::size_t i = 0; i < e.rank(); ++i) {
    EXPECT_EQ(e.reduced.at(i, e.pivots[i]).value, 1u);
    for (std::size_t k = 0; k < e.reduced.rows(); ++k) {
      if (k != i) {
        EXPECT_EQ(e.reduced.at(k, e.pivots[i]).value, 0u);
      }
    }
    if (i) {
      EXPECT_LT(e.pivots[i - 1], e.pivots[i]);
    }
  }
}

TEST(Linalg, SolveFindsSolutionsOrReportsNone) {
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const FieldSpec F(5);
    const Matrix a = random_matrix(F, 4, 3, rng);
    std::vector<FieldElement> x0(3);
    for (auto& v : x0) v = random_element(F, rng);
    std::vector<FieldElement> b(4, F.zero());
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 3; ++j) b[i] = F.add(b[i], F.mul(a.at(i, j), x0[j]));
    const auto x = solve(a, b, F);
    ASSERT_TRUE(x.has_value());
    for (std::size_t i = 0; i < 4; ++i) {
      FieldElement s = F.zero();
      for (std::size_t j = 0; j < 3; ++j) s = F.add(s, F.mul(a.at(i, j), (*x)[j]));
      EXPECT_EQ(s, b[i]);
    }
  }
  Matrix a(2, 1);
  a.at(0, 0) = FieldElement(1);
  a.at(1, 0) = FieldElement(1);
  EXPECT_FALSE(solve(a, std::vector<FieldElement>{FieldElement(1), FieldElement(2)}, FieldSpec(5)).has_value());
}
