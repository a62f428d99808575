#include <gtest/gtest.h>

#include "hofa/random.hpp"
#include "hofa/rank.hpp"
#include "oracles.hpp"

using namespace hofa;
using oracle::poly;

namespace {
HomogeneousForm form(std::uint32_t p, std::size_t n, const std::string& body) {
  return HomogeneousForm::of(poly(p, n, body));
}

MultilinearForm bilinear_from(const std::vector<std::vector<std::uint64_t>>& m, const FieldSpec& F) {
  const std::size_t r = m.size(), c = m[0].size(), n = std::max(r, c);
  Polynomial t(F, 2 * n);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) {
      Exponents e(2 * n, 0);
      e[i] = 1;
      e[n + j] = 1;
      t.add_term(e, F.element(static_cast<std::int64_t>(m[i][j])));
    }
  return MultilinearForm::on_all_blocks(std::move(t), n, 2);
}
} // namespace

TEST(Decomposition, VerifierChecksSumAndDegrees) {
  const HomogeneousForm g = form(5, 3, "x1*x2*x3");
  DecompositionCert ok{g, {{form(5, 3, "x3"), form(5, 3, "x1*x2")}}};
  EXPECT_TRUE(verify_decomposition(ok));
  DecompositionCert wrong_sum{g, {{form(5, 3, "x2"), form(5, 3, "x1*x2")}}};
  EXPECT_FALSE(verify_decomposition(wrong_sum));
  DecompositionCert full_degree{g, {{HomogeneousForm(poly(5, 3, "1"), 0), g}}};
  EXPECT_FALSE(verify_decomposition(full_degree));
}

TEST(SearchRank, KnownForms) {
  const auto one = search_rank(form(5, 3, "x1*x2*x3"), 3);
  ASSERT_EQ(one.status, SearchStatus::found);
  EXPECT_EQ(one.cert->length(), 1u);
  EXPECT_TRUE(verify_decomposition(*one.cert));

  // x1^2 + x2^2 = (x1 + 2 x2)(x1 - 2 x2) over F_5, irreducible over F_7
  EXPECT_EQ(search_rank(form(5, 2, "x1^2 + x2^2"), 2).cert->length(), 1u);
  EXPECT_EQ(search_rank(form(7, 2, "x1^2 + x2^2"), 2).cert->length(), 2u);

  const auto two = search_rank(form(3, 4, "x1*x2 + x3*x4"), 1);
  EXPECT_EQ(two.status, SearchStatus::proven_absent);
  EXPECT_EQ(search_rank(form(3, 4, "x1*x2 + x3*x4"), 4).cert->length(), 2u);
}

TEST(SearchRank, NodeBudgetGivesInconclusive) {
  const auto r = search_rank(form(5, 4, "x1*x2 + x3*x4"), 4, 1);
  EXPECT_EQ(r.status, SearchStatus::inconclusive);
  EXPECT_FALSE(r.cert.has_value());
}

TEST(SearchRank, RandomLowRankTargetsRecoverValidCertificates) {
  Rng rng(30);
  for (int trial = 0; trial < 20; ++trial) {
    const FieldSpec F(trial % 2 ? 3 : 5);
    Polynomial g(F, 3);
    const int r = 1 + trial % 2;
    for (int i = 0; i < r; ++i)
      g += random_nonzero_form(F, 3, 1, rng).poly() * random_nonzero_form(F, 3, 2, rng).poly();
    if (g.is_zero()) continue;
    const auto res = search_rank(HomogeneousForm(g, 3), 3);
    ASSERT_EQ(res.status, SearchStatus::found);
    EXPECT_LE(res.cert->length(), static_cast<std::size_t>(r));
    EXPECT_TRUE(verify_decomposition(*res.cert));
  }
}

TEST(PartitionRank, BilinearEqualsMatrixRank) {
  Rng rng(31);
  for (int trial = 0; trial < 25; ++trial) {
    const FieldSpec F(trial % 3 == 0 ? 3 : (trial % 3 == 1 ? 5 : 7));
    const std::size_t rows = 1 + uniform_below(rng, 4), cols = 1 + uniform_below(rng, 4);
    std::vector<std::vector<std::uint64_t>> m(rows, std::vector<std::uint64_t>(cols));
    for (auto& row : m)
      for (auto& v : row) v = uniform_below(rng, F.p());
    const std::size_t expect = oracle::rank_by_kernel(m, F.p());
    const MultilinearForm t = bilinear_from(m, F);
    const auto res = search_partition_rank(t, t.n());
    if (expect == 0) {
      EXPECT_TRUE(res.cert && res.cert->length() == 0);
      continue;
    }
    ASSERT_EQ(res.status, SearchStatus::found);
    EXPECT_EQ(res.cert->length(), expect);
    EXPECT_TRUE(verify_decomposition(*res.cert));
    EXPECT_TRUE(check_ar_pr_inequality(t, *res.cert));
    EXPECT_EQ(detail::bilinear_partition_rank(t).length(), expect);
    if (expect > 1) {
      EXPECT_EQ(search_partition_rank(t, expect - 1).status, SearchStatus::proven_absent);
    }
  }
}

TEST(PartitionRank, TrilinearCertificatesVerifyAndBoundAnalyticRank) {
  Rng rng(32);
  for (int trial = 0; trial < 10; ++trial) {
    const FieldSpec F(3);
    const MultilinearForm t = random_multilinear(F, 2, 3, rng);
    const auto res = search_partition_rank(t, 2);
    if (!res.cert) continue;
    EXPECT_TRUE(verify_decomposition(*res.cert));
    if (!t.is_zero()) {
      EXPECT_TRUE(check_ar_pr_inequality(t, *res.cert));
    }
    for (const auto& term : res.cert->terms) {
      EXPECT_FALSE(term.part.empty());
      EXPECT_LT(term.part.size(), t.support().size());
    }
  }
}

TEST(PartitionRank, VerifierRejectsTamperedTerm) {
  const MultilinearForm t = polarize(form(5, 2, "x1*x2"));
  auto res = search_partition_rank(t, 2);
  ASSERT_TRUE(res.cert);
  PartitionRankCert bad = *res.cert;
  bad.terms[0].q = bad.terms[0].q.scaled(FieldElement(2));
  EXPECT_FALSE(verify_decomposition(bad));
}

TEST(Compress, MergesDependentAlphas) {
  const HomogeneousForm g = form(5, 2, "x1*x2 + 2*x1*x2");
  DecompositionCert c{g, {{form(5, 2, "x1"), form(5, 2, "x2")}, {form(5, 2, "2*x1"), form(5, 2, "x2")}}};
  ASSERT_TRUE(verify_decomposition(c));
  const DecompositionCert out = compress_decomposition(c);
  EXPECT_EQ(out.length(), 1u);
  EXPECT_TRUE(verify_decomposition(out));
}

TEST(Compress, DecompositionFromPartitionRank) {
  const HomogeneousForm g = form(5, 2, "x1*x2 + x2^2");
  const MultilinearForm t = polarize(g);
  const auto res = search_partition_rank(t, 2);
  ASSERT_TRUE(res.cert);
  const DecompositionCert d = decomposition_from_partition_rank(*res.cert);
  EXPECT_TRUE(verify_decomposition(d));
  EXPECT_EQ(d.target.poly(), g.poly());
  EXPECT_LE(d.length(), res.cert->length());
}
