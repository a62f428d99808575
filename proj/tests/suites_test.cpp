#include <gtest/gtest.h>

#include "hofa/suites.hpp"
#include "oracles.hpp"

using namespace hofa;

namespace {
void expect_all_pass(const std::vector<PropertyResult>& results) {
  ASSERT_FALSE(results.empty());
  for (const auto& r : results) {
    EXPECT_FALSE(r.counterexample.has_value()) << r.suite << '/' << r.name << ": " << r.error << '\n'
                                               << r.counterexample.value_or("");
    EXPECT_EQ(r.passed, r.trials) << r.name;
  }
}

/// Semi-surjection derivative with the coefficient of its leading term
/// bumped by one.
Polynomial flipped_derivative(const Polynomial& f, int d) {
  Polynomial r = iterated_discrete_derivative_semisurjection(f, d);
  if (r.is_zero()) return r;
  const Exponents lead = r.terms().rbegin()->first;
  r.add_term(lead, r.field().one());
  return r;
}
} // namespace

TEST(Suites, IdentitiesPass) { expect_all_pass(run_suite("identities", 40, 1)); }
TEST(Suites, InequalitiesPass) { expect_all_pass(run_suite("inequalities", 40, 2)); }
TEST(Suites, CertificatesPass) { expect_all_pass(run_suite("certificates", 40, 3)); }

TEST(Suites, SameSeedSameReport) {
  EXPECT_EQ(format_suite_csv(run_suite("all", 5, 9)), format_suite_csv(run_suite("all", 5, 9)));
}

TEST(Suites, ZeroTrialsIsVacuous) {
  for (const auto& r : run_suite("all", 0, 0)) {
    EXPECT_EQ(r.trials, 0u);
    EXPECT_FALSE(r.counterexample.has_value());
  }
  EXPECT_THROW(run_suite("everything", 1, 0), PreconditionError);
}

TEST(Suites, MutantDerivativeIsCaughtAndReplays) {
  SuiteHooks mutant;
  mutant.derivative = flipped_derivative;
  const auto results = run_suite("identities", 50, 7, mutant);
  std::size_t failures = 0;
  for (const auto& r : results) {
    if (!r.counterexample) continue;
    ++failures;
    EXPECT_TRUE(r.error.empty()) << r.error;
    // the shrunk instance still fails under the mutant and passes otherwise
    EXPECT_FALSE(replay_instance(*r.counterexample, mutant)) << *r.counterexample;
    EXPECT_TRUE(replay_instance(*r.counterexample)) << *r.counterexample;
  }
  EXPECT_GT(failures, 0u);
}

TEST(Suites, InstanceTextRoundTrip) {
  Instance inst{{oracle::poly(5, 2, "x1*x2 + 3"), oracle::poly(5, 1, "x1^2")}, {2, -1}, {FieldElement(4), FieldElement(0)}};
  const std::string text = format_instance("delta-nabla", inst);
  const auto [name, back] = parse_instance(text);
  EXPECT_EQ(name, "delta-nabla");
  EXPECT_EQ(back.polys, inst.polys);
  EXPECT_EQ(back.ints, inst.ints);
  EXPECT_EQ(back.point, inst.point);
  EXPECT_THROW(replay_instance("property=no-such-thing\n"), PreconditionError);
}
