#ifndef HOFA_RKSTAR_HPP
#define HOFA_RKSTAR_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hofa/bias.hpp"
#include "hofa/error.hpp"
#include "hofa/linalg.hpp"
#include "hofa/polynomial.hpp"
#include "hofa/rank.hpp"

namespace hofa {

struct PolyPair {
  Polynomial alpha;
  Polynomial beta;
};

/// target = sum alpha_i beta_i, a witness for rk*(target) <= length.
struct RkStarCert {
  Polynomial target;
  std::vector<PolyPair> factors;
  std::size_t length() const { return factors.size(); }
};

namespace detail {

/// Rank of the linear parts of the given degree-1 polynomials.
inline std::size_t linear_part_rank(const std::vector<const Polynomial*>& polys) {
  if (polys.empty()) return 0;
  const FieldSpec& F = polys.front()->field();
  const std::size_t n = polys.front()->nvars();
  Matrix m(polys.size(), n);
  for (std::size_t r = 0; r < polys.size(); ++r)
    for (const auto& [e, c] : polys[r]->terms())
      if (total_degree(e) == 1)
        for (std::size_t i = 0; i < n; ++i)
          if (e[i]) m.at(r, i) = c;
  return rank(m, F);
}

} // namespace detail

/// Checks, in order: degree conditions (alpha, beta nonzero,
/// deg alpha <= deg beta < k, deg(alpha beta) <= k, and a constant alpha
/// only against deg beta <= k - 2), the exact sum, and affine independence
/// of the degree-1 alphas of the full-degree terms.
inline Verdict validate_rkstar(const RkStarCert& cert) {
  const Degree k = cert.target.degree();
  for (std::size_t i = 0; i < cert.factors.size(); ++i) {
    const auto& [a, b] = cert.factors[i];
    const std::string which = " in factor " + std::to_string(i + 1);
    cert.target.check_compatible(a);
    cert.target.check_compatible(b);
    if (a.is_zero() || b.is_zero()) return Verdict::fail("degree violation" + which + ": zero factor");
    const int da = *a.degree(), db = *b.degree();
    if (!k || da > db || db >= *k || da + db > *k)
      return Verdict::fail("degree violation" + which);
    if (da == 0 && db > *k - 2)
      return Verdict::fail("degree violation" + which + ": constant factor against degree above k-2");
  }
  Polynomial sum(cert.target.field(), cert.target.nvars());
  for (const auto& [a, b] : cert.factors) sum += a * b;
  if (!(sum == cert.target)) return Verdict::fail("sum mismatch");

  std::vector<const Polynomial*> affine;
  for (const auto& [a, b] : cert.factors)
    if (*a.degree() == 1 && *a.degree() + *b.degree() == *k) affine.push_back(&a);
  if (detail::linear_part_rank(affine) != affine.size()) return Verdict::fail("affine dependence");
  return Verdict::pass();
}

/// A rank decomposition of a form, compressed so its alphas are linearly
/// independent, read as an rk* certificate.
inline RkStarCert rkstar_from_decomposition(const DecompositionCert& cert) {
  const DecompositionCert c = compress_decomposition(cert);
  RkStarCert out{c.target.poly(), {}};
  for (const auto& [a, b] : c.factors) out.factors.push_back({a.poly(), b.poly()});
  return out;
}

namespace detail {
inline RkStarCert checked_output(RkStarCert cert, const char* stage) {
  if (Verdict v = validate_rkstar(cert); !v)
    throw StageError(stage, "produced an invalid rk* certificate: " + v.reason);
  return cert;
}
} // namespace detail

/// rk*(g + h) <= rk*(g) + rk*(h) for deg g != deg h: concatenation.
inline RkStarCert combine_subadditive(const RkStarCert& c1, const RkStarCert& c2) {
  if (!c1.target.is_zero() && !c2.target.is_zero() && c1.target.degree() == c2.target.degree())
    throw PreconditionError("subadditivity requires distinct degrees");
  for (const RkStarCert* c : {&c1, &c2})
    if (Verdict v = validate_rkstar(*c); !v)
      throw PreconditionError("invalid rk* certificate: " + v.reason);
  RkStarCert out{c1.target + c2.target, c1.factors};
  out.factors.insert(out.factors.end(), c2.factors.begin(), c2.factors.end());
  return detail::checked_output(std::move(out), "subadditivity");
}

/// rk*(g + d_c g) <= 2 rk(g) from
/// g + d_c g = sum (a_i + d_c a_i)(b_i + d_c b_i) - sum (d_c a_i)(d_c b_i).
/// The input must be compressed (linearly independent same-degree alphas).
inline RkStarCert derive_invariance_transform(const DecompositionCert& cert,
                                              std::span<const FieldElement> c) {
  if (Verdict v = verify_decomposition(cert); !v)
    throw PreconditionError("invalid decomposition certificate: " + v.reason);
  if (cert.target.is_zero()) throw PreconditionError("derivation invariance needs a nonzero target");
  DecompositionCert oriented = cert;
  for (auto& pair : oriented.factors)
    if (pair.alpha.degree() > pair.beta.degree()) std::swap(pair.alpha, pair.beta);
  if (compress_decomposition(oriented).length() != oriented.length())
    throw PreconditionError("decomposition is not compressed; run compress_decomposition first");

  const Polynomial& g = cert.target.poly();
  RkStarCert out{g + formal_derivative(g, c), {}};
  std::vector<PolyPair> second;
  for (const auto& [a, b] : oriented.factors) {
    const Polynomial da = formal_derivative(a.poly(), c);
    const Polynomial db = formal_derivative(b.poly(), c);
    out.factors.push_back({a.poly() + da, b.poly() + db});
    if (!da.is_zero() && !db.is_zero()) second.push_back({-da, db});
  }
  out.factors.insert(out.factors.end(), second.begin(), second.end());
  return detail::checked_output(std::move(out), "derivation invariance");
}

/// rk*(g + h) <= 2 rk(g) + rk*(h - d_c g), where g is the top-degree part.
/// hc_cert certifies h - d_c g.
inline RkStarCert chain_rule_combine(const DecompositionCert& g_cert, const RkStarCert& hc_cert,
                                     std::span<const FieldElement> c) {
  const Polynomial& g = g_cert.target.poly();
  if (g.is_zero()) {
    if (!hc_cert.target.is_zero() || !hc_cert.factors.empty())
      if (Verdict v = validate_rkstar(hc_cert); !v)
        throw PreconditionError("invalid rk* certificate: " + v.reason);
    return hc_cert;
  }
  if (!hc_cert.target.is_zero() && hc_cert.target.degree() >= g.degree())
    throw PreconditionError("chain rule needs deg g > deg(h - d_c g)");
  const RkStarCert shifted = derive_invariance_transform(compress_decomposition(g_cert), c);
  RkStarCert out = combine_subadditive(shifted, hc_cert);
  // (g + d_c g) + (h - d_c g) = g + h
  return detail::checked_output(std::move(out), "chain rule");
}

/// Witness for f - c0 = sum lambda_i A_i with P(Z(A)) >= p^(-m).
struct PerturbationCert {
  RkStarCert source;
  int k = 0;
  std::vector<std::size_t> affine_group;  // deg alpha = 1 and deg(alpha beta) = k
  std::vector<std::size_t> rest_group;    // the other t factors
  std::vector<FieldElement> y;            // per factor (0 on the affine group)
  std::vector<FieldElement> z;            // per rest-group factor
  std::vector<Polynomial> generators;     // A_1..A_m (zero ones dropped)
  std::vector<Polynomial> multipliers;    // lambda_1..lambda_m
  FieldElement c0;
  std::uint64_t zero_count = 0;           // |Z(A)|
  std::size_t m() const { return generators.size(); }
};

/// Checks the ideal-membership witness, 1 <= deg A_i <= k - 2, m <= 2r, and
/// |Z(A)| >= p^(n-m) by enumeration.
inline Verdict verify_perturbation(const PerturbationCert& pc, const Budget& budget = {}) {
  const Polynomial& f = pc.source.target;
  const FieldSpec& F = f.field();
  if (pc.generators.size() != pc.multipliers.size())
    return Verdict::fail("generator and multiplier counts differ");
  if (pc.m() > 2 * pc.source.length()) return Verdict::fail("more than 2r generators");
  Polynomial rhs(F, f.nvars());
  for (std::size_t i = 0; i < pc.m(); ++i) {
    const Degree deg = pc.generators[i].degree();
    if (!deg || *deg < 1 || *deg > pc.k - 2)
      return Verdict::fail("generator " + std::to_string(i + 1) + " has degree outside [1, k-2]");
    rhs += pc.multipliers[i] * pc.generators[i];
  }
  if (!(rhs == f - Polynomial::constant(F, f.nvars(), pc.c0)))
    return Verdict::fail("ideal membership witness mismatch");
  const ZeroSetReport z = zero_set(pc.generators, f.nvars(), F, budget);
  if (z.count != pc.zero_count) return Verdict::fail("recorded zero count is wrong");
  if (z.count == 0) return Verdict::fail("empty zero set");
  if (pc.m() < f.nvars() && z.count < *checked_power(F.p(), f.nvars() - pc.m()))
    return Verdict::fail("zero set density below p^(-m)");
  return Verdict::pass();
}

/// The perturbation construction: with the affine group vanishing, fix the
/// most popular value tuple (y, z) of the rest group's (alpha_i, beta_i)
/// (exact argmax, ties to the lexicographically smallest tuple) and write
/// f = sum (alpha_i - y_i) beta_i + sum y_i (beta_i - z_i) + sum y_i z_i.
/// `k` is the nominal degree (>= deg f, >= 3); by default deg f.
inline PerturbationCert perturbation(const RkStarCert& cert, std::optional<int> nominal_k = {},
                                     const Budget& budget = {}) {
  const Polynomial& f = cert.target;
  const int k = nominal_k.value_or(f.degree().value_or(0));
  if (k < 3) throw PreconditionError("perturbation requires degree >= 3");
  if (f.degree() > k) throw PreconditionError("nominal degree below deg f");
  if (Verdict v = validate_rkstar(cert); !v)
    throw PreconditionError("invalid rk* certificate: " + v.reason);
  const FieldSpec& F = f.field();
  const std::uint32_t p = F.p();
  const std::size_t n = f.nvars();
  const std::size_t r = cert.length();

  PerturbationCert pc;
  pc.source = cert;
  pc.k = k;
  for (std::size_t i = 0; i < r; ++i) {
    const auto& [a, b] = cert.factors[i];
    const bool affine = *a.degree() == 1 && *a.degree() + *b.degree() == k;
    (affine ? pc.affine_group : pc.rest_group).push_back(i);
  }

  domain_size(p, n, budget, "perturbation");
  std::vector<CompiledPolynomial> affine_alpha, rest_alpha, rest_beta;
  for (auto i : pc.affine_group) affine_alpha.emplace_back(cert.factors[i].alpha);
  for (auto i : pc.rest_group) {
    rest_alpha.emplace_back(cert.factors[i].alpha);
    rest_beta.emplace_back(cert.factors[i].beta);
  }
  const std::size_t t = pc.rest_group.size();
  std::map<std::vector<std::uint32_t>, std::uint64_t> popularity;
  std::vector<std::uint32_t> tuple(2 * t);
  for_each_point(p, n, [&](std::span<const std::uint32_t> x) {
    for (const auto& a : affine_alpha)
      if (a(x) != 0) return;
    for (std::size_t j = 0; j < t; ++j) {
      tuple[j] = rest_alpha[j](x);
      tuple[t + j] = rest_beta[j](x);
    }
    ++popularity[tuple];
  });
  if (popularity.empty()) throw Error("affine factors have no common zero");
  auto best = popularity.begin();
  for (auto it = popularity.begin(); it != popularity.end(); ++it)
    if (it->second > best->second) best = it;
  const auto& values = best->first;

  pc.y.assign(r, F.zero());
  pc.z.assign(t, F.zero());
  for (std::size_t j = 0; j < t; ++j) {
    pc.y[pc.rest_group[j]] = FieldElement(values[j]);
    pc.z[j] = FieldElement(values[t + j]);
  }
  pc.c0 = F.zero();
  for (std::size_t j = 0; j < t; ++j) pc.c0 = F.add(pc.c0, F.mul(pc.y[pc.rest_group[j]], pc.z[j]));

  auto push = [&](Polynomial gen, Polynomial lambda) {
    if (gen.is_zero()) return;
    pc.generators.push_back(std::move(gen));
    pc.multipliers.push_back(std::move(lambda));
  };
  for (std::size_t i = 0; i < r; ++i)
    push(cert.factors[i].alpha - Polynomial::constant(F, n, pc.y[i]), cert.factors[i].beta);
  for (std::size_t j = 0; j < t; ++j) {
    const std::size_t i = pc.rest_group[j];
    push(cert.factors[i].beta - Polynomial::constant(F, n, pc.z[j]),
         Polynomial::constant(F, n, pc.y[i]));
  }
  pc.zero_count = best->second;
  if (Verdict v = verify_perturbation(pc, budget); !v) throw StageError("perturbation", v.reason);
  return pc;
}

/// A lower-degree polynomial P correlating with f, with the exact bias of
/// f - P and the floor the producing argument guarantees.
struct CorrelationCert {
  Polynomial f;
  Polynomial P;
  int degree_bound = 0;   // deg P <= degree_bound
  ValueHistogram histogram;  // of f - P
  double exact_bias = 0;
  double claimed_floor = 0;
  std::vector<std::string> provenance;
};

inline Verdict verify_correlation(const CorrelationCert& cert, const Budget& budget = {}) {
  if (cert.P.degree() > cert.degree_bound) return Verdict::fail("deg P exceeds the declared bound");
  const BiasReport b = bias_exact(cert.f - cert.P, budget);
  if (!(b.histogram == cert.histogram)) return Verdict::fail("histogram of f - P does not match");
  if (std::abs(b.magnitude - cert.exact_bias) > kBiasTolerance)
    return Verdict::fail("exact bias does not match");
  if (b.magnitude + kBiasTolerance < cert.claimed_floor)
    return Verdict::fail("exact bias below claimed floor");
  return Verdict::pass();
}

/// An echelon basis (as polynomials) of the span of the given polynomials.
inline std::vector<Polynomial> span_basis(std::span<const Polynomial> polys) {
  if (polys.empty()) return {};
  const FieldSpec& F = polys.front().field();
  const std::size_t n = polys.front().nvars();
  std::map<Exponents, std::size_t, GradedLexLess> cols;
  for (const auto& q : polys)
    for (const auto& [e, c] : q.terms()) cols.try_emplace(e, 0);
  std::vector<Exponents> monos;
  for (auto& [e, idx] : cols) {
    idx = monos.size();
    monos.push_back(e);
  }
  Matrix m(polys.size(), monos.size());
  for (std::size_t r = 0; r < polys.size(); ++r)
    for (const auto& [e, c] : polys[r].terms()) m.at(r, cols.at(e)) = c;
  const Echelon ech = row_reduce(m, F);
  std::vector<Polynomial> basis;
  for (std::size_t r = 0; r < ech.rank(); ++r)
    basis.push_back(detail::from_coordinates(F, n, monos, ech.reduced.row(r)));
  return basis;
}

/// Correlation from a perturbation: sweeps the span of the generators (equal to
/// {sum c_i A_i : c in F_p^m}) for P maximizing bias(f - P).
/// deg P <= k - 2 and bias(f - P) >= p^(-m).
inline CorrelationCert lower_degree_correlation(const PerturbationCert& pc,
                                                const Budget& budget = {}) {
  const Polynomial& f = pc.source.target;
  const FieldSpec& F = f.field();
  const std::vector<Polynomial> basis = span_basis(pc.generators);
  SweepResult s = sweep_combinations(f, basis, budget, "lower-degree correlation");
  CorrelationCert cert;
  cert.f = f;
  cert.P = std::move(s.combination);
  cert.degree_bound = pc.k - 2;
  cert.exact_bias = s.bias.magnitude;
  cert.histogram = std::move(s.bias.histogram);
  cert.claimed_floor = std::pow(static_cast<double>(F.p()), -static_cast<double>(pc.m()));
  cert.provenance.push_back("lower-degree-correlation m=" + std::to_string(pc.m()) +
                            " span=" + std::to_string(basis.size()));
  if (cert.exact_bias + kBiasTolerance < cert.claimed_floor)
    throw StageError("lower-degree correlation", "bias(f - P) below p^(-m)");
  if (cert.P.degree() > cert.degree_bound)
    throw StageError("lower-degree correlation", "deg P exceeds k - 2");
  return cert;
}

} // namespace hofa

#endif // HOFA_RKSTAR_HPP
