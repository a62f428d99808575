#ifndef HOFA_RANK_HPP
#define HOFA_RANK_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hofa/bias.hpp"
#include "hofa/error.hpp"
#include "hofa/linalg.hpp"
#include "hofa/multilinear.hpp"
#include "hofa/polynomial.hpp"

namespace hofa {

/// Outcome of a check that can fail for a stated reason.
struct Verdict {
  bool ok = true;
  std::string reason;
  explicit operator bool() const { return ok; }
  static Verdict pass() { return {}; }
  static Verdict fail(std::string why) { return {false, std::move(why)}; }
};

struct FactorPair {
  HomogeneousForm alpha;
  HomogeneousForm beta;
};

/// target = sum alpha_i beta_i with both factor degrees below deg target.
struct DecompositionCert {
  HomogeneousForm target;
  std::vector<FactorPair> factors;
  std::size_t length() const { return factors.size(); }
};

/// One term R(x_I) Q(x_{support \ I}) of a partition-rank decomposition.
struct PartitionTerm {
  std::vector<int> part;  // I, 0-based block indices
  MultilinearForm r;      // supported on I
  MultilinearForm q;      // supported on the rest of the target's support
};

struct PartitionRankCert {
  MultilinearForm target;
  std::vector<PartitionTerm> terms;
  std::size_t length() const { return terms.size(); }
};

/// Multilinear forms S_1..S_m on `blocks` blocks of n variables whose joint
/// zero set is claimed to lie inside another variety.
struct VarietyCert {
  FieldSpec field{2};
  std::size_t n = 0;
  std::size_t blocks = 0;
  std::vector<MultilinearForm> forms;
};

inline Verdict verify_decomposition(const DecompositionCert& cert) {
  const int k = cert.target.degree();
  Polynomial sum(cert.target.field(), cert.target.nvars());
  for (std::size_t i = 0; i < cert.factors.size(); ++i) {
    const auto& [a, b] = cert.factors[i];
    if (a.nvars() != sum.nvars() || b.nvars() != sum.nvars() || !(a.field() == sum.field()) ||
        !(b.field() == sum.field()))
      return Verdict::fail("factor " + std::to_string(i + 1) + " lives in a different space");
    if (a.degree() >= k || b.degree() >= k || a.degree() + b.degree() != k)
      return Verdict::fail("degree violation in factor " + std::to_string(i + 1));
    sum += a.poly() * b.poly();
  }
  if (!(sum == cert.target.poly())) return Verdict::fail("sum mismatch");
  return Verdict::pass();
}

inline Verdict verify_decomposition(const PartitionRankCert& cert) {
  const MultilinearForm& t = cert.target;
  Polynomial sum(t.field(), t.poly().nvars());
  for (std::size_t i = 0; i < cert.terms.size(); ++i) {
    const auto& term = cert.terms[i];
    const std::string which = "term " + std::to_string(i + 1);
    std::vector<int> part = term.part;
    std::sort(part.begin(), part.end());
    if (part.empty() || part.size() >= t.support().size())
      return Verdict::fail(which + ": block set must be a proper nonempty subset");
    if (!std::includes(t.support().begin(), t.support().end(), part.begin(), part.end()))
      return Verdict::fail(which + ": block set outside the target support");
    std::vector<int> rest;
    std::set_difference(t.support().begin(), t.support().end(), part.begin(), part.end(),
                        std::back_inserter(rest));
    for (const MultilinearForm* f : {&term.r, &term.q})
      if (f->n() != t.n() || f->blocks() != t.blocks() || !(f->field() == t.field()))
        return Verdict::fail(which + ": factor has a different block layout");
    if (term.r.support() != part) return Verdict::fail(which + ": R not supported on I");
    if (term.q.support() != rest) return Verdict::fail(which + ": Q not supported on the complement");
    sum += term.r.poly() * term.q.poly();
  }
  if (!(sum == t.poly())) return Verdict::fail("sum mismatch");
  return Verdict::pass();
}

namespace detail {

/// Exponent vectors of total degree exactly a in n variables, increasing
/// graded-lex order.
inline std::vector<Exponents> monomials_of_degree(std::size_t n, int a) {
  std::vector<Exponents> out;
  Exponents e(n, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
    if (i + 1 == n) {
      e[i] = static_cast<std::uint16_t>(left);
      out.push_back(e);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      e[i] = static_cast<std::uint16_t>(v);
      rec(i + 1, left - v);
    }
  };
  if (n == 0) {
    if (a == 0) out.push_back(e);
    return out;
  }
  rec(0, a);
  std::sort(out.begin(), out.end(), GradedLexLess{});
  return out;
}

/// Monomials of multilinear forms on the given blocks: one coordinate from
/// each block, in increasing graded-lex order.
inline std::vector<Exponents> multilinear_monomials(std::size_t n, std::size_t blocks,
                                                    const std::vector<int>& on) {
  std::vector<Exponents> out;
  Exponents e(n * blocks, 0);
  std::function<void(std::size_t)> rec = [&](std::size_t j) {
    if (j == on.size()) {
      out.push_back(e);
      return;
    }
    for (std::size_t i = 0; i < n; ++i) {
      e[block_variable(n, on[j], i)] = 1;
      rec(j + 1);
      e[block_variable(n, on[j], i)] = 0;
    }
  };
  rec(0);
  std::sort(out.begin(), out.end(), GradedLexLess{});
  return out;
}

inline Polynomial from_coordinates(const FieldSpec& F, std::size_t nvars,
                                   const std::vector<Exponents>& basis,
                                   std::span<const FieldElement> coords) {
  Polynomial p(F, nvars);
  for (std::size_t i = 0; i < basis.size(); ++i) p.add_term(basis[i], coords[i]);
  return p;
}

/// A family of factors whose first members are fixed and whose partners
/// range over the span of `partner_basis`.
struct FactorClass {
  std::vector<Polynomial> fixed;
  const std::vector<Exponents>* partner_basis;
};

/// Solves target = sum_c sum_j fixed[c][j] * partner[c][j] for the partners.
inline std::optional<std::vector<std::vector<Polynomial>>> solve_partners(
    const Polynomial& target, const std::vector<FactorClass>& classes) {
  const FieldSpec& F = target.field();
  std::map<Exponents, std::size_t, GradedLexLess> rows;
  auto row_of = [&](const Exponents& e) {
    auto [it, inserted] = rows.try_emplace(e, rows.size());
    return it->second;
  };
  for (const auto& [e, c] : target.terms()) row_of(e);
  struct Entry {
    std::size_t row, col;
    FieldElement value;
  };
  std::vector<Entry> entries;
  std::size_t col = 0;
  Exponents prod;
  for (const auto& cls : classes)
    for (const auto& f : cls.fixed)
      for (const auto& m : *cls.partner_basis) {
        for (const auto& [e, c] : f.terms()) {
          prod = e;
          for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = static_cast<std::uint16_t>(prod[i] + m[i]);
          entries.push_back({row_of(prod), col, c});
        }
        ++col;
      }
  Matrix a(rows.size(), col);
  for (const auto& en : entries) a.at(en.row, en.col) = F.add(a.at(en.row, en.col), en.value);
  std::vector<FieldElement> b(rows.size(), F.zero());
  for (const auto& [e, c] : target.terms()) b[rows.at(e)] = c;
  auto x = solve(a, b, F);
  if (!x) return std::nullopt;
  std::vector<std::vector<Polynomial>> partners;
  std::size_t at = 0;
  for (const auto& cls : classes) {
    auto& out = partners.emplace_back();
    for (std::size_t j = 0; j < cls.fixed.size(); ++j) {
      const auto& basis = *cls.partner_basis;
      out.push_back(from_coordinates(F, target.nvars(), basis,
                                     std::span<const FieldElement>(x->data() + at, basis.size())));
      at += basis.size();
    }
  }
  return partners;
}

/// Calls visit(dims) for every way of writing total as an ordered sum of
/// classes.size() nonnegative parts bounded by caps, lexicographically
/// decreasing in the first part. Stops when visit returns false.
inline bool for_each_composition(std::size_t total, const std::vector<std::size_t>& caps,
                                 const std::function<bool(const std::vector<std::size_t>&)>& visit) {
  std::vector<std::size_t> dims(caps.size(), 0);
  std::function<bool(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t left) {
    if (i + 1 == caps.size()) {
      if (left > caps[i]) return true;
      dims[i] = left;
      return visit(dims);
    }
    for (std::size_t v = std::min(left, caps[i]) + 1; v-- > 0;) {
      dims[i] = v;
      if (!rec(i + 1, left - v)) return false;
    }
    return true;
  };
  if (caps.empty()) return total == 0 ? visit(dims) : true;
  return rec(0, total);
}

} // namespace detail

enum class SearchStatus { found, proven_absent, inconclusive };

inline const char* to_string(SearchStatus s) {
  switch (s) {
  case SearchStatus::found: return "found";
  case SearchStatus::proven_absent: return "proven_absent";
  default: return "inconclusive";
  }
}

template <class Cert>
struct SearchResult {
  SearchStatus status = SearchStatus::inconclusive;
  std::optional<Cert> cert;
  std::uint64_t nodes = 0;  // linear systems solved
};

namespace detail {

/// Shared engine: each class has a space of candidate first factors (given
/// by a monomial basis); lengths r = r_min..r_max are tried in order, and for
/// each split of r across classes every tuple of echelon-form subspaces is
/// tried, with the partners solved jointly. Returns the partners of the
/// first success together with the chosen bases.
struct ClassSpace {
  std::vector<Exponents> first_basis;
  std::vector<Exponents> partner_basis;
};

struct EngineHit {
  std::vector<std::vector<Polynomial>> fixed;
  std::vector<std::vector<Polynomial>> partners;
};

inline SearchStatus run_engine(const Polynomial& target, const std::vector<ClassSpace>& spaces,
                               std::size_t r_min, std::size_t r_max, std::uint64_t max_nodes,
                               std::uint64_t& nodes, std::optional<EngineHit>& hit) {
  const FieldSpec& F = target.field();
  std::vector<std::size_t> caps;
  for (const auto& s : spaces) caps.push_back(s.first_basis.size());
  bool out_of_budget = false;

  for (std::size_t r = r_min; r <= r_max; ++r) {
    const bool keep_going = for_each_composition(r, caps, [&](const std::vector<std::size_t>& dims) {
      std::vector<FactorClass> classes(spaces.size());
      for (std::size_t c = 0; c < spaces.size(); ++c) classes[c].partner_basis = &spaces[c].partner_basis;
      std::function<bool(std::size_t)> rec = [&](std::size_t c) -> bool {
        if (c == spaces.size()) {
          if (nodes >= max_nodes) {
            out_of_budget = true;
            return false;
          }
          ++nodes;
          auto partners = solve_partners(target, classes);
          if (!partners) return true;
          EngineHit h;
          for (auto& cls : classes) h.fixed.push_back(cls.fixed);
          h.partners = std::move(*partners);
          hit = std::move(h);
          return false;
        }
        return for_each_echelon_subspace(F, caps[c], dims[c], [&](const Matrix& basis) {
          classes[c].fixed.clear();
          for (std::size_t i = 0; i < basis.rows(); ++i)
            classes[c].fixed.push_back(
                from_coordinates(F, target.nvars(), spaces[c].first_basis, basis.row(i)));
          return rec(c + 1);
        });
      };
      return rec(0);
    });
    if (hit) return SearchStatus::found;
    if (out_of_budget || !keep_going) return SearchStatus::inconclusive;
  }
  return SearchStatus::proven_absent;
}

} // namespace detail

/// Bounded exact search for rk(g) <= r_max. The factors of degree a <= k/2
/// in a minimal decomposition can be replaced by an echelon basis of their
/// span, so each node fixes such bases for every degree and solves one
/// linear system for all partners. Lengths are tried in increasing order,
/// so a found certificate has minimal length. proven_absent means every
/// length up to r_max was exhausted.
inline SearchResult<DecompositionCert> search_rank(const HomogeneousForm& g, std::size_t r_max,
                                                   std::uint64_t max_nodes = 1'000'000) {
  SearchResult<DecompositionCert> result;
  const int k = g.degree();
  const std::size_t n = g.nvars();
  if (g.is_zero()) {
    result.status = SearchStatus::found;
    result.cert = DecompositionCert{g, {}};
    return result;
  }
  std::vector<detail::ClassSpace> spaces;
  for (int a = 1; 2 * a <= k; ++a)
    spaces.push_back({detail::monomials_of_degree(n, a), detail::monomials_of_degree(n, k - a)});
  if (spaces.empty()) {
    result.status = SearchStatus::proven_absent;
    return result;
  }
  std::optional<detail::EngineHit> hit;
  result.status = detail::run_engine(g.poly(), spaces, 1, r_max, max_nodes, result.nodes, hit);
  if (hit) {
    DecompositionCert cert{g, {}};
    for (std::size_t c = 0; c < spaces.size(); ++c) {
      const int a = static_cast<int>(c) + 1;
      for (std::size_t j = 0; j < hit->fixed[c].size(); ++j) {
        if (hit->partners[c][j].is_zero()) continue;
        cert.factors.push_back({HomogeneousForm(hit->fixed[c][j], a),
                                HomogeneousForm(hit->partners[c][j], k - a)});
      }
    }
    result.cert = std::move(cert);
  }
  return result;
}

namespace detail {

/// Unordered bipartitions {S, support \ S} of the support into nonempty
/// parts, each represented by the side with fewer blocks (ties: the side
/// holding the smallest block).
inline std::vector<std::vector<int>> bipartition_sides(const std::vector<int>& support) {
  std::vector<std::vector<int>> sides;
  const std::size_t s = support.size();
  if (s < 2) return sides;
  for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << s); ++mask) {
    std::vector<int> in, out;
    for (std::size_t i = 0; i < s; ++i) (mask >> i & 1 ? in : out).push_back(support[i]);
    const bool pick = in.size() < out.size() || (in.size() == out.size() && (mask & 1));
    if (pick) sides.push_back(in);
  }
  std::stable_sort(sides.begin(), sides.end(),
                   [](const auto& a, const auto& b) { return a.size() < b.size(); });
  return sides;
}

/// PR of a 2-linear form is the rank of its coefficient matrix: M = C * E
/// with E the nonzero rows of the reduced echelon form and C the pivot
/// columns of M.
inline PartitionRankCert bilinear_partition_rank(const MultilinearForm& t) {
  const FieldSpec& F = t.field();
  const std::size_t n = t.n();
  const int b0 = t.support()[0], b1 = t.support()[1];
  Matrix m(n, n);
  for (const auto& [e, c] : t.poly().terms()) {
    std::size_t i = 0, j = 0;
    while (e[block_variable(n, b0, i)] == 0) ++i;
    while (e[block_variable(n, b1, j)] == 0) ++j;
    m.at(i, j) = c;
  }
  const Echelon ech = row_reduce(m, F);
  PartitionRankCert cert{t, {}};
  const std::size_t nv = t.poly().nvars();
  for (std::size_t r = 0; r < ech.rank(); ++r) {
    Polynomial rp(F, nv), qp(F, nv);
    for (std::size_t i = 0; i < n; ++i) {
      Exponents e(nv, 0);
      e[block_variable(n, b0, i)] = 1;
      rp.add_term(e, m.at(i, ech.pivots[r]));
    }
    for (std::size_t j = 0; j < n; ++j) {
      Exponents e(nv, 0);
      e[block_variable(n, b1, j)] = 1;
      qp.add_term(e, ech.reduced.at(r, j));
    }
    cert.terms.push_back({{b0}, MultilinearForm(std::move(rp), n, t.blocks(), {b0}),
                          MultilinearForm(std::move(qp), n, t.blocks(), {b1})});
  }
  return cert;
}

} // namespace detail

/// Bounded exact search for PR(T) <= r_max. Degree 2 is exact elimination.
/// Otherwise, per bipartition class the smaller-side factors are replaced by
/// an echelon basis of their span and the partners are solved jointly, with
/// lengths tried in increasing order. Lengths below AR(T) are skipped since
/// AR <= PR (when AR is computable within `budget`).
inline SearchResult<PartitionRankCert> search_partition_rank(const MultilinearForm& t,
                                                             std::size_t r_max,
                                                             std::uint64_t max_nodes = 1'000'000,
                                                             const Budget& budget = {}) {
  SearchResult<PartitionRankCert> result;
  if (t.is_zero()) {
    result.status = SearchStatus::found;
    result.cert = PartitionRankCert{t, {}};
    return result;
  }
  if (t.degree() < 2) {
    result.status = SearchStatus::proven_absent;
    return result;
  }
  if (t.degree() == 2) {
    result.nodes = 1;
    PartitionRankCert cert = detail::bilinear_partition_rank(t);
    if (cert.length() <= r_max) {
      result.status = SearchStatus::found;
      result.cert = std::move(cert);
    } else {
      result.status = SearchStatus::proven_absent;
    }
    return result;
  }

  std::size_t r_min = 1;
  try {
    const AnalyticRank ar = analytic_rank(t, budget);
    if (ar.infinite) {
      result.status = SearchStatus::proven_absent;
      return result;
    }
    while (static_cast<double>(r_min) < ar.value - kBiasTolerance) ++r_min;
  } catch (const BudgetError&) {
  }

  const auto sides = detail::bipartition_sides(t.support());
  std::vector<detail::ClassSpace> spaces;
  std::vector<std::vector<int>> complements;
  for (const auto& side : sides) {
    std::vector<int> rest;
    std::set_difference(t.support().begin(), t.support().end(), side.begin(), side.end(),
                        std::back_inserter(rest));
    spaces.push_back({detail::multilinear_monomials(t.n(), t.blocks(), side),
                      detail::multilinear_monomials(t.n(), t.blocks(), rest)});
    complements.push_back(std::move(rest));
  }
  std::optional<detail::EngineHit> hit;
  result.status = detail::run_engine(t.poly(), spaces, r_min, r_max, max_nodes, result.nodes, hit);
  if (hit) {
    PartitionRankCert cert{t, {}};
    for (std::size_t c = 0; c < spaces.size(); ++c)
      for (std::size_t j = 0; j < hit->fixed[c].size(); ++j) {
        if (hit->partners[c][j].is_zero()) continue;
        cert.terms.push_back({sides[c], MultilinearForm(hit->fixed[c][j], t.n(), t.blocks(), sides[c]),
                              MultilinearForm(hit->partners[c][j], t.n(), t.blocks(), complements[c])});
      }
    result.cert = std::move(cert);
  }
  return result;
}

/// AR(T) <= length of a verified PR certificate for T.
inline bool check_ar_pr_inequality(const MultilinearForm& t, const PartitionRankCert& cert,
                                   const Budget& budget = {}) {
  if (!(cert.target == t) || !verify_decomposition(cert)) return false;
  const AnalyticRank ar = analytic_rank(t, budget);
  return !ar.infinite && ar.value <= static_cast<double>(cert.length()) + kBiasTolerance;
}

/// Orients every pair so deg alpha <= deg beta, drops zero products, then
/// removes linear dependences among same-degree alphas: if
/// alpha_j = sum_i c_i alpha_i, the term j is folded into the others via
/// beta_i += c_i beta_j. Repeats until the alphas of each degree are
/// linearly independent.
inline DecompositionCert compress_decomposition(DecompositionCert cert) {
  if (Verdict v = verify_decomposition(cert); !v)
    throw PreconditionError("invalid decomposition certificate: " + v.reason);
  const FieldSpec& F = cert.target.field();
  auto& fs = cert.factors;
  for (auto& pair : fs)
    if (pair.alpha.degree() > pair.beta.degree()) std::swap(pair.alpha, pair.beta);
  std::erase_if(fs, [](const FactorPair& pr) { return pr.alpha.is_zero() || pr.beta.is_zero(); });

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t j = 0; j < fs.size() && !changed; ++j) {
      std::vector<std::size_t> earlier;
      for (std::size_t i = 0; i < j; ++i)
        if (fs[i].alpha.degree() == fs[j].alpha.degree()) earlier.push_back(i);
      if (earlier.empty()) continue;
      const auto basis = detail::monomials_of_degree(cert.target.nvars(), fs[j].alpha.degree());
      std::map<Exponents, std::size_t, GradedLexLess> index;
      for (std::size_t m = 0; m < basis.size(); ++m) index.emplace(basis[m], m);
      Matrix a(basis.size(), earlier.size());
      for (std::size_t c = 0; c < earlier.size(); ++c)
        for (const auto& [e, v] : fs[earlier[c]].alpha.poly().terms()) a.at(index.at(e), c) = v;
      std::vector<FieldElement> b(basis.size(), F.zero());
      for (const auto& [e, v] : fs[j].alpha.poly().terms()) b[index.at(e)] = v;
      auto coeffs = solve(a, b, F);
      if (!coeffs) continue;
      for (std::size_t c = 0; c < earlier.size(); ++c) {
        auto& target = fs[earlier[c]];
        target.beta = HomogeneousForm(target.beta.poly() + fs[j].beta.poly().scaled((*coeffs)[c]),
                                      target.beta.degree());
      }
      fs.erase(fs.begin() + static_cast<std::ptrdiff_t>(j));
      std::erase_if(fs, [](const FactorPair& pr) { return pr.beta.is_zero(); });
      changed = true;
    }
  }
  return cert;
}

/// From a PR certificate of a d-linear T (full support) to a rank
/// certificate of diagonal(T) / d!: alpha_i = diag(R_i) / d!, beta_i =
/// diag(Q_i). Needs p > d.
inline DecompositionCert decomposition_from_partition_rank(const PartitionRankCert& cert) {
  if (Verdict v = verify_decomposition(cert); !v)
    throw PreconditionError("invalid partition-rank certificate: " + v.reason);
  const MultilinearForm& t = cert.target;
  const int d = t.degree();
  detail::require(static_cast<std::size_t>(d) == t.blocks(), "target must be supported on every block");
  const FieldSpec& F = t.field();
  const HomogeneousForm target = depolarize(t, d);
  const FieldElement scale = F.inv(F.factorial(static_cast<unsigned>(d)));
  DecompositionCert out{target, {}};
  for (const auto& term : cert.terms) {
    HomogeneousForm a(diagonal(term.r).scaled(scale), term.r.degree());
    HomogeneousForm b(diagonal(term.q), term.q.degree());
    if (a.is_zero() || b.is_zero()) continue;
    if (a.degree() > b.degree()) std::swap(a, b);
    out.factors.push_back({std::move(a), std::move(b)});
  }
  return out;
}

} // namespace hofa

#endif // HOFA_RANK_HPP
