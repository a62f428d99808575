#ifndef HOFA_BIAS_HPP
#define HOFA_BIAS_HPP

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hofa/enumerate.hpp"
#include "hofa/error.hpp"
#include "hofa/field.hpp"
#include "hofa/multilinear.hpp"
#include "hofa/polynomial.hpp"

namespace hofa {

/// Float comparisons between biases happen only after exact histograms are
/// converted, with this slack.
inline constexpr double kBiasTolerance = 1e-9;

enum class BiasMethod { exact, sampled };

struct BiasReport {
  ValueHistogram histogram;  // of all points (exact) or of the samples
  std::complex<double> bias_complex;
  double magnitude = 0;
  BiasMethod method = BiasMethod::exact;
  std::uint64_t samples = 0;
  double half_width = 0;     // 95% Hoeffding half-width per component
};

inline BiasReport report_from_histogram(ValueHistogram h) {
  BiasValue b = histogram_to_bias(h);
  return BiasReport{std::move(h), b.value, b.magnitude, BiasMethod::exact, 0, 0};
}

/// |E_x e(f(x)/p)| over all of F_p^n.
inline BiasReport bias_exact(const Polynomial& f, const Budget& budget = {}) {
  return report_from_histogram(value_histogram(f, budget));
}

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
/// Counter-based uniform residue: depends only on (seed, counter).
inline std::uint32_t counter_residue(std::uint64_t seed, std::uint64_t counter, std::uint32_t p) {
  return static_cast<std::uint32_t>(splitmix64(splitmix64(seed) ^ counter) % p);
}
} // namespace detail

inline double hoeffding_half_width(std::uint64_t samples) {
  return 2.0 * std::sqrt(std::log(2.0 / 0.05) / (2.0 * static_cast<double>(samples)));
}

/// Monte Carlo estimate of the bias from `samples` uniform points.
template <class Eval>
BiasReport sampled_bias_of(std::uint32_t p, std::size_t nvars, Eval&& eval, std::uint64_t samples,
                           std::uint64_t seed) {
  if (samples < 100) throw PreconditionError("sampling needs at least 100 samples");
  ValueHistogram h(p);
  std::vector<std::uint32_t> x(nvars);
  for (std::uint64_t s = 0; s < samples; ++s) {
    for (std::size_t i = 0; i < nvars; ++i) x[i] = detail::counter_residue(seed, s * nvars + i, p);
    h.add(FieldElement(eval(std::span<const std::uint32_t>(x))));
  }
  BiasReport r = report_from_histogram(std::move(h));
  r.method = BiasMethod::sampled;
  r.samples = samples;
  r.half_width = hoeffding_half_width(samples);
  return r;
}

inline BiasReport bias_sampled(const Polynomial& f, std::uint64_t samples, std::uint64_t seed) {
  CompiledPolynomial cf(f);
  return sampled_bias_of(f.field().p(), f.nvars(), cf, samples, seed);
}

struct GowersReport {
  double norm = 0;          // bias(Delta^d f)^(1/2^d)
  BiasReport derivative;    // bias of Delta^d f over (v_1, ..., v_d, x)
};

namespace detail {

/// Sum over S of (-1)^(d-|S|) f(x + sum_{s in S} v_s) at a point laid out as
/// directions in blocks 0..d-1 and x in block d.
template <class FValue>
std::uint32_t cube_difference(std::span<const std::uint32_t> pt, std::size_t n, int d,
                              std::uint32_t p, std::vector<std::uint32_t>& scratch,
                              FValue&& fvalue) {
  std::uint64_t acc = 0;
  for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
    for (std::size_t i = 0; i < n; ++i) {
      std::uint64_t c = pt[static_cast<std::size_t>(d) * n + i];
      for (int s = 0; s < d; ++s)
        if (mask >> s & 1u) c += pt[static_cast<std::size_t>(s) * n + i];
      scratch[i] = static_cast<std::uint32_t>(c % p);
    }
    const std::uint64_t v = fvalue(std::span<const std::uint32_t>(scratch));
    acc += ((d - std::popcount(mask)) % 2 == 0) ? v : p - v;
  }
  return static_cast<std::uint32_t>(acc % p);
}

inline double gowers_root(double power, int d) {
  return d == 0 ? power : std::pow(power, 1.0 / static_cast<double>(1u << d));
}

} // namespace detail

/// ||e(f)||_{U^d}, exact: enumerates (v_1, ..., v_d, x) and takes the
/// alternating sum of f over the cube from a value table of f.
inline GowersReport gowers_norm(const Polynomial& f, int d, const Budget& budget = {}) {
  detail::require(d >= 0 && d < 31, "Gowers order out of range");
  const std::uint32_t p = f.field().p();
  const std::size_t n = f.nvars();
  const std::size_t nvars = n * static_cast<std::size_t>(d + 1);
  domain_size(p, nvars, budget, "Gowers norm");
  const auto table = value_table(f, budget);
  auto lookup = [&](std::span<const std::uint32_t> y) {
    std::uint64_t idx = 0;
    for (auto c : y) idx = idx * p + c;
    return table[idx];
  };
  struct Acc {
    ValueHistogram h;
    std::vector<std::uint32_t> scratch;
  };
  auto acc = parallel_accumulate<Acc>(
      p, nvars, [&] { return Acc{ValueHistogram(p), std::vector<std::uint32_t>(n)}; },
      [&](Acc& a, std::span<const std::uint32_t> pt) {
        a.h.add(FieldElement(detail::cube_difference(pt, n, d, p, a.scratch, lookup)));
      },
      [](Acc& into, const Acc& from) { into.h.merge(from.h); });
  GowersReport r{0, report_from_histogram(std::move(acc.h))};
  r.norm = detail::gowers_root(r.derivative.magnitude, d);
  return r;
}

/// Sampled ||e(f)||_{U^d} over random (v, x).
inline GowersReport gowers_norm_sampled(const Polynomial& f, int d, std::uint64_t samples,
                                        std::uint64_t seed) {
  detail::require(d >= 0 && d < 31, "Gowers order out of range");
  const std::uint32_t p = f.field().p();
  const std::size_t n = f.nvars();
  CompiledPolynomial cf(f);
  std::vector<std::uint32_t> scratch(n);
  auto eval = [&](std::span<const std::uint32_t> pt) {
    return detail::cube_difference(pt, n, d, p, scratch, cf);
  };
  GowersReport r{0, sampled_bias_of(p, n * static_cast<std::size_t>(d + 1), eval, samples, seed)};
  r.norm = detail::gowers_root(r.derivative.magnitude, d);
  return r;
}

struct AnalyticRank {
  double value = 0;
  bool infinite = false;  // bias exactly 0
  BiasReport bias;
};

/// -log_p bias(T). For prime p a character sum vanishes exactly when the
/// histogram is flat, so the infinite case is decided on integers.
inline AnalyticRank analytic_rank(const MultilinearForm& t, const Budget& budget = {}) {
  AnalyticRank ar;
  ar.bias = bias_exact(t.poly(), budget);
  if (histogram_is_flat(ar.bias.histogram)) {
    ar.infinite = true;
    ar.value = std::numeric_limits<double>::infinity();
  } else {
    ar.value = -std::log(ar.bias.magnitude) / std::log(static_cast<double>(t.field().p()));
    if (ar.value < 0) ar.value = 0;
  }
  return ar;
}

struct ZeroSetReport {
  std::uint64_t count = 0;
  double density = 0;
  ValueHistogram conditional_histogram;  // of g on Z(A)
};

namespace detail {
inline void require_same_space(std::span<const Polynomial> polys, const Polynomial& ref) {
  for (const auto& a : polys) ref.check_compatible(a);
}
} // namespace detail

namespace detail {
struct ZeroSetAcc {
  std::uint64_t count = 0;
  ValueHistogram h;
};
} // namespace detail

/// |Z(A)| and the histogram of g on Z(A). An empty list means Z = F_p^n.
inline ZeroSetReport zero_set(std::span<const Polynomial> as, const Polynomial& g,
                              const Budget& budget = {}) {
  detail::require_same_space(as, g);
  const std::uint32_t p = g.field().p();
  const std::uint64_t total = domain_size(p, g.nvars(), budget, "zero set");
  std::vector<CompiledPolynomial> ca(as.begin(), as.end());
  CompiledPolynomial cg(g);
  auto acc = parallel_accumulate<detail::ZeroSetAcc>(
      p, g.nvars(), [p] { return detail::ZeroSetAcc{0, ValueHistogram(p)}; },
      [&](detail::ZeroSetAcc& a, std::span<const std::uint32_t> x) {
        for (const auto& c : ca)
          if (c(x) != 0) return;
        ++a.count;
        a.h.add(FieldElement(cg(x)));
      },
      [](detail::ZeroSetAcc& into, const detail::ZeroSetAcc& from) {
        into.count += from.count;
        into.h.merge(from.h);
      });
  return {acc.count, static_cast<double>(acc.count) / static_cast<double>(total), std::move(acc.h)};
}

inline ZeroSetReport zero_set(std::span<const Polynomial> as, std::size_t nvars, FieldSpec field,
                              const Budget& budget = {}) {
  return zero_set(as, Polynomial(field, nvars), budget);
}

/// A point of Z(as) outside Z(bs), or nullopt when Z(as) is contained in Z(bs).
inline std::optional<Point> find_outside(std::span<const Polynomial> as,
                                         std::span<const Polynomial> bs, FieldSpec field,
                                         std::size_t nvars, const Budget& budget = {}) {
  Polynomial ref(field, nvars);
  detail::require_same_space(as, ref);
  detail::require_same_space(bs, ref);
  domain_size(field.p(), nvars, budget, "zero-set containment");
  std::vector<CompiledPolynomial> ca(as.begin(), as.end()), cb(bs.begin(), bs.end());
  std::optional<Point> witness;
  for_each_point(field.p(), nvars, [&](std::span<const std::uint32_t> x) {
    if (witness) return;
    for (const auto& c : ca)
      if (c(x) != 0) return;
    for (const auto& c : cb)
      if (c(x) != 0) {
        witness = to_elements(x);
        return;
      }
  });
  return witness;
}

/// Averaging identity at the integer level: for every x the multiset
/// {g(x) - sum_i c_i A_i(x) : c in F_p^m} is the constant g(x) on Z(A) and
/// flat off it. Also compares E_c bi(g - sum c_i A_i) with
/// P(Z(A)) * bi(g | Z(A)) as complex numbers.
inline bool check_avg_correlation_identity(const Polynomial& g, std::span<const Polynomial> as,
                                           const Budget& budget = {}) {
  detail::require_same_space(as, g);
  const FieldSpec& F = g.field();
  const std::uint32_t p = F.p();
  const std::size_t m = as.size();
  const std::uint64_t combos = domain_size(p, m, budget, "average correlation combinations");
  const std::uint64_t points = domain_size(p, g.nvars(), budget, "average correlation points");
  if (combos > budget.max_points / points)
    throw BudgetError("average correlation: p^(n+m) exceeds budget");

  std::vector<CompiledPolynomial> ca(as.begin(), as.end());
  CompiledPolynomial cg(g);
  std::vector<ValueHistogram> per_c(combos, ValueHistogram(p));
  std::vector<std::uint32_t> avals(m);
  bool pointwise = true;
  for_each_point(p, g.nvars(), [&](std::span<const std::uint32_t> x) {
    const std::uint32_t gx = cg(x);
    bool in_zero_set = true;
    for (std::size_t i = 0; i < m; ++i) {
      avals[i] = ca[i](x);
      if (avals[i]) in_zero_set = false;
    }
    ValueHistogram slice(p);
    std::uint64_t ci = 0;
    for_each_point(p, m, [&](std::span<const std::uint32_t> c) {
      std::uint64_t s = 0;
      for (std::size_t i = 0; i < m; ++i) s += static_cast<std::uint64_t>(c[i]) * avals[i] % p;
      const auto v = FieldElement(static_cast<std::uint32_t>((gx + p - s % p) % p));
      slice.add(v);
      per_c[ci++].add(v);
    });
    if (in_zero_set ? slice.count(FieldElement(gx)) != combos : !histogram_is_flat(slice))
      pointwise = false;
  });
  if (!pointwise) return false;

  std::complex<double> lhs = 0;
  for (const auto& h : per_c) lhs += histogram_to_bias(h).value;
  lhs /= static_cast<double>(combos);
  const ZeroSetReport z = zero_set(as, g, budget);
  const std::complex<double> rhs =
      z.count == 0 ? 0.0 : z.density * histogram_to_bias(z.conditional_histogram).value;
  return std::abs(lhs - rhs) <= kBiasTolerance;
}

/// Bias chain rule: for A linear in the first nx variables (every monomial
/// has x-degree exactly one) and B free of them, bi(A + B) = bi(A) bi(B | E)
/// with E = {y : A(., y) = 0}. Checked as: every x-slice of A + B with y
/// outside E is flat, hist(A) minus the |E| p^nx zeros is flat, and the
/// complex identity holds.
inline bool check_bias_chain_rule(const Polynomial& a, const Polynomial& b, std::size_t nx,
                                  const Budget& budget = {}) {
  a.check_compatible(b);
  const std::size_t n = a.nvars();
  detail::require(nx <= n, "x-block larger than the variable count");
  for (const auto& [e, c] : a.terms()) {
    int xdeg = 0;
    for (std::size_t i = 0; i < nx; ++i) xdeg += e[i];
    if (xdeg != 1) throw PreconditionError("A is not linear in the x variables");
  }
  for (const auto& [e, c] : b.terms())
    for (std::size_t i = 0; i < nx; ++i)
      if (e[i]) throw PreconditionError("B depends on the x variables");

  const FieldSpec& F = a.field();
  const std::uint32_t p = F.p();
  const std::size_t ny = n - nx;
  domain_size(p, n, budget, "bias chain rule");
  const std::uint64_t xcount = *checked_power(p, nx);
  CompiledPolynomial ca(a), cb(b);
  std::vector<CompiledPolynomial> coeffs;
  for (std::size_t i = 0; i < nx; ++i) coeffs.emplace_back(formal_partial(a, i));

  std::uint64_t e_count = 0;
  ValueHistogram b_on_e(p), hist_a(p), hist_sum(p);
  bool slices_flat = true;
  std::vector<std::uint32_t> pt(n);
  for_each_point(p, ny, [&](std::span<const std::uint32_t> y) {
    std::copy(y.begin(), y.end(), pt.begin() + static_cast<std::ptrdiff_t>(nx));
    std::fill(pt.begin(), pt.begin() + static_cast<std::ptrdiff_t>(nx), 0u);
    bool in_e = true;
    for (const auto& c : coeffs)
      if (c(pt) != 0) in_e = false;
    const std::uint32_t by = cb(pt);
    if (in_e) {
      ++e_count;
      b_on_e.add(FieldElement(by));
    }
    ValueHistogram slice(p);
    for_each_point(p, nx, [&](std::span<const std::uint32_t> x) {
      std::copy(x.begin(), x.end(), pt.begin());
      const std::uint32_t av = ca(pt);
      hist_a.add(FieldElement(av));
      const auto s = FieldElement(static_cast<std::uint32_t>((av + by) % p));
      slice.add(s);
      hist_sum.add(s);
    });
    if (!in_e && !histogram_is_flat(slice)) slices_flat = false;
  });
  if (!slices_flat) return false;

  // hist(A) = |E| p^nx at zero plus a flat remainder
  ValueHistogram rest(p);
  bool counts_ok = hist_a.count(FieldElement(0)) >= e_count * xcount;
  for (std::uint32_t v = 0; v < p && counts_ok; ++v) {
    std::uint64_t c = hist_a.count(FieldElement(v));
    if (v == 0) c -= e_count * xcount;
    rest.add(FieldElement(v), c);
  }
  if (!counts_ok || !histogram_is_flat(rest)) return false;

  const std::complex<double> lhs = histogram_to_bias(hist_sum).value;
  const std::complex<double> bi_a = histogram_to_bias(hist_a).value;
  const std::complex<double> bi_b_e = e_count ? histogram_to_bias(b_on_e).value : 0.0;
  return std::abs(lhs - bi_a * bi_b_e) <= kBiasTolerance;
}

/// cor(f, P) = bias(f - P).
inline double correlation(const Polynomial& f, const Polynomial& p, const Budget& budget = {}) {
  return bias_exact(f - p, budget).magnitude;
}

/// Monomials of total degree below d in n variables, in increasing
/// graded-lex order.
inline std::vector<Exponents> monomials_below(std::size_t n, int d) {
  std::vector<Exponents> out;
  if (d <= 0) return out;
  Exponents e(n, 0);
  // odometer over exponents in [0, d) with total-degree filter
  while (true) {
    if (total_degree(e) < d) out.push_back(e);
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (++e[i] < d) break;
      e[i] = 0;
      if (i == 0) {
        std::sort(out.begin(), out.end(), GradedLexLess{});
        return out;
      }
    }
    if (n == 0) return out;
  }
}

struct SweepResult {
  std::vector<FieldElement> coefficients;  // maximizing combination
  Polynomial combination;                  // sum_j coefficients[j] * basis[j]
  BiasReport bias;                         // of f - combination
};

/// max over c in F_p^s of bias(f - sum_j c_j basis_j), with c enumerated
/// lexicographically (first coordinate most significant); the first maximum
/// wins.
inline SweepResult sweep_combinations(const Polynomial& f, std::span<const Polynomial> basis,
                                      const Budget& budget = {}, const std::string& what = "sweep") {
  detail::require_same_space(basis, f);
  const FieldSpec& F = f.field();
  const std::uint32_t p = F.p();
  const std::uint64_t points = domain_size(p, f.nvars(), budget, what);
  const auto combos = checked_power(p, basis.size());
  if (!combos || *combos > budget.max_points / points) {
    throw BudgetError(what + ": " + std::to_string(p) + "^" + std::to_string(basis.size()) +
                      " combinations times " + std::to_string(points) +
                      " points exceeds budget of " + std::to_string(budget.max_points) +
                      " (feasible envelope: p^(s+n) <= budget, roughly p <= 5, n <= 2, d <= 2 "
                      "for cor_below)");
  }
  const auto ftable = value_table(f, budget);
  std::vector<std::vector<std::uint32_t>> tables;
  for (const auto& b : basis) tables.push_back(value_table(b, budget));

  double best = -1;
  std::vector<std::uint32_t> best_c(basis.size(), 0);
  ValueHistogram best_h(p);
  for_each_point(p, basis.size(), [&](std::span<const std::uint32_t> c) {
    ValueHistogram h(p);
    for (std::uint64_t x = 0; x < points; ++x) {
      std::uint64_t s = ftable[x];
      for (std::size_t j = 0; j < basis.size(); ++j)
        if (c[j]) s += static_cast<std::uint64_t>(p - c[j]) * tables[j][x] % p;
      h.add(FieldElement(static_cast<std::uint32_t>(s % p)));
    }
    const double b = histogram_to_bias(h).magnitude;
    if (b > best + 1e-12) {
      best = b;
      best_c.assign(c.begin(), c.end());
      best_h = std::move(h);
    }
  });
  SweepResult r{{}, Polynomial(F, f.nvars()), report_from_histogram(std::move(best_h))};
  for (std::size_t j = 0; j < basis.size(); ++j) {
    r.coefficients.emplace_back(best_c[j]);
    r.combination += basis[j].scaled(FieldElement(best_c[j]));
  }
  return r;
}

struct CorBelowResult {
  double value = 0;
  Polynomial argmax;
};

/// cor_{<d}(f) = max over deg P < d of bias(f - P), by exhaustion over every
/// coefficient vector of Poly_{<d}, with monomials in increasing graded-lex
/// order; the first maximum wins.
inline CorBelowResult cor_below(const Polynomial& f, int d, const Budget& budget = {}) {
  detail::require(d >= 1, "cor_below needs d >= 1");
  const FieldSpec& F = f.field();
  std::vector<Polynomial> basis;
  for (const auto& e : monomials_below(f.nvars(), d)) basis.push_back(Polynomial::monomial(F, e, F.one()));
  SweepResult s = sweep_combinations(f, basis, budget, "cor_below");
  return {s.bias.magnitude, std::move(s.combination)};
}

/// bias(Delta^d f) >= cor_{<d}(f)^(2^d), within kBiasTolerance.
inline bool check_easy_direction(const Polynomial& f, int d, const Budget& budget = {}) {
  detail::require(d >= 1, "easy direction needs d >= 1");
  const double lhs = bias_exact(iterated_discrete_derivative(f, d), budget).magnitude;
  const double cor = cor_below(f, d, budget).value;
  return lhs + kBiasTolerance >= std::pow(cor, static_cast<double>(1u << d));
}

struct DeriveBiasResult {
  Point c_star;
  double derivative_bias = 0;  // bias(Delta^d f)
  double mean_bias = 0;        // E_c bias(h~ - d_c g~)
  double best_bias = 0;        // bias(h~ - d_{c*} g~)
  double g_tilde_bias = 0;     // bias(g~)
  bool average_bound = false;  // bias(Delta^d f) <= mean
  bool top_bound = false;      // bias(Delta^d f) <= bias(g~)
  bool histogram_identity = false;
  bool ok() const { return average_bound && top_bound && histogram_identity; }
};

/// For f of degree <= d+1 with g = f_{d+1}, h = f_d: the two upper bounds on
/// bias(Delta^d f) and c* = argmax_c bias(h~ - d_c g~) (first in
/// lexicographic order). Also checks that the histograms of h~ - d_c g~
/// summed over c reproduce the histogram of Delta^d f exactly.
inline DeriveBiasResult derive_bias_bounds(const Polynomial& f, int d, const Budget& budget = {}) {
  const FieldSpec& F = f.field();
  const std::uint32_t p = F.p();
  detail::require(d >= 1, "derive_bias_bounds needs d >= 1");
  if (p == 2) throw PreconditionError("characteristic 2 unsupported");
  if (p <= static_cast<std::uint32_t>(d + 1))
    throw PreconditionError("characteristic too small for degree " + std::to_string(d + 1));
  if (f.degree() > d + 1) throw PreconditionError("polynomial degree exceeds d+1");
  const std::size_t n = f.nvars();

  const MultilinearForm g_tilde = polarize(homogeneous_component(f, d + 1));
  const MultilinearForm h_tilde = polarize(homogeneous_component(f, d));
  const std::uint64_t directions = domain_size(p, n, budget, "derive-bias directions");
  const std::uint64_t points = domain_size(p, n * static_cast<std::size_t>(d), budget, "derive-bias points");
  if (directions > budget.max_points / points)
    throw BudgetError("derive-bias: p^(n(d+1)) exceeds budget");

  DeriveBiasResult r;
  const BiasReport delta = bias_exact(iterated_discrete_derivative(f, d), budget);
  r.derivative_bias = delta.magnitude;
  r.g_tilde_bias = bias_exact(g_tilde.poly(), budget).magnitude;

  ValueHistogram pooled(p);
  double sum = 0, best = -1;
  for_each_point(p, n, [&](std::span<const std::uint32_t> c) {
    const Point cp = to_elements(c);
    const MultilinearForm diff = h_tilde - block_derivative(g_tilde, cp);
    ValueHistogram h = value_histogram(diff.poly(), budget);
    const double b = histogram_to_bias(h).magnitude;
    pooled.merge(h);
    sum += b;
    if (b > best + 1e-12) {
      best = b;
      r.c_star = cp;
    }
  });
  r.mean_bias = sum / static_cast<double>(directions);
  r.best_bias = best;
  r.average_bound = r.derivative_bias <= r.mean_bias + kBiasTolerance;
  r.top_bound = r.derivative_bias <= r.g_tilde_bias + kBiasTolerance;
  r.histogram_identity = pooled == delta.histogram;
  return r;
}

/// Zero-set size floor: Z(A) empty or |Z(A)| >= p^(n - sum deg A_i).
inline bool check_warning(std::span<const Polynomial> as, std::size_t nvars, FieldSpec field,
                          const Budget& budget = {}) {
  const ZeroSetReport z = zero_set(as, nvars, field, budget);
  if (z.count == 0) return true;
  long long exponent = static_cast<long long>(nvars);
  for (const auto& a : as) exponent -= a.degree().value_or(0);
  if (exponent <= 0) return true;
  return z.count >= *checked_power(field.p(), static_cast<std::uint64_t>(exponent));
}

} // namespace hofa

#endif // HOFA_BIAS_HPP
