#ifndef HOFA_POLYNOMIAL_HPP
#define HOFA_POLYNOMIAL_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hofa/error.hpp"
#include "hofa/field.hpp"

namespace hofa {

/// Dense exponent vector of a monomial, one entry per variable.
using Exponents = std::vector<std::uint16_t>;

/// Total degree of a polynomial. The zero polynomial has no degree
/// (std::nullopt), which std::optional orders below every integer, so
/// comparisons behave like -infinity.
using Degree = std::optional<int>;

/// A point of F_p^n.
using Point = std::vector<FieldElement>;

inline int total_degree(const Exponents& e) {
  return std::accumulate(e.begin(), e.end(), 0);
}

/// Graded lexicographic order: total degree first, then lexicographic with
/// x1 most significant. Fixed globally for canonical output.
struct GradedLexLess {
  bool operator()(const Exponents& a, const Exponents& b) const {
    const int da = total_degree(a), db = total_degree(b);
    if (da != db) return da < db;
    return a < b;
  }
};

/// Sparse multivariate polynomial over F_p. Formal object: no reduction
/// modulo x^p - x. Zero coefficients are never stored.
class Polynomial {
public:
  using TermMap = std::map<Exponents, FieldElement, GradedLexLess>;

  Polynomial() : Polynomial(FieldSpec(2), 0) {}
  Polynomial(FieldSpec field, std::size_t nvars) : field_(field), nvars_(nvars) {}

  static Polynomial constant(FieldSpec field, std::size_t nvars, FieldElement c) {
    Polynomial f(field, nvars);
    f.add_term(Exponents(nvars, 0), c);
    return f;
  }
  /// The variable x_{i+1} (0-based index i).
  static Polynomial variable(FieldSpec field, std::size_t nvars, std::size_t i) {
    detail::require(i < nvars, "variable index out of range");
    Exponents e(nvars, 0);
    e[i] = 1;
    Polynomial f(field, nvars);
    f.add_term(e, field.one());
    return f;
  }
  static Polynomial monomial(FieldSpec field, Exponents e, FieldElement c) {
    Polynomial f(field, e.size());
    f.add_term(e, c);
    return f;
  }

  const FieldSpec& field() const { return field_; }
  std::size_t nvars() const { return nvars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }

  Degree degree() const {
    if (terms_.empty()) return std::nullopt;
    return total_degree(terms_.rbegin()->first);
  }

  FieldElement coefficient(const Exponents& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? field_.zero() : it->second;
  }
  FieldElement constant_term() const { return coefficient(Exponents(nvars_, 0)); }

  /// Adds c * x^e, dropping the monomial if its coefficient cancels.
  void add_term(const Exponents& e, FieldElement c) {
    detail::require(e.size() == nvars_, "exponent vector length mismatch");
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second = field_.add(it->second, c);
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  /// Every stored monomial has the same total degree (vacuous for zero).
  bool is_homogeneous() const {
    if (terms_.empty()) return true;
    const int d = total_degree(terms_.begin()->first);
    return total_degree(terms_.rbegin()->first) == d;
  }

  Polynomial operator-() const {
    Polynomial r(field_, nvars_);
    for (const auto& [e, c] : terms_) r.terms_.emplace_hint(r.terms_.end(), e, field_.neg(c));
    return r;
  }

  Polynomial& operator+=(const Polynomial& g) {
    check_compatible(g);
    for (const auto& [e, c] : g.terms_) add_term(e, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& g) {
    check_compatible(g);
    for (const auto& [e, c] : g.terms_) add_term(e, field_.neg(c));
    return *this;
  }
  friend Polynomial operator+(Polynomial f, const Polynomial& g) { return f += g; }
  friend Polynomial operator-(Polynomial f, const Polynomial& g) { return f -= g; }

  friend Polynomial operator*(const Polynomial& f, const Polynomial& g) {
    f.check_compatible(g);
    Polynomial r(f.field_, f.nvars_);
    Exponents e(f.nvars_);
    for (const auto& [ef, cf] : f.terms_)
      for (const auto& [eg, cg] : g.terms_) {
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = ef[i] + eg[i];
        r.add_term(e, f.field_.mul(cf, cg));
      }
    return r;
  }

  Polynomial scaled(FieldElement c) const {
    Polynomial r(field_, nvars_);
    if (c.is_zero()) return r;
    for (const auto& [e, v] : terms_) r.terms_.emplace_hint(r.terms_.end(), e, field_.mul(v, c));
    return r;
  }

  friend bool operator==(const Polynomial& f, const Polynomial& g) {
    return f.field_ == g.field_ && f.nvars_ == g.nvars_ && f.terms_ == g.terms_;
  }

  void check_compatible(const Polynomial& g) const {
    if (!(g.field_ == field_) || g.nvars_ != nvars_)
      throw PreconditionError("polynomials over different fields or variable counts");
  }

private:
  FieldSpec field_;
  std::size_t nvars_;
  TermMap terms_;
};

inline Polynomial add(const Polynomial& f, const Polynomial& g) { return f + g; }
inline Polynomial multiply(const Polynomial& f, const Polynomial& g) { return f * g; }
inline Polynomial scale(const Polynomial& f, FieldElement c) { return f.scaled(c); }

inline FieldElement evaluate(const Polynomial& f, std::span<const FieldElement> x) {
  detail::require(x.size() == f.nvars(), "evaluation point has wrong length");
  const FieldSpec& F = f.field();
  FieldElement sum = F.zero();
  for (const auto& [e, c] : f.terms()) {
    FieldElement t = c;
    for (std::size_t i = 0; i < e.size(); ++i)
      if (e[i]) t = F.mul(t, F.pow(x[i], e[i]));
    sum = F.add(sum, t);
  }
  return sum;
}

/// A polynomial all of whose monomials have total degree exactly `degree`.
/// The degree is carried explicitly so zero forms keep one.
class HomogeneousForm {
public:
  HomogeneousForm() = default;
  HomogeneousForm(Polynomial poly, int degree) : poly_(std::move(poly)), degree_(degree) {
    detail::require(degree >= 0, "form degree must be nonnegative");
    for (const auto& [e, c] : poly_.terms())
      if (total_degree(e) != degree)
        throw PreconditionError("polynomial is not homogeneous of degree " +
                                std::to_string(degree));
  }
  /// Wraps a homogeneous nonzero polynomial, reading the degree off it.
  static HomogeneousForm of(const Polynomial& poly) {
    if (poly.is_zero() || !poly.is_homogeneous())
      throw PreconditionError("expected a nonzero homogeneous polynomial");
    return HomogeneousForm(poly, *poly.degree());
  }

  const Polynomial& poly() const { return poly_; }
  int degree() const { return degree_; }
  bool is_zero() const { return poly_.is_zero(); }
  const FieldSpec& field() const { return poly_.field(); }
  std::size_t nvars() const { return poly_.nvars(); }

  friend bool operator==(const HomogeneousForm&, const HomogeneousForm&) = default;

private:
  Polynomial poly_;
  int degree_ = 0;
};

/// The degree-i homogeneous part f_i of f.
inline HomogeneousForm homogeneous_component(const Polynomial& f, int i) {
  Polynomial r(f.field(), f.nvars());
  for (const auto& [e, c] : f.terms())
    if (total_degree(e) == i) r.add_term(e, c);
  return HomogeneousForm(std::move(r), i);
}

/// f_{<d}: the sum of the homogeneous parts of degree below d.
inline Polynomial lower_part(const Polynomial& f, int d) {
  Polynomial r(f.field(), f.nvars());
  for (const auto& [e, c] : f.terms())
    if (total_degree(e) < d) r.add_term(e, c);
  return r;
}

/// Rewrites every monomial through `map` into a polynomial on `new_nvars`
/// variables, summing colliding images.
inline Polynomial map_monomials(const Polynomial& f, std::size_t new_nvars,
                                const std::function<Exponents(const Exponents&)>& map) {
  Polynomial r(f.field(), new_nvars);
  for (const auto& [e, c] : f.terms()) r.add_term(map(e), c);
  return r;
}

/// Places the variables of f at positions [offset, offset + f.nvars()) of a
/// polynomial on new_nvars variables.
inline Polynomial embed(const Polynomial& f, std::size_t new_nvars, std::size_t offset) {
  detail::require(offset + f.nvars() <= new_nvars, "embedding out of range");
  return map_monomials(f, new_nvars, [&](const Exponents& e) {
    Exponents out(new_nvars, 0);
    std::copy(e.begin(), e.end(), out.begin() + static_cast<std::ptrdiff_t>(offset));
    return out;
  });
}

/// Composition f(images[0], ..., images[n-1]). A nullopt image keeps the
/// variable itself, which requires the target space to have f.nvars()
/// variables.
inline Polynomial substitute(const Polynomial& f,
                             std::span<const std::optional<Polynomial>> images,
                             std::size_t target_nvars) {
  detail::require(images.size() == f.nvars(), "one image per variable required");
  const FieldSpec& F = f.field();
  for (const auto& img : images)
    if (img) {
      detail::require(img->nvars() == target_nvars && img->field() == F,
                      "substitution image has wrong shape");
    } else {
      detail::require(target_nvars == f.nvars(), "identity image needs matching space");
    }

  std::vector<std::vector<Polynomial>> powers(f.nvars());
  auto power = [&](std::size_t i, std::uint16_t e) -> const Polynomial& {
    auto& cache = powers[i];
    if (cache.empty()) cache.push_back(Polynomial::constant(F, target_nvars, F.one()));
    while (cache.size() <= e) cache.push_back(cache.back() * *images[i]);
    return cache[e];
  };

  Polynomial r(F, target_nvars);
  for (const auto& [e, c] : f.terms()) {
    Exponents kept(target_nvars, 0);
    for (std::size_t i = 0; i < e.size(); ++i)
      if (!images[i]) kept[i] = e[i];
    Polynomial term = Polynomial::monomial(F, kept, c);
    for (std::size_t i = 0; i < e.size(); ++i)
      if (images[i] && e[i]) term = term * power(i, e[i]);
    r += term;
  }
  return r;
}

/// d f / d x_j by the power rule, coefficients reduced mod p.
inline Polynomial formal_partial(const Polynomial& f, std::size_t j) {
  detail::require(j < f.nvars(), "variable index out of range");
  const FieldSpec& F = f.field();
  Polynomial r(F, f.nvars());
  for (const auto& [e, c] : f.terms()) {
    if (e[j] == 0) continue;
    Exponents d = e;
    --d[j];
    r.add_term(d, F.mul(c, F.element(e[j])));
  }
  return r;
}

inline std::vector<Polynomial> formal_gradient(const Polynomial& f) {
  std::vector<Polynomial> grad;
  grad.reserve(f.nvars());
  for (std::size_t j = 0; j < f.nvars(); ++j) grad.push_back(formal_partial(f, j));
  return grad;
}

/// The directional formal derivative c . grad f.
inline Polynomial formal_derivative(const Polynomial& f, std::span<const FieldElement> c) {
  detail::require(c.size() == f.nvars(), "direction has wrong length");
  Polynomial r(f.field(), f.nvars());
  for (std::size_t j = 0; j < f.nvars(); ++j)
    if (!c[j].is_zero()) r += formal_partial(f, j).scaled(c[j]);
  return r;
}

inline HomogeneousForm formal_derivative(const HomogeneousForm& g,
                                         std::span<const FieldElement> c) {
  detail::require(g.degree() >= 1, "formal derivative of a degree-0 form");
  return HomogeneousForm(formal_derivative(g.poly(), c), g.degree() - 1);
}

/// The polynomial x -> f(x + v) - f(x).
inline Polynomial discrete_derivative_at(const Polynomial& f, std::span<const FieldElement> v) {
  detail::require(v.size() == f.nvars(), "direction has wrong length");
  const FieldSpec& F = f.field();
  std::vector<std::optional<Polynomial>> images;
  images.reserve(f.nvars());
  for (std::size_t i = 0; i < f.nvars(); ++i)
    images.emplace_back(Polynomial::variable(F, f.nvars(), i) +
                        Polynomial::constant(F, f.nvars(), v[i]));
  return substitute(f, images, f.nvars()) - f;
}

/// Variable index of coordinate i of block b in the layout used by iterated
/// derivatives and multilinear forms: blocks are consecutive ranges of n.
inline std::size_t block_variable(std::size_t n, std::size_t block, std::size_t i) {
  return block * n + i;
}

/// Symbolic Delta^d f by the recursive definition
/// Delta_{v^(d)} ... Delta_{v^(1)} f(x).
/// Variables: blocks 0..d-1 hold the directions v^(1..d), block d the point x.
inline Polynomial iterated_discrete_derivative_recursive(const Polynomial& f, int d) {
  detail::require(d >= 0, "derivative order must be nonnegative");
  const std::size_t n = f.nvars();
  const std::size_t total = n * static_cast<std::size_t>(d + 1);
  const FieldSpec& F = f.field();
  Polynomial current = embed(f, total, block_variable(n, d, 0));
  for (int t = 0; t < d; ++t) {
    std::vector<std::optional<Polynomial>> images(total);
    for (std::size_t j = 0; j < n; ++j)
      images[block_variable(n, d, j)] = Polynomial::variable(F, total, block_variable(n, d, j)) +
                                        Polynomial::variable(F, total, block_variable(n, t, j));
    for (std::size_t v = 0; v < total; ++v)
      if (!images[v]) images[v] = Polynomial::variable(F, total, v);
    current = substitute(current, images, total) - current;
  }
  return current;
}

namespace detail {

/// Variables of a monomial listed with multiplicity in increasing order.
inline std::vector<std::size_t> variable_list(const Exponents& e) {
  std::vector<std::size_t> vars;
  for (std::size_t i = 0; i < e.size(); ++i)
    for (std::uint16_t k = 0; k < e[i]; ++k) vars.push_back(i);
  return vars;
}

} // namespace detail

/// Symbolic Delta^d f as a sum over semi-surjections phi : [k] -> [d+1]
/// hitting every one of the d direction blocks. Same variable layout as
/// iterated_discrete_derivative_recursive.
inline Polynomial iterated_discrete_derivative_semisurjection(const Polynomial& f, int d) {
  detail::require(d >= 0, "derivative order must be nonnegative");
  const std::size_t n = f.nvars();
  const std::size_t blocks = static_cast<std::size_t>(d) + 1;
  const std::size_t total = n * blocks;
  Polynomial r(f.field(), total);
  const std::uint64_t all_directions = (std::uint64_t{1} << d) - 1;

  for (const auto& [e, c] : f.terms()) {
    const auto vars = detail::variable_list(e);
    const std::size_t k = vars.size();
    if (k < static_cast<std::size_t>(d)) continue;
    std::vector<std::size_t> phi(k, 0);
    Exponents out(total);
    while (true) {
      std::uint64_t hit = 0;
      for (std::size_t j = 0; j < k; ++j)
        if (phi[j] < static_cast<std::size_t>(d)) hit |= std::uint64_t{1} << phi[j];
      if (hit == all_directions) {
        std::fill(out.begin(), out.end(), 0);
        for (std::size_t j = 0; j < k; ++j) ++out[block_variable(n, phi[j], vars[j])];
        r.add_term(out, c);
      }
      std::size_t pos = k;
      while (pos > 0) {
        --pos;
        if (++phi[pos] < blocks) break;
        phi[pos] = 0;
        if (pos == 0) {
          pos = k + 1;
          break;
        }
      }
      if (pos == k + 1 || k == 0) break;
    }
  }
  return r;
}

/// Symbolic Delta^d f (semi-surjection expansion).
inline Polynomial iterated_discrete_derivative(const Polynomial& f, int d) {
  return iterated_discrete_derivative_semisurjection(f, d);
}

} // namespace hofa

#endif // HOFA_POLYNOMIAL_HPP
