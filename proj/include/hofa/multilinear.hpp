#ifndef HOFA_MULTILINEAR_HPP
#define HOFA_MULTILINEAR_HPP

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "hofa/error.hpp"
#include "hofa/polynomial.hpp"

namespace hofa {

/// A form on `blocks` vector variables of n coordinates each, linear in every
/// block of its support and independent of the others. Stored as a flat
/// polynomial on n * blocks variables (block b occupies [b*n, (b+1)*n)).
class MultilinearForm {
public:
  /// `support` lists 0-based block indices; it is sorted and deduplicated.
  MultilinearForm(Polynomial poly, std::size_t n, std::size_t blocks, std::vector<int> support)
      : poly_(std::move(poly)), n_(n), blocks_(blocks), support_(std::move(support)) {
    std::sort(support_.begin(), support_.end());
    support_.erase(std::unique(support_.begin(), support_.end()), support_.end());
    detail::require(poly_.nvars() == n_ * blocks_, "multilinear form has wrong variable count");
    for (int b : support_)
      detail::require(b >= 0 && static_cast<std::size_t>(b) < blocks_, "support block out of range");
    std::vector<bool> in(blocks_, false);
    for (int b : support_) in[b] = true;
    for (const auto& [e, c] : poly_.terms())
      for (std::size_t b = 0; b < blocks_; ++b) {
        int deg = 0;
        for (std::size_t i = 0; i < n_; ++i) deg += e[block_variable(n_, b, i)];
        if (deg != (in[b] ? 1 : 0))
          throw PreconditionError("monomial is not multilinear on the declared support");
      }
  }

  /// Form supported on every block.
  static MultilinearForm on_all_blocks(Polynomial poly, std::size_t n, std::size_t blocks) {
    std::vector<int> support(blocks);
    std::iota(support.begin(), support.end(), 0);
    return MultilinearForm(std::move(poly), n, blocks, std::move(support));
  }
  static MultilinearForm zero(FieldSpec field, std::size_t n, std::size_t blocks,
                              std::vector<int> support) {
    return MultilinearForm(Polynomial(field, n * blocks), n, blocks, std::move(support));
  }

  const Polynomial& poly() const { return poly_; }
  const FieldSpec& field() const { return poly_.field(); }
  std::size_t n() const { return n_; }
  std::size_t blocks() const { return blocks_; }
  const std::vector<int>& support() const { return support_; }
  int degree() const { return static_cast<int>(support_.size()); }
  bool is_zero() const { return poly_.is_zero(); }
  bool in_support(int b) const {
    return std::binary_search(support_.begin(), support_.end(), b);
  }

  MultilinearForm& operator+=(const MultilinearForm& o) {
    check_same_shape(o);
    poly_ += o.poly_;
    return *this;
  }
  MultilinearForm& operator-=(const MultilinearForm& o) {
    check_same_shape(o);
    poly_ -= o.poly_;
    return *this;
  }
  friend MultilinearForm operator+(MultilinearForm a, const MultilinearForm& b) { return a += b; }
  friend MultilinearForm operator-(MultilinearForm a, const MultilinearForm& b) { return a -= b; }
  MultilinearForm scaled(FieldElement c) const {
    return MultilinearForm(poly_.scaled(c), n_, blocks_, support_);
  }

  friend bool operator==(const MultilinearForm&, const MultilinearForm&) = default;

private:
  void check_same_shape(const MultilinearForm& o) const {
    if (o.n_ != n_ || o.blocks_ != blocks_ || o.support_ != support_)
      throw PreconditionError("multilinear forms with different block structure");
  }

  Polynomial poly_;
  std::size_t n_;
  std::size_t blocks_;
  std::vector<int> support_;
};

/// A tuple of points, one per block.
using BlockPoint = std::vector<Point>;

inline FieldElement evaluate(const MultilinearForm& t, const BlockPoint& x) {
  detail::require(x.size() == t.blocks(), "block point has wrong number of blocks");
  Point flat;
  flat.reserve(t.n() * t.blocks());
  for (const auto& block : x) {
    detail::require(block.size() == t.n(), "block point component has wrong length");
    flat.insert(flat.end(), block.begin(), block.end());
  }
  return evaluate(t.poly(), flat);
}

/// Polarization as the permutation sum over S_k of each monomial's variables.
inline MultilinearForm polarize_by_permutations(const HomogeneousForm& g) {
  const std::size_t k = static_cast<std::size_t>(g.degree());
  const std::size_t n = g.nvars();
  Polynomial out(g.field(), n * k);
  Exponents e(n * k);
  for (const auto& [exps, c] : g.poly().terms()) {
    const auto vars = detail::variable_list(exps);
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    do {
      std::fill(e.begin(), e.end(), 0);
      for (std::size_t j = 0; j < k; ++j) ++e[block_variable(n, perm[j], vars[j])];
      out.add_term(e, c);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return MultilinearForm::on_all_blocks(std::move(out), n, k);
}

/// Polarization as Delta^k g, which is independent of the base point since
/// deg g = k; the point block is dropped.
inline MultilinearForm polarize_by_differences(const HomogeneousForm& g) {
  const std::size_t k = static_cast<std::size_t>(g.degree());
  const std::size_t n = g.nvars();
  Polynomial full = iterated_discrete_derivative(g.poly(), static_cast<int>(k));
  Polynomial out = map_monomials(full, n * k, [&](const Exponents& e) {
    for (std::size_t i = 0; i < n; ++i)
      if (e[block_variable(n, k, i)] != 0)
        throw Error("Delta^k of a degree-k form depends on the base point");
    return Exponents(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(n * k));
  });
  return MultilinearForm::on_all_blocks(std::move(out), n, k);
}

/// The symmetric multilinear form with g~(x, ..., x) = k! g(x).
inline MultilinearForm polarize(const HomogeneousForm& g) {
  return g.degree() <= 6 ? polarize_by_permutations(g) : polarize_by_differences(g);
}

/// Restriction to the diagonal: every block set to the same point.
inline Polynomial diagonal(const MultilinearForm& t) {
  const std::size_t n = t.n();
  return map_monomials(t.poly(), n, [&](const Exponents& e) {
    Exponents out(n, 0);
    for (std::size_t v = 0; v < e.size(); ++v) out[v % n] = static_cast<std::uint16_t>(out[v % n] + e[v]);
    return out;
  });
}

/// Inverse of polarization on forms of degree k: diagonal(T) / k!.
inline HomogeneousForm depolarize(const MultilinearForm& t, int k) {
  if (t.field().p() <= static_cast<std::uint32_t>(k))
    throw PreconditionError("characteristic too small for degree");
  detail::require(t.degree() == k, "form degree does not match requested depolarization degree");
  const FieldSpec& F = t.field();
  return HomogeneousForm(diagonal(t).scaled(F.inv(F.factorial(static_cast<unsigned>(k)))), k);
}

/// T(v_1, ..., v_{d-1}, c): substitutes c into the last block.
inline MultilinearForm block_derivative(const MultilinearForm& t, std::span<const FieldElement> c) {
  detail::require(t.blocks() >= 1, "form has no blocks");
  const int last = static_cast<int>(t.blocks()) - 1;
  if (!t.in_support(last)) throw PreconditionError("last block is not in the support");
  detail::require(c.size() == t.n(), "direction has wrong length");
  const std::size_t n = t.n();
  const std::size_t kept = n * (t.blocks() - 1);
  const FieldSpec& F = t.field();
  Polynomial out(F, kept);
  for (const auto& [e, coeff] : t.poly().terms()) {
    std::size_t i = 0;
    while (e[kept + i] == 0) ++i;
    out.add_term(Exponents(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(kept)),
                 F.mul(coeff, c[i]));
  }
  std::vector<int> support(t.support().begin(), t.support().end() - 1);
  return MultilinearForm(std::move(out), n, t.blocks() - 1, std::move(support));
}

/// (T(., e_i))_i: the gradient with respect to the last block.
inline std::vector<MultilinearForm> block_gradient(const MultilinearForm& t) {
  std::vector<MultilinearForm> grad;
  for (std::size_t i = 0; i < t.n(); ++i) {
    Point e(t.n(), FieldElement(0));
    e[i] = FieldElement(1);
    grad.push_back(block_derivative(t, e));
  }
  return grad;
}

/// Moves block b of t to position target[b].
inline MultilinearForm permute_blocks(const MultilinearForm& t, std::span<const int> target) {
  detail::require(target.size() == t.blocks(), "permutation has wrong length");
  std::vector<int> check(target.begin(), target.end());
  std::sort(check.begin(), check.end());
  for (std::size_t i = 0; i < check.size(); ++i)
    detail::require(check[i] == static_cast<int>(i), "not a permutation of the blocks");
  const std::size_t n = t.n();
  Polynomial out = map_monomials(t.poly(), t.poly().nvars(), [&](const Exponents& e) {
    Exponents r(e.size(), 0);
    for (std::size_t b = 0; b < t.blocks(); ++b)
      for (std::size_t i = 0; i < n; ++i)
        r[block_variable(n, target[b], i)] = e[block_variable(n, b, i)];
    return r;
  });
  std::vector<int> support;
  for (int b : t.support()) support.push_back(target[b]);
  return MultilinearForm(std::move(out), n, t.blocks(), std::move(support));
}

/// Whether the derivative of the polarization in the last block equals the
/// polarization of the formal derivative.
inline bool check_delta_nabla(const HomogeneousForm& g, std::span<const FieldElement> c) {
  detail::require(g.degree() >= 1, "delta-nabla check needs degree >= 1");
  return block_derivative(polarize(g), c) == polarize(formal_derivative(g, c));
}

/// g~(v_1, ..., v_d, x + (v_1 + ... + v_d) / 2), which equals
/// Delta^d_v g(x) for g of degree d + 1 in odd characteristic.
inline FieldElement dd_via_polarization(const MultilinearForm& g_tilde,
                                        std::span<const Point> directions, const Point& x) {
  const FieldSpec& F = g_tilde.field();
  if (F.p() == 2) throw PreconditionError("characteristic 2 unsupported for the derivative-polarization identity");
  detail::require(g_tilde.blocks() == directions.size() + 1,
                  "polarization must have one more block than directions");
  const FieldElement half = F.inv(F.element(2));
  Point shifted = x;
  for (const auto& v : directions)
    for (std::size_t i = 0; i < shifted.size(); ++i)
      shifted[i] = F.add(shifted[i], F.mul(half, v[i]));
  BlockPoint args(directions.begin(), directions.end());
  args.push_back(std::move(shifted));
  return evaluate(g_tilde, args);
}

inline FieldElement dd_via_polarization(const HomogeneousForm& g, std::span<const Point> directions,
                                        const Point& x) {
  if (g.field().p() == 2) throw PreconditionError("characteristic 2 unsupported for the derivative-polarization identity");
  detail::require(g.degree() == static_cast<int>(directions.size()) + 1,
                  "form degree must be one more than the number of directions");
  return dd_via_polarization(polarize(g), directions, x);
}

} // namespace hofa

#endif // HOFA_MULTILINEAR_HPP
