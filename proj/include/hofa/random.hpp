#ifndef HOFA_RANDOM_HPP
#define HOFA_RANDOM_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "hofa/field.hpp"
#include "hofa/multilinear.hpp"
#include "hofa/polynomial.hpp"
#include "hofa/rank.hpp"

// Seeded generators. std::mt19937_64 is fully specified by the standard and
// residues are taken as draw % p, so instances are identical across
// platforms for the same seed.

namespace hofa {

using Rng = std::mt19937_64;

inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) { return rng() % bound; }

inline int uniform_int(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

inline FieldElement random_element(const FieldSpec& F, Rng& rng) {
  return FieldElement(static_cast<std::uint32_t>(uniform_below(rng, F.p())));
}

inline FieldElement random_nonzero(const FieldSpec& F, Rng& rng) {
  return FieldElement(static_cast<std::uint32_t>(1 + uniform_below(rng, F.p() - 1)));
}

inline Point random_point(const FieldSpec& F, std::size_t n, Rng& rng) {
  Point x(n);
  for (auto& v : x) v = random_element(F, rng);
  return x;
}

/// Uniform coefficients on every monomial of degree exactly k (may be zero).
inline HomogeneousForm random_form(const FieldSpec& F, std::size_t n, int k, Rng& rng) {
  Polynomial g(F, n);
  for (const auto& e : detail::monomials_of_degree(n, k)) g.add_term(e, random_element(F, rng));
  return HomogeneousForm(std::move(g), k);
}

inline HomogeneousForm random_nonzero_form(const FieldSpec& F, std::size_t n, int k, Rng& rng) {
  while (true) {
    HomogeneousForm g = random_form(F, n, k, rng);
    if (!g.is_zero()) return g;
  }
}

/// Uniform coefficients on every monomial of degree <= max_degree.
inline Polynomial random_polynomial(const FieldSpec& F, std::size_t n, int max_degree, Rng& rng) {
  Polynomial f(F, n);
  for (int k = 0; k <= max_degree; ++k)
    for (const auto& e : detail::monomials_of_degree(n, k)) f.add_term(e, random_element(F, rng));
  return f;
}

/// Uniform multilinear form on the given support.
inline MultilinearForm random_multilinear(const FieldSpec& F, std::size_t n, std::size_t blocks,
                                          const std::vector<int>& support, Rng& rng) {
  Polynomial t(F, n * blocks);
  for (const auto& e : detail::multilinear_monomials(n, blocks, support))
    t.add_term(e, random_element(F, rng));
  return MultilinearForm(std::move(t), n, blocks, support);
}

inline MultilinearForm random_multilinear(const FieldSpec& F, std::size_t n, std::size_t blocks,
                                          Rng& rng) {
  std::vector<int> support;
  for (std::size_t b = 0; b < blocks; ++b) support.push_back(static_cast<int>(b));
  return random_multilinear(F, n, blocks, support, rng);
}

} // namespace hofa

#endif // HOFA_RANDOM_HPP
