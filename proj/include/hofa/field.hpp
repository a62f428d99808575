#ifndef HOFA_FIELD_HPP
#define HOFA_FIELD_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <compare>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "hofa/error.hpp"

namespace hofa {

/// An element of F_p, always stored in canonical form [0, p).
struct FieldElement {
  std::uint32_t value = 0;

  constexpr FieldElement() = default;
  constexpr explicit FieldElement(std::uint32_t v) : value(v) {}

  constexpr bool is_zero() const { return value == 0; }
  friend constexpr auto operator<=>(FieldElement, FieldElement) = default;
};

constexpr bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

/// The prime field F_p with p <= 2^31, so a product of two canonical
/// elements fits in 64 bits.
class FieldSpec {
public:
  static constexpr std::uint64_t max_modulus = std::uint64_t{1} << 31;

  explicit FieldSpec(std::uint64_t p) : p_(static_cast<std::uint32_t>(p)) {
    if (p > max_modulus || !is_prime(p))
      throw PreconditionError("field modulus " + std::to_string(p) +
                              " is not a prime <= 2^31");
  }

  std::uint32_t p() const { return p_; }

  FieldElement element(std::int64_t v) const {
    std::int64_t r = v % static_cast<std::int64_t>(p_);
    if (r < 0) r += p_;
    return FieldElement(static_cast<std::uint32_t>(r));
  }
  FieldElement zero() const { return FieldElement(0); }
  FieldElement one() const { return FieldElement(1); }

  FieldElement add(FieldElement a, FieldElement b) const {
    std::uint64_t s = std::uint64_t{a.value} + b.value;
    return FieldElement(static_cast<std::uint32_t>(s >= p_ ? s - p_ : s));
  }
  FieldElement sub(FieldElement a, FieldElement b) const {
    return a.value >= b.value ? FieldElement(a.value - b.value)
                              : FieldElement(a.value + (p_ - b.value));
  }
  FieldElement neg(FieldElement a) const {
    return a.value == 0 ? a : FieldElement(p_ - a.value);
  }
  FieldElement mul(FieldElement a, FieldElement b) const {
    return FieldElement(
        static_cast<std::uint32_t>(std::uint64_t{a.value} * b.value % p_));
  }
  FieldElement pow(FieldElement a, std::uint64_t e) const {
    FieldElement r = one();
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }
  FieldElement inv(FieldElement a) const {
    if (a.is_zero()) throw PreconditionError("division by zero in F_p");
    return pow(a, p_ - 2);
  }
  /// k! reduced mod p (zero once k >= p).
  FieldElement factorial(unsigned k) const {
    FieldElement r = one();
    for (unsigned i = 2; i <= k; ++i) r = mul(r, element(i));
    return r;
  }

  friend bool operator==(const FieldSpec&, const FieldSpec&) = default;

private:
  std::uint32_t p_;
};

/// Integer counts N_a = #{inputs with value a}, a in F_p. Exact carrier of
/// every character sum in the library. Dense for small p, sparse otherwise.
class ValueHistogram {
public:
  static constexpr std::uint32_t dense_limit = 1u << 16;

  ValueHistogram() : ValueHistogram(2) {}
  explicit ValueHistogram(std::uint32_t p) : p_(p) {
    if (p_ <= dense_limit) dense_.assign(p_, 0);
  }

  std::uint32_t p() const { return p_; }
  std::uint64_t total() const { return total_; }
  bool empty() const { return total_ == 0; }

  void add(FieldElement a, std::uint64_t count = 1) {
    if (count == 0) return;
    if (is_dense())
      dense_[a.value] += count;
    else
      sparse_[a.value] += count;
    total_ += count;
  }

  std::uint64_t count(FieldElement a) const {
    if (is_dense()) return dense_[a.value];
    auto it = sparse_.find(a.value);
    return it == sparse_.end() ? 0 : it->second;
  }

  /// Visits (value, count) for every nonzero count, in increasing value order
  /// for the dense representation.
  template <class Visit>
  void for_each_nonzero(Visit&& visit) const {
    if (is_dense()) {
      for (std::uint32_t a = 0; a < p_; ++a)
        if (dense_[a]) visit(FieldElement(a), dense_[a]);
    } else {
      std::vector<std::pair<std::uint32_t, std::uint64_t>> sorted(sparse_.begin(),
                                                                  sparse_.end());
      std::sort(sorted.begin(), sorted.end());
      for (auto [a, c] : sorted) visit(FieldElement(a), c);
    }
  }

  /// Componentwise pooling of two histograms over disjoint domains.
  ValueHistogram& merge(const ValueHistogram& other) {
    detail::require(other.p_ == p_, "histogram merge across different fields");
    other.for_each_nonzero([&](FieldElement a, std::uint64_t c) { add(a, c); });
    return *this;
  }

  friend bool operator==(const ValueHistogram& a, const ValueHistogram& b) {
    if (a.p_ != b.p_ || a.total_ != b.total_) return false;
    if (a.is_dense()) return a.dense_ == b.dense_;
    bool equal = true;
    a.for_each_nonzero([&](FieldElement v, std::uint64_t c) {
      if (b.count(v) != c) equal = false;
    });
    return equal && a.sparse_.size() == b.sparse_.size();
  }

private:
  bool is_dense() const { return p_ <= dense_limit; }

  std::uint32_t p_;
  std::uint64_t total_ = 0;
  std::vector<std::uint64_t> dense_;
  std::unordered_map<std::uint32_t, std::uint64_t> sparse_;
};

/// Complex bias E chi(f) with chi(y) = exp(2 pi i y / p), and its modulus.
struct BiasValue {
  std::complex<double> value;
  double magnitude = 0.0;
};

/// True iff all p counts are equal (the character sum vanishes exactly).
inline bool histogram_is_flat(const ValueHistogram& h) {
  const std::uint64_t first = h.count(FieldElement(0));
  if (h.total() != first * h.p()) return false;
  bool flat = true;
  h.for_each_nonzero([&](FieldElement, std::uint64_t c) {
    if (c != first) flat = false;
  });
  return flat;
}

/// (1/total) * sum_a N_a * exp(2 pi i a / p); modulus clamped to [0, 1].
/// A flat histogram gives exactly 0.
inline BiasValue histogram_to_bias(const ValueHistogram& h) {
  if (h.empty()) throw PreconditionError("empty domain");
  if (histogram_is_flat(h)) return {};
  long double re = 0, im = 0;
  const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  h.for_each_nonzero([&](FieldElement a, std::uint64_t c) {
    long double angle = two_pi * a.value / h.p();
    re += c * std::cos(angle);
    im += c * std::sin(angle);
  });
  BiasValue out;
  out.value = {static_cast<double>(re / h.total()), static_cast<double>(im / h.total())};
  out.magnitude = std::clamp(std::abs(out.value), 0.0, 1.0);
  return out;
}

/// p^e, or nullopt on 64-bit overflow.
inline std::optional<std::uint64_t> checked_power(std::uint64_t p, std::uint64_t e) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < e; ++i) {
    if (p != 0 && r > UINT64_MAX / p) return std::nullopt;
    r *= p;
  }
  return r;
}

} // namespace hofa

#endif // HOFA_FIELD_HPP
