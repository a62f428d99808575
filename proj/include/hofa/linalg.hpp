#ifndef HOFA_LINALG_HPP
#define HOFA_LINALG_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hofa/error.hpp"
#include "hofa/field.hpp"

namespace hofa {

/// Dense row-major matrix over F_p.
class Matrix {
public:
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, FieldElement(0)) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  FieldElement& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  FieldElement at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<FieldElement> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const FieldElement> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t c = 0; c < cols_; ++c) std::swap(at(a, c), at(b, c));
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<FieldElement> data_;
};

struct Echelon {
  Matrix reduced;                   // reduced row echelon form
  std::vector<std::size_t> pivots;  // pivot column of each nonzero row
  std::size_t rank() const { return pivots.size(); }
};

/// Gauss-Jordan elimination. Pivots are taken in increasing column order, so
/// callers that order columns by graded-lex monomial pivot on the lowest one.
inline Echelon row_reduce(Matrix m, const FieldSpec& F) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t sel = r;
    while (sel < m.rows() && m.at(sel, c).is_zero()) ++sel;
    if (sel == m.rows()) continue;
    m.swap_rows(r, sel);
    const FieldElement inv = F.inv(m.at(r, c));
    for (std::size_t j = c; j < m.cols(); ++j) m.at(r, j) = F.mul(m.at(r, j), inv);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || m.at(i, c).is_zero()) continue;
      const FieldElement factor = m.at(i, c);
      for (std::size_t j = c; j < m.cols(); ++j)
        m.at(i, j) = F.sub(m.at(i, j), F.mul(factor, m.at(r, j)));
    }
    pivots.push_back(c);
    ++r;
  }
  return {std::move(m), std::move(pivots)};
}

inline std::size_t rank(const Matrix& m, const FieldSpec& F) { return row_reduce(m, F).rank(); }

/// One solution of A x = b (free variables set to zero), or nullopt.
inline std::optional<std::vector<FieldElement>> solve(const Matrix& a,
                                                      std::span<const FieldElement> b,
                                                      const FieldSpec& F) {
  detail::require(b.size() == a.rows(), "right-hand side has wrong length");
  Matrix aug(a.rows(), a.cols() + 1);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) aug.at(i, j) = a.at(i, j);
    aug.at(i, a.cols()) = b[i];
  }
  Echelon e = row_reduce(std::move(aug), F);
  if (!e.pivots.empty() && e.pivots.back() == a.cols()) return std::nullopt;
  std::vector<FieldElement> x(a.cols(), FieldElement(0));
  for (std::size_t i = 0; i < e.pivots.size(); ++i) x[e.pivots[i]] = e.reduced.at(i, a.cols());
  return x;
}

/// Enumerates every r-dimensional subspace of F_p^dim exactly once, each
/// given by its unique reduced row echelon basis (r x dim). `visit` returns
/// false to stop; the function returns false iff stopped early.
template <class Visit>
bool for_each_echelon_subspace(const FieldSpec& F, std::size_t dim, std::size_t r,
                               Visit&& visit) {
  if (r > dim) return true;
  Matrix basis(r, dim);
  if (r == 0) return visit(static_cast<const Matrix&>(basis));

  std::vector<std::size_t> pivots(r);
  for (std::size_t i = 0; i < r; ++i) pivots[i] = i;
  while (true) {
    // free slots: row i, column c > pivots[i], c not a pivot column
    std::vector<std::pair<std::size_t, std::size_t>> free;
    std::vector<bool> is_pivot(dim, false);
    for (auto c : pivots) is_pivot[c] = true;
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t c = pivots[i] + 1; c < dim; ++c)
        if (!is_pivot[c]) free.emplace_back(i, c);

    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t c = 0; c < dim; ++c) basis.at(i, c) = FieldElement(c == pivots[i] ? 1 : 0);

    while (true) {
      if (!visit(static_cast<const Matrix&>(basis))) return false;
      std::size_t k = 0;
      for (; k < free.size(); ++k) {
        auto [i, c] = free[k];
        if (basis.at(i, c).value + 1 < F.p()) {
          basis.at(i, c) = FieldElement(basis.at(i, c).value + 1);
          break;
        }
        basis.at(i, c) = FieldElement(0);
      }
      if (k == free.size()) break;
    }

    // next pivot combination
    std::size_t i = r;
    while (i > 0) {
      --i;
      if (pivots[i] < dim - r + i) {
        ++pivots[i];
        for (std::size_t j = i + 1; j < r; ++j) pivots[j] = pivots[j - 1] + 1;
        break;
      }
      if (i == 0) return true;
    }
  }
}

} // namespace hofa

#endif // HOFA_LINALG_HPP
